import json
import math
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

from src.core.errors import ConfigError
from src.utils.logger import setup_logger

OUTPUT_FORMATS = ('json', 'csv')
MANIFOLD_KINDS = ('euclidean', 'cone', 'table')


@dataclass
class RunConfig:
    """Resolved settings of one lab run"""
    manifold: str = 'euclidean'
    n: int = 3
    p: float = 2.0
    a: float = 0.0
    b: float = 0.0
    c: Optional[float] = None
    lambda_min: Optional[float] = None
    lambda_max: Optional[float] = None
    lambda_count: int = 12
    tol: float = 1e-4
    quad_tol: float = 1e-10
    k: Optional[float] = None
    mollifier_width: float = 0.05
    grid_nodes: int = 4096
    n_jobs: int = 1
    seed: int = 0
    campaign_count: int = 100
    tail_exponent_hint: Optional[float] = None
    out: str = 'lab_output'
    format: str = 'json'

    def validate(self) -> 'RunConfig':
        """
        Raises:
            ConfigError: a value outside its documented range or of the wrong type
        """
        try:
            return self._validate()
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Malformed configuration value: {str(e)}")

    def _validate(self) -> 'RunConfig':
        if not isinstance(self.manifold, str) or not self.manifold.strip():
            raise ConfigError("manifold must be a non-empty spec string")
        if self.manifold.partition(':')[0].strip().lower() not in MANIFOLD_KINDS:
            raise ConfigError(f"manifold must be euclidean, cone:<theta> or table:<path>, "
                              f"got {self.manifold!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.p) and self.p >= 1.0):
            raise ConfigError(f"p must be >= 1, got {self.p}")
        for key in ('lambda_min', 'lambda_max', 'k', 'c'):
            value = getattr(self, key)
            if value is not None and not (math.isfinite(value) and value > 0.0):
                raise ConfigError(f"{key} must be positive when given, got {value}")
        if (self.lambda_min is not None and self.lambda_max is not None
                and self.lambda_min >= self.lambda_max):
            raise ConfigError(f"lambda_min must be below lambda_max, got "
                              f"[{self.lambda_min}, {self.lambda_max}]")
        if int(self.lambda_count) < 4:
            raise ConfigError(f"lambda_count must be at least 4, got {self.lambda_count}")
        for key in ('tol', 'quad_tol', 'mollifier_width'):
            if not getattr(self, key) > 0.0:
                raise ConfigError(f"{key} must be positive, got {getattr(self, key)}")
        if int(self.grid_nodes) < 8:
            raise ConfigError(f"grid_nodes must be at least 8, got {self.grid_nodes}")
        if int(self.n_jobs) == 0:
            raise ConfigError("n_jobs must be non-zero")
        if int(self.campaign_count) < 1:
            raise ConfigError(f"campaign_count must be positive, got {self.campaign_count}")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError(f"format must be one of {OUTPUT_FORMATS}, got {self.format!r}")
        self.n = int(self.n)
        return self

    def lambda_grid_bounds(self, default_min: float, default_max: float):
        return (self.lambda_min if self.lambda_min is not None else default_min,
                self.lambda_max if self.lambda_max is not None else default_max)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


RUN_CONFIG_KEYS = tuple(f.name for f in fields(RunConfig))


def _check_keys(values: Dict, origin: str) -> None:
    unknown = sorted(set(values) - set(RUN_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"Unknown configuration keys in {origin}: {', '.join(unknown)}",
                          details={'unknown': unknown, 'origin': origin})


def _read_json(path: str) -> Dict:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            values = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Configuration file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Configuration file {path} is not valid JSON: {str(e)}")
    if not isinstance(values, dict):
        raise ConfigError(f"Configuration file {path} must hold a JSON object")
    return values


class ConfigManager:
    def __init__(self, config_dir: str = "config"):
        """
        Initialize Configuration Manager

        Args:
            config_dir (str): Directory holding settings.json and profile tables
        """
        self.config_dir = config_dir
        self.settings_file = os.path.join(config_dir, "settings.json")
        self.logger = setup_logger('ConfigManager')
        self.settings = self._load_settings()

    def _load_settings(self) -> Dict:
        """Load settings.json, or the built-in defaults when it does not exist"""
        if not os.path.exists(self.settings_file):
            self.logger.info(f"No settings file at {self.settings_file}; using built-in defaults")
            return RunConfig().to_dict()
        settings = _read_json(self.settings_file)
        _check_keys(settings, self.settings_file)
        return {**RunConfig().to_dict(), **settings}

    def load_run_config(self, path: Optional[str] = None,
                        overrides: Optional[Dict] = None) -> RunConfig:
        """
        Resolve a RunConfig

        Precedence: built-in defaults < settings.json < the file at path < overrides.
        Overrides set to None are ignored so unset CLI flags keep lower layers.

        Raises:
            ConfigError: unreadable file, unknown key or invalid value
        """
        values = dict(self.settings)
        if path:
            extra = _read_json(path)
            _check_keys(extra, path)
            values.update(extra)
        if overrides:
            given = {key: value for key, value in overrides.items() if value is not None}
            _check_keys(given, 'overrides')
            values.update(given)
        try:
            config = RunConfig(**values)
        except TypeError as e:
            raise ConfigError(f"Cannot build run configuration: {str(e)}")
        config.validate()
        self.logger.info(f"Resolved run configuration: {json.dumps(config.to_dict(), sort_keys=True)}")
        return config
