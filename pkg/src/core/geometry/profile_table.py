import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.core.constants import volume_unit_ball
from src.core.errors import ParameterDomainError, ProfileFormatError

MIN_ROWS = 4


@dataclass(frozen=True)
class VolumeProfileTable:
    """Sampled ball volumes V(ρ) about the pole, rows strictly increasing in both columns"""
    rho: np.ndarray
    volume: np.ndarray
    interpolation: str = 'pchip'
    tail_exponent_hint: Optional[float] = None
    source: Optional[str] = None

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        volume = np.asarray(self.volume, dtype=float)
        if rho.ndim != 1 or rho.shape != volume.shape:
            raise ProfileFormatError("Profile columns must be one-dimensional and of equal length")
        if len(rho) < MIN_ROWS:
            raise ProfileFormatError(f"Profile needs at least {MIN_ROWS} rows, got {len(rho)}")
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(volume))):
            raise ProfileFormatError("Profile contains non-finite values")
        if rho[0] <= 0.0 or volume[0] <= 0.0:
            raise ProfileFormatError("Profile rows must be positive",
                                     details={'rho': float(rho[0]), 'volume': float(volume[0])})
        bad_rho = np.nonzero(np.diff(rho) <= 0.0)[0]
        if len(bad_rho):
            i = int(bad_rho[0])
            raise ProfileFormatError("Profile radii must be strictly increasing",
                                     details={'row': i + 1, 'rho': float(rho[i + 1])})
        bad_volume = np.nonzero(np.diff(volume) <= 0.0)[0]
        if len(bad_volume):
            i = int(bad_volume[0])
            raise ProfileFormatError("Profile volumes must be strictly increasing",
                                     details={'row': i + 1, 'rho': float(rho[i + 1])})
        if self.interpolation != 'pchip':
            raise ProfileFormatError(f"Unsupported interpolation {self.interpolation!r}")
        if self.tail_exponent_hint is not None and not self.tail_exponent_hint > 0.0:
            raise ProfileFormatError("Tail exponent hint must be positive")
        object.__setattr__(self, 'rho', rho)
        object.__setattr__(self, 'volume', volume)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'rho': self.rho, 'volume': self.volume})


def load_profile_table(path: str, tail_exponent_hint: Optional[float] = None) -> VolumeProfileTable:
    """
    Read a profile table from CSV

    Args:
        path: CSV file with header ``rho,volume``; lines starting with ``#`` are comments
        tail_exponent_hint: Optional leading correction order of V/ρ^n at infinity

    Returns:
        VolumeProfileTable
    """
    if not os.path.exists(path):
        raise ProfileFormatError(f"Profile file not found: {path}")
    try:
        frame = pd.read_csv(path, comment='#', skipinitialspace=True, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ProfileFormatError(f"Cannot parse profile file {path}: {str(e)}")

    frame.columns = [str(c).strip().lower() for c in frame.columns]
    if list(frame.columns[:2]) != ['rho', 'volume'] or len(frame.columns) != 2:
        raise ProfileFormatError(f"Profile header must be 'rho,volume', got {','.join(frame.columns)}")
    try:
        rho = frame['rho'].astype(float).to_numpy()
        volume = frame['volume'].astype(float).to_numpy()
    except ValueError as e:
        raise ProfileFormatError(f"Non-numeric profile entry in {path}: {str(e)}")
    return VolumeProfileTable(rho=rho, volume=volume, tail_exponent_hint=tail_exponent_hint,
                              source=os.path.abspath(path))


def write_profile_table(table: VolumeProfileTable, path: str, comment: Optional[str] = None) -> str:
    """Write a profile table in the format load_profile_table reads"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        if comment:
            for line in comment.splitlines():
                f.write(f"# {line}\n")
        table.to_frame().to_csv(f, index=False, lineterminator='\n', float_format='%.17g')
    return path


def sample_profile(n: int, theta: float, rho: Sequence[float]) -> VolumeProfileTable:
    """Profile V(ρ) = ω_n ρ^n (θ + (1-θ)/(1+ρ)); volume ratio falls from 1 to θ"""
    if not 0.0 < theta <= 1.0:
        raise ParameterDomainError(f"θ must lie in (0, 1], got {theta}")
    rho = np.asarray(rho, dtype=float)
    volume = volume_unit_ball(n) * rho ** n * (theta + (1.0 - theta) / (1.0 + rho))
    return VolumeProfileTable(rho=rho, volume=volume)
