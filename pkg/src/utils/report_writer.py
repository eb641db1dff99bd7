import csv
import json
import math
import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.core.errors import InsufficientDataError
from src.utils.logger import setup_logger

logger = setup_logger('ReportWriter')


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become None"""
    if hasattr(value, 'as_dict'):
        return to_jsonable(value.as_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def report_rows(report: Any) -> List[Dict]:
    """The tabular series of a report: its rows, or its (λ, value) samples"""
    if isinstance(report, dict):
        rows = report.get('rows')
    elif hasattr(report, 'rows'):
        rows = report.rows
    elif hasattr(report, 'series'):
        rows = [{'lambda': lam, 'value': value} for lam, value in report.series()]
    else:
        rows = None
    return list(rows or [])


def emit_plot_data(report: Any, path: str) -> str:
    """
    Write the report's series as CSV with a header row

    Columns follow the key order of the first row; later rows may not add keys.

    Raises:
        InsufficientDataError: the report carries no series
        OSError: the path is not writable
    """
    rows = report_rows(report)
    if not rows:
        raise InsufficientDataError("Report carries no series to emit")
    columns = list(rows[0].keys())
    frame = pd.DataFrame([to_jsonable(row) for row in rows], columns=columns)

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator='\n', quoting=csv.QUOTE_MINIMAL,
                 float_format='%.17g')
    logger.info(f"Wrote {len(frame)} rows ({', '.join(columns)}) to {path}")
    return path


class ReportWriter:
    """Writes JSON reports and CSV series under one output directory"""

    def __init__(self, out_dir: str, config: Optional[Dict] = None, tool_version: str = ''):
        """
        Args:
            out_dir: Directory receiving the files
            config: Resolved run configuration embedded in every JSON report
            tool_version: Package version embedded in every JSON report
        """
        self.out_dir = out_dir
        self.config = config or {}
        self.tool_version = tool_version
        self.written: List[str] = []
        self._setup_logging()

    def _setup_logging(self):
        self.logger = setup_logger('ReportWriter')

    def _path(self, name: str, extension: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, f"{name}.{extension}")

    def write_json(self, name: str, report: Any) -> str:
        """Report as sorted-key JSON, with the config and tool version attached"""
        document = {
            'report': to_jsonable(report),
            'config': to_jsonable(self.config),
            'tool_version': self.tool_version,
        }
        path = self._path(name, 'json')
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(document, f, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
            f.write('\n')
        self.written.append(path)
        self.logger.info(f"Wrote report {name} to {path}")
        return path

    def write_csv(self, name: str, report: Any) -> Optional[str]:
        """Series of the report, or None when it has none"""
        if not report_rows(report):
            self.logger.debug(f"Report {name} has no series; CSV skipped")
            return None
        path = emit_plot_data(report, self._path(name, 'csv'))
        self.written.append(path)
        return path

    def write(self, name: str, report: Any) -> List[str]:
        """JSON report plus its CSV series when it has one"""
        paths = [self.write_json(name, report)]
        csv_path = self.write_csv(name, report)
        if csv_path:
            paths.append(csv_path)
        return paths
