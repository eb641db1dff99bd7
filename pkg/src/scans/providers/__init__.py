from .base import SCAN_TOL, ScanPoint, ScanReport, SharpnessScan
from .ckn_provider import CknScan
from .evaluator import ScanEvaluator
from .logsob_provider import LogSobolevScan
from .manager import (ScanManager, ckn_sharpness_scan, logsob_sharpness_scan,
                      sobolev_sharpness_scan)
from .sobolev_provider import SobolevScan

__all__ = [
    'SCAN_TOL',
    'ScanPoint',
    'ScanReport',
    'SharpnessScan',
    'SobolevScan',
    'LogSobolevScan',
    'CknScan',
    'ScanEvaluator',
    'ScanManager',
    'sobolev_sharpness_scan',
    'logsob_sharpness_scan',
    'ckn_sharpness_scan',
]
