"""Sharpness scans: extract sharp constants from bubble families along λ-grids."""
from .providers import (ScanManager, ScanReport, ckn_sharpness_scan, logsob_sharpness_scan,
                        sobolev_sharpness_scan)

__all__ = [
    'ScanManager',
    'ScanReport',
    'sobolev_sharpness_scan',
    'logsob_sharpness_scan',
    'ckn_sharpness_scan',
]
