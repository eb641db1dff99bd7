from .constants import (aubin_talenti, ckn_constants, log_sobolev_constant, log_sobolev_exponents,
                        sobolev_exponents, volume_unit_ball)
from .errors import LabError

__all__ = [
    'LabError',
    'aubin_talenti',
    'ckn_constants',
    'log_sobolev_constant',
    'log_sobolev_exponents',
    'sobolev_exponents',
    'volume_unit_ball',
]
