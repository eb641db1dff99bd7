from .gaussian import gaussian_lsi_check, quadratic_potential
from .isoperimetric import isoperimetric_check
from .logsobolev import logsob_pipeline, logsob_quotient
from .noncollapse import noncollapse_bound, noncollapse_check
from .quotient import QuotientReport
from .sobolev import sobolev_quotient

__all__ = [
    'QuotientReport',
    'gaussian_lsi_check',
    'isoperimetric_check',
    'logsob_pipeline',
    'logsob_quotient',
    'noncollapse_bound',
    'noncollapse_check',
    'quadratic_potential',
    'sobolev_quotient',
]
