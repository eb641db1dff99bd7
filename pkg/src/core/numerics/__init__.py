from .extrapolation import (LimitEstimate, extrapolate_limit, geometric_grid, numeric_derivative,
                            sample_on_grid)
from .quadrature import IntegralResult, TailClass, integrate_improper

__all__ = [
    'IntegralResult',
    'TailClass',
    'integrate_improper',
    'LimitEstimate',
    'extrapolate_limit',
    'geometric_grid',
    'numeric_derivative',
    'sample_on_grid',
]
