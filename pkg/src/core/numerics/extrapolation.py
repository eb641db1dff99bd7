"""λ-limit extrapolation, finite differences and λ-grid evaluation."""
import math
import warnings
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import optimize

from src.core.errors import InsufficientDataError, ParameterDomainError, StepSizeError
from src.utils.logger import setup_logger

TOWARD_INFINITY = 'infinity'
TOWARD_ZERO = 'zero'

DEFAULT_WINDOW = 6
# Relative spread under which a tail is treated as already converged.
CONSTANT_TOL = 1e-9
RESIDUAL_THRESHOLD = 1e-6

logger = setup_logger('Extrapolation')


@dataclass
class LimitEstimate:
    """Extrapolated limit of g(λ) as λ→∞ or λ→0.

    ``correction_exponent`` is ``math.inf`` when the samples are constant
    to within CONSTANT_TOL (the limit is already attained).
    """
    limit: float
    correction_exponent: float
    residual: float
    samples: List[Tuple[float, float]]
    direction: str = TOWARD_INFINITY
    reliable: bool = True
    message: str = ''
    method: str = 'fit'

    def as_dict(self) -> dict:
        alpha = self.correction_exponent
        return {
            'limit': self.limit,
            'correction_exponent': alpha if math.isfinite(alpha) else None,
            'residual': self.residual,
            'direction': self.direction,
            'reliable': self.reliable,
            'message': self.message,
            'method': self.method,
            'samples': [[lam, value] for lam, value in self.samples],
        }


def geometric_grid(lam_min: float, lam_max: float, count: int) -> np.ndarray:
    """Geometric λ-grid from lam_min to lam_max inclusive"""
    if not (0.0 < lam_min < lam_max) or not math.isfinite(lam_max):
        raise ParameterDomainError(f"λ-grid needs 0 < min < max, got [{lam_min}, {lam_max}]")
    if int(count) < 2:
        raise ParameterDomainError(f"λ-grid needs at least 2 points, got {count}")
    return np.geomspace(lam_min, lam_max, int(count))


def ratio_grid(lam_start: float, count: int, ratio: float = 2.0) -> np.ndarray:
    """Geometric λ-grid lam_start·ratio^k, k = 0..count-1"""
    if not lam_start > 0.0 or not ratio > 0.0 or ratio == 1.0:
        raise ParameterDomainError(f"Invalid ratio grid start={lam_start}, ratio={ratio}")
    return lam_start * ratio ** np.arange(int(count), dtype=float)


def sample_on_grid(func: Callable[[float], object], grid: Sequence[float],
                   n_jobs: int = 1) -> list:
    """Evaluate func at every λ of the grid; results keep grid order"""
    grid = [float(lam) for lam in grid]
    if n_jobs == 1 or len(grid) < 2:
        return [func(lam) for lam in grid]
    return Parallel(n_jobs=n_jobs, prefer='threads')(delayed(func)(lam) for lam in grid)


def _power_model(x, limit, coeff, alpha):
    return limit + coeff * np.power(x, alpha)


def _aitken(x: np.ndarray, g: np.ndarray) -> Optional[Tuple[float, float, float]]:
    d1 = g[-2] - g[-3]
    d2 = g[-1] - g[-2]
    if d1 == 0.0 or d1 * d2 <= 0.0 or abs(d2) >= abs(d1):
        return None
    q = d2 / d1
    r = x[-1] / x[-2]
    alpha = math.log(q) / math.log(r)
    limit = g[-1] + d2 * q / (1.0 - q)
    coeff = (g[-1] - limit) / x[-1] ** alpha
    return limit, coeff, alpha


def extrapolate_limit(samples: Sequence[Tuple[float, float]],
                      direction: str = TOWARD_INFINITY,
                      alpha: Optional[float] = None,
                      window: int = DEFAULT_WINDOW,
                      residual_threshold: float = RESIDUAL_THRESHOLD,
                      constant_tol: float = CONSTANT_TOL) -> LimitEstimate:
    """
    Extrapolate g(λ) to λ→∞ (model L + cλ^{-α}) or λ→0 (model L + cλ^{α})

    Args:
        samples: (λ, g(λ)) pairs on a geometric grid, at least 4
        direction: TOWARD_INFINITY or TOWARD_ZERO
        alpha: Known correction exponent; switches to Richardson steps
        window: Number of samples nearest the limit used by the fit
        residual_threshold: Relative residual above which the estimate is unreliable
        constant_tol: Relative spread below which the samples count as converged

    Returns:
        LimitEstimate; an unreliable extrapolation is reported, not raised
    """
    if direction not in (TOWARD_INFINITY, TOWARD_ZERO):
        raise ParameterDomainError(f"Unknown extrapolation direction {direction!r}")
    if len(samples) < 4:
        raise InsufficientDataError(f"Extrapolation needs at least 4 samples, got {len(samples)}")

    ordered = sorted((float(lam), float(value)) for lam, value in samples)
    lams = np.array([lam for lam, _ in ordered])
    if np.any(lams <= 0.0) or np.any(np.diff(lams) <= 0.0):
        raise ParameterDomainError("Extrapolation samples must have distinct positive λ")

    # x -> 0 is the limit in both directions
    if direction == TOWARD_INFINITY:
        x_all = 1.0 / lams
    else:
        x_all = lams[::-1].copy()
        ordered = ordered[::-1]
    g_all = np.array([value for _, value in ordered])

    count = min(max(int(window), 4), len(g_all))
    x, g = x_all[-count:], g_all[-count:]
    used = ordered[-count:]
    scale = max(np.max(np.abs(g)), np.finfo(float).tiny)

    spread = float(np.max(g) - np.min(g))
    if spread <= constant_tol * scale:
        return LimitEstimate(limit=float(g[-1]), correction_exponent=math.inf,
                             residual=spread, samples=used, direction=direction,
                             method='constant')

    diffs = np.diff(g)
    significant = diffs[np.abs(diffs) > constant_tol * scale]
    monotone = bool(np.all(significant > 0.0) or np.all(significant < 0.0))

    if alpha is not None:
        if not alpha > 0.0:
            raise ParameterDomainError(f"Correction exponent must be positive, got {alpha}")
        steps = []
        for i in range(len(g) - 1):
            r_alpha = (x[i + 1] / x[i]) ** alpha
            steps.append((g[i + 1] - r_alpha * g[i]) / (1.0 - r_alpha))
        limit = steps[-1]
        residual = abs(steps[-1] - steps[-2]) if len(steps) > 1 else 0.0
        estimate = LimitEstimate(limit=float(limit), correction_exponent=float(alpha),
                                 residual=float(residual), samples=used,
                                 direction=direction, method='richardson')
    else:
        candidates = []
        aitken = _aitken(x, g)
        if aitken is not None:
            candidates.append(aitken)
        p0 = aitken or (g[-1], g[0] - g[-1], 1.0)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter('ignore')
                popt, _ = optimize.curve_fit(
                    _power_model, x, g, p0=p0,
                    bounds=([-np.inf, -np.inf, 1e-3], [np.inf, np.inf, 20.0]),
                    x_scale='jac', max_nfev=2000)
            candidates.append(tuple(float(v) for v in popt))
        except (RuntimeError, ValueError) as e:
            logger.debug(f"Power-law fit failed, keeping Aitken estimate: {str(e)}")

        if not candidates:
            return LimitEstimate(limit=float(g[-1]), correction_exponent=math.nan,
                                 residual=spread, samples=used, direction=direction,
                                 reliable=False, method='last-sample',
                                 message='no power-law model fits the samples')

        def rms(params):
            return float(np.sqrt(np.mean((_power_model(x, *params) - g) ** 2)))

        best = min(candidates, key=rms)
        estimate = LimitEstimate(limit=best[0], correction_exponent=best[2],
                                 residual=rms(best), samples=used, direction=direction)

    problems = []
    if not monotone:
        problems.append('non-monotone tail')
    if estimate.residual > residual_threshold * max(abs(estimate.limit), 1e-300):
        problems.append(f'residual {estimate.residual:.3e} above threshold')
    if problems:
        estimate.reliable = False
        estimate.message = '; '.join(problems)
        logger.warning(f"Extrapolation unreliable ({direction}): {estimate.message}")
    return estimate


def numeric_derivative(f: Callable[[float], float], lam: float, h: float) -> float:
    """
    Five-point central difference of f at lam, error O(h^4)

    Raises:
        StepSizeError: unless 0 < h and lam - 2h > 0
    """
    if not h > 0.0:
        raise StepSizeError(f"Step must be positive, got h={h}")
    if lam - 2.0 * h <= 0.0:
        raise StepSizeError(f"Stencil leaves the domain: λ - 2h = {lam - 2.0 * h} <= 0",
                            details={'lambda': lam, 'h': h})
    return (f(lam - 2.0 * h) - 8.0 * f(lam - h) + 8.0 * f(lam + h) - f(lam + 2.0 * h)) / (12.0 * h)
