"""Improper-integral engine on [0, ∞).

Every integral is split at a characteristic radius ``scale``. The head
[0, scale] optionally goes through ρ = scale·u^{1/(1-β)} to remove a ρ^{-β}
singularity at the origin. The tail is mapped onto [0, 1) with
ρ = scale/(1-t) for algebraic decay or ρ = scale·(1 - log(1-t)) for
exponential decay. Both pieces go to QUADPACK through scipy.integrate.quad.
Integrands that are exactly self-similar under ρ -> cρ are therefore sampled
at the same relative nodes for every scale.

The declared decay class is compared with the far field of the integrand
before integrating, so a tail that decays slower than declared is reported
instead of being integrated with the wrong substitution.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.core.errors import ConvergenceError, IntegrandDomainError, ParameterDomainError
from src.utils.logger import setup_logger

DEFAULT_TOL = 1e-10
ABS_FLOOR = 1e-300
SUBDIVISION_LIMIT = 400
# Accepted error-estimate ceiling when QUADPACK reports a warning.
WARNING_ACCEPT = 1e-7
# Multiples of the cut radius where the far field is compared with the declared class.
FAR_FIELD_RADII = (1e2, 1e3, 1e4)
# Observed algebraic decay may fall short of the declared exponent by this much,
# enough for a logarithmic factor such as f^p log f^p.
DECAY_RTOL = 0.02
DECAY_ATOL = 0.25
# An exponential tail must steepen in log-log coordinates by this factor per decade.
EXPONENTIAL_STEEPENING = 1.5

logger = setup_logger('Quadrature')


@dataclass(frozen=True)
class TailClass:
    """Decay class of an integrand on [0, ∞)"""
    kind: str
    exponent: Optional[float] = None
    radius: Optional[float] = None

    @classmethod
    def algebraic(cls, alpha: float) -> 'TailClass':
        if not alpha > 1.0:
            raise ParameterDomainError(f"Algebraic tail needs exponent > 1, got {alpha}")
        return cls(kind='algebraic', exponent=float(alpha))

    @classmethod
    def exponential(cls) -> 'TailClass':
        return cls(kind='exponential')

    @classmethod
    def compact(cls, radius: float) -> 'TailClass':
        if not radius > 0.0:
            raise ParameterDomainError(f"Compact support radius must be positive, got {radius}")
        return cls(kind='compact', radius=float(radius))

    def describe(self) -> str:
        if self.kind == 'algebraic':
            return f"algebraic({self.exponent:g})"
        if self.kind == 'compact':
            return f"compact({self.radius:g})"
        return 'exponential'


@dataclass
class IntegralResult:
    """Value of an integral with its error estimate and evaluation count"""
    value: float
    error_estimate: float
    evaluations: int
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.error_estimate = abs(self.error_estimate)

    @property
    def relative_error(self) -> float:
        if self.value == 0.0:
            return self.error_estimate
        return self.error_estimate / abs(self.value)

    def scaled(self, factor: float) -> 'IntegralResult':
        return IntegralResult(self.value * factor, self.error_estimate * abs(factor),
                              self.evaluations, list(self.warnings))

    def __add__(self, other: 'IntegralResult') -> 'IntegralResult':
        return IntegralResult(self.value + other.value,
                              self.error_estimate + other.error_estimate,
                              self.evaluations + other.evaluations,
                              self.warnings + other.warnings)


class _CheckedIntegrand:
    """Wraps f and raises IntegrandDomainError on non-finite values"""

    def __init__(self, f: Callable[[float], float]):
        self.f = f

    def __call__(self, rho: float) -> float:
        value = float(self.f(rho))
        if not math.isfinite(value):
            raise IntegrandDomainError(f"Integrand is not finite at rho={rho!r}",
                                       details={'rho': rho, 'value': value})
        return value


def _log_slope(lo: Tuple[float, float], hi: Tuple[float, float]) -> float:
    return math.log(hi[1] / lo[1]) / math.log(hi[0] / lo[0])


def check_tail_class(f: Callable[[float], float], tail: TailClass, cut: float) -> None:
    """
    Compare the far field of f with its declared decay class

    |f| is sampled at FAR_FIELD_RADII times the cut. An algebraic(α) tail
    must fall at least like ρ^{-α} over the last decade; an exponential tail
    must steepen from one decade to the next. Samples that underflow to zero
    decay faster than any power and pass.

    Raises:
        ConvergenceError: the observed decay contradicts the declared class
    """
    if tail.kind == 'compact':
        return
    samples = []
    for factor in FAR_FIELD_RADII:
        rho = cut * factor
        try:
            value = abs(float(f(rho)))
        except (ArithmeticError, ValueError, IntegrandDomainError):
            return
        if not math.isfinite(value):
            return
        samples.append((rho, value))
    if any(value == 0.0 for _, value in samples):
        return

    near = _log_slope(samples[0], samples[1])
    far = _log_slope(samples[1], samples[2])
    if tail.kind == 'algebraic':
        consistent = -far >= tail.exponent * (1.0 - DECAY_RTOL) - DECAY_ATOL
    else:
        consistent = far < 0.0 and far <= EXPONENTIAL_STEEPENING * near
    if not consistent:
        logger.error(f"""
        Tail class mismatch:
        Declared: {tail.describe()}
        Log-log slopes: {near:.4g} then {far:.4g} beyond ρ={samples[0][0]:.6g}
        """)
        raise ConvergenceError(
            f"Integrand tail contradicts the declared class {tail.describe()}",
            details={'declared': tail.describe(), 'observed_slope': far,
                     'radius': samples[-1][0]})


def _quad_piece(g: Callable[[float], float], lo: float, hi: float, tol: float,
                points: Sequence[float], limit: int) -> IntegralResult:
    inner = [t for t in points if lo < t < hi]
    out = integrate.quad(g, lo, hi, epsabs=0.0, epsrel=tol, limit=limit,
                         points=inner or None, full_output=1)
    value, error, info = out[0], out[1], out[2]
    warnings = [out[3]] if len(out) > 3 else []
    return IntegralResult(value, error, int(info.get('neval', 0)), warnings)


def _integrate_pieces(checked: _CheckedIntegrand, tail: TailClass, tol: float, scale: float,
                      cut: float, singularity: float, points: List[float],
                      limit: int) -> IntegralResult:
    # Head [0, cut]
    if singularity > 0.0:
        power = 1.0 / (1.0 - singularity)

        def head(u: float) -> float:
            rho = cut * u ** power
            return checked(rho) * cut * power * u ** (power - 1.0)

        head_points = [(x / cut) ** (1.0 - singularity) for x in points if x < cut]
        result = _quad_piece(head, 0.0, 1.0, tol, head_points, limit)
    else:
        result = _quad_piece(checked, 0.0, cut, tol, points, limit)

    # Tail [cut, ∞) or [cut, R]; t = 1 maps to ρ = ∞ where the integrand vanishes
    if tail.kind == 'compact':
        if tail.radius > cut:
            result = result + _quad_piece(checked, cut, tail.radius, tol, points, limit)
    elif tail.kind == 'algebraic':
        def body(t: float) -> float:
            w = 1.0 - t
            if not w > 0.0:
                return 0.0
            return checked(cut / w) * cut / (w * w)

        body_points = [1.0 - cut / x for x in points if x > cut]
        result = result + _quad_piece(body, 0.0, 1.0, tol, body_points, limit)
    else:
        def body(t: float) -> float:
            w = 1.0 - t
            if not w > 0.0:
                return 0.0
            return checked(cut - scale * math.log(w)) * scale / w

        body_points = [1.0 - math.exp(-(x - cut) / scale) for x in points if x > cut]
        result = result + _quad_piece(body, 0.0, 1.0, tol, body_points, limit)
    return result


def integrate_improper(f: Callable[[float], float],
                       tail: Optional[TailClass] = None,
                       tol: float = DEFAULT_TOL,
                       scale: float = 1.0,
                       singularity: float = 0.0,
                       points: Optional[Sequence[float]] = None,
                       limit: int = SUBDIVISION_LIMIT,
                       abs_floor: float = ABS_FLOOR) -> IntegralResult:
    """
    Integrate f over [0, ∞)

    Args:
        f: Integrand, finite on (0, ∞)
        tail: Decay class; exponential when omitted
        tol: Relative tolerance
        scale: Characteristic radius where most of the mass sits
        singularity: β in [0, 1) for an integrable ρ^{-β} blow-up at 0
        points: Known kinks or jumps of f
        limit: QUADPACK subdivision budget per piece
        abs_floor: Absolute error accepted for vanishing integrals

    Returns:
        IntegralResult

    Raises:
        ConvergenceError: QUADPACK gave up with an error estimate above acceptance,
            the far field of f contradicts the declared tail class, or the
            substitutions broke down arithmetically
        IntegrandDomainError: f returned NaN or inf
    """
    tail = tail or TailClass.exponential()
    if not scale > 0.0 or not math.isfinite(scale):
        raise ParameterDomainError(f"Integration scale must be positive and finite, got {scale}")
    if not 0.0 <= singularity < 1.0:
        raise ParameterDomainError(f"Singularity exponent must lie in [0, 1), got {singularity}")

    checked = _CheckedIntegrand(f)
    points = sorted(float(x) for x in (points or []) if x > 0.0)

    cut = scale
    if tail.kind == 'compact':
        cut = min(scale, tail.radius)

    check_tail_class(checked, tail, cut)
    try:
        result = _integrate_pieces(checked, tail, tol, scale, cut, singularity, points, limit)
    except (ArithmeticError, ValueError) as e:
        raise ConvergenceError(f"Quadrature broke down under tail class {tail.describe()}: {str(e)}",
                               details={'error': type(e).__name__})

    if result.warnings:
        accept = max(WARNING_ACCEPT * abs(result.value), abs_floor)
        if result.error_estimate > accept or not math.isfinite(result.value):
            logger.error(f"""
            Quadrature failed:
            Tail class: {tail.describe()}
            Scale: {scale}
            Value: {result.value}
            Error estimate: {result.error_estimate}
            Messages: {result.warnings}
            """)
            raise ConvergenceError(
                f"Integral did not converge under tail class {tail.describe()}",
                details={'value': result.value, 'error_estimate': result.error_estimate})
        logger.debug(f"Quadrature accepted with warnings {result.warnings}, "
                     f"relative error {result.relative_error:.3e}")

    return result


def gauss_legendre_cells(f: Callable[[np.ndarray], np.ndarray], edges: np.ndarray,
                         order: int = 10) -> np.ndarray:
    """Integral of a vectorized f over each cell [edges[i], edges[i+1]]"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    lo = np.asarray(edges[:-1], dtype=float)[:, None]
    hi = np.asarray(edges[1:], dtype=float)[:, None]
    half = 0.5 * (hi - lo)
    x = lo + half * (nodes[None, :] + 1.0)
    values = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(values)):
        bad = x[~np.isfinite(values)]
        raise IntegrandDomainError("Integrand is not finite on a Gauss-Legendre cell",
                                   details={'rho': float(bad.flat[0])})
    return (values * weights[None, :]).sum(axis=1) * half[:, 0]