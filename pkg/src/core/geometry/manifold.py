"""Pole-centered radial model manifolds.

A model is described by its ball volume V(ρ) and sphere area A(ρ) = V'(ρ)
about the pole. Analytic kinds (euclidean, cone) are exact; profile tables
interpolate the log volume ratio g(log ρ) = log(V/(ω_n ρ^n)) with a monotone
cubic (PCHIP), so a Bishop-Gromov-monotone table stays monotone, and extend
it beyond the last row with the power-law tail fitted for the AVR.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from src.core.constants import volume_unit_ball
from src.core.errors import (InsufficientDataError, InvalidDimensionError,
                             ParameterDomainError, ProfileFormatError)
from src.core.geometry.profile_table import VolumeProfileTable, load_profile_table
from src.core.numerics.extrapolation import TOWARD_INFINITY, extrapolate_limit
from src.core.numerics.quadrature import (DEFAULT_TOL, IntegralResult, TailClass,
                                          integrate_improper)
from src.utils.logger import setup_logger

ArrayLike = Union[float, np.ndarray]

EUCLIDEAN = 'euclidean'
CONE = 'cone'
TABLE = 'table'

TAIL_FRACTION = 0.01
MIN_TAIL_DECADES = 2.0
BISHOP_GROMOV_TOL = 1e-12

logger = setup_logger('Manifold')


@dataclass(frozen=True)
class ManifoldSpec:
    """Recipe for construct_manifold"""
    kind: str
    n: int
    theta: float = 1.0
    table: Optional[VolumeProfileTable] = None

    def label(self) -> str:
        if self.kind == CONE:
            return f"cone({self.n}, {self.theta:g})"
        if self.kind == TABLE:
            source = self.table.source if self.table is not None else None
            return f"table({self.n}, {source or 'in-memory'})"
        return f"euclidean({self.n})"


class _TableProfile:
    """Interpolated log volume ratio with a fitted power-law tail"""

    def __init__(self, n: int, table: VolumeProfileTable):
        self.n = n
        self.table = table
        omega = volume_unit_ball(n)
        self.t = np.log(table.rho)
        self.g = np.log(table.volume) - n * self.t - math.log(omega)
        self.spline = PchipInterpolator(self.t, self.g, extrapolate=False)
        self.d1 = self.spline.derivative(1)
        self.d2 = self.spline.derivative(2)
        self.t_min, self.t_max = float(self.t[0]), float(self.t[-1])
        self.ratio_first = float(math.exp(self.g[0]))
        self.ratio_last = float(math.exp(self.g[-1]))
        self.avr, self.tail_alpha, self.tail_report = self._fit_tail()

    def _fit_tail(self) -> Tuple[float, float, Dict]:
        table = self.table
        ratios = np.exp(self.g)
        mask = table.rho >= TAIL_FRACTION * table.rho[-1]
        rho_tail, ratio_tail = table.rho[mask], ratios[mask]
        alpha_hint = table.tail_exponent_hint

        decades = float(np.log10(table.rho[-1] / table.rho[0]))
        if alpha_hint is None and (len(rho_tail) < 4 or decades < MIN_TAIL_DECADES):
            raise InsufficientDataError(
                "Profile tail too short to extrapolate the AVR: supply a tail exponent hint "
                f"or at least {MIN_TAIL_DECADES:g} decades of samples",
                details={'tail_rows': int(len(rho_tail)), 'decades': round(decades, 3)})
        if len(rho_tail) < 2:
            raise InsufficientDataError("Profile tail needs at least two rows")

        if alpha_hint is not None:
            # Linear least squares for ratio = L + c ρ^{-α}
            design = np.column_stack([np.ones_like(rho_tail), rho_tail ** (-alpha_hint)])
            (limit, _), *_ = np.linalg.lstsq(design, ratio_tail, rcond=None)
            alpha = float(alpha_hint)
            report = {'method': 'hinted-least-squares', 'correction_exponent': alpha}
        else:
            estimate = extrapolate_limit(list(zip(rho_tail, ratio_tail)), TOWARD_INFINITY,
                                         window=min(len(rho_tail), 8))
            limit, alpha = estimate.limit, estimate.correction_exponent
            report = estimate.as_dict()

        limit = float(min(limit, ratios.min()))
        if not limit > 0.0:
            raise InsufficientDataError("Extrapolated AVR is not positive; profile tail is unresolved",
                                        details={'avr_estimate': limit})
        if limit > 1.0:
            limit = 1.0
        return limit, float(alpha), report

    def log_ratio(self, rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """g, dg/dt, d²g/dt² at t = log ρ"""
        t = np.log(rho)
        g = np.empty_like(t)
        g1 = np.zeros_like(t)
        g2 = np.zeros_like(t)

        low = t < self.t_min
        high = t > self.t_max
        mid = ~(low | high)

        g[low] = self.g[0]
        if np.any(mid):
            g[mid] = self.spline(t[mid])
            g1[mid] = self.d1(t[mid])
            g2[mid] = self.d2(t[mid])
        if np.any(high):
            excess = self.ratio_last - self.avr
            if math.isfinite(self.tail_alpha) and excess > 0.0:
                decay = np.exp(-self.tail_alpha * (t[high] - self.t_max))
                ratio = self.avr + excess * decay
                ratio_t = -self.tail_alpha * excess * decay
                ratio_tt = self.tail_alpha ** 2 * excess * decay
                g[high] = np.log(ratio)
                g1[high] = ratio_t / ratio
                g2[high] = ratio_tt / ratio - g1[high] ** 2
            else:
                g[high] = math.log(self.avr)
        return g, g1, g2


class RadialManifold:
    """Pole-centered radial model with Ric >= 0 compatible volume growth"""

    def __init__(self, spec: ManifoldSpec):
        self.spec = spec
        self.n = spec.n
        self.kind = spec.kind
        self.omega = volume_unit_ball(spec.n)
        self._profile: Optional[_TableProfile] = None

        if spec.kind == TABLE:
            self._profile = _TableProfile(spec.n, spec.table)
            self.avr = self._profile.avr
            self.tail_exponent_hint = spec.table.tail_exponent_hint
        else:
            self.avr = float(spec.theta)
            self.tail_exponent_hint = None

    @property
    def label(self) -> str:
        return self.spec.label()

    @property
    def is_diagnostic(self) -> bool:
        """Table profiles need not come from a genuine Ric >= 0 metric"""
        return self.kind == TABLE

    @property
    def tail_report(self) -> Optional[Dict]:
        return self._profile.tail_report if self._profile is not None else None

    def breakpoints(self) -> List[float]:
        """Radii where A is only piecewise smooth"""
        if self._profile is None:
            return []
        rho = self._profile.table.rho
        return [float(rho[0]), float(rho[-1])]

    def _apply(self, rho: ArrayLike, func: Callable[[np.ndarray], np.ndarray]) -> ArrayLike:
        arr = np.asarray(rho, dtype=float)
        result = func(np.atleast_1d(arr))
        if arr.ndim == 0:
            return float(result[0])
        return result.reshape(arr.shape)

    def volume_ratio(self, rho: ArrayLike) -> ArrayLike:
        """V(ρ)/(ω_n ρ^n)"""
        if self._profile is None:
            return self._apply(rho, lambda r: np.full_like(r, self.avr))
        return self._apply(rho, lambda r: np.exp(self._profile.log_ratio(r)[0]))

    def volume(self, rho: ArrayLike) -> ArrayLike:
        """Ball volume V(ρ)"""
        n = self.n
        if self._profile is None:
            return self._apply(rho, lambda r: self.avr * self.omega * r ** n)
        return self._apply(rho, lambda r: self.omega * r ** n * np.exp(self._profile.log_ratio(r)[0]))

    def area(self, rho: ArrayLike) -> ArrayLike:
        """Sphere area A(ρ) = V'(ρ)"""
        n = self.n
        if self._profile is None:
            return self._apply(rho, lambda r: n * self.avr * self.omega * r ** (n - 1))

        def _area(r):
            g, g1, _ = self._profile.log_ratio(r)
            return self.omega * r ** (n - 1) * np.exp(g) * (n + g1)
        return self._apply(rho, _area)

    def log_area_derivative(self, rho: ArrayLike) -> ArrayLike:
        """A'(ρ)/A(ρ), the drift of the radial Laplacian"""
        n = self.n
        if self._profile is None:
            return self._apply(rho, lambda r: (n - 1.0) / r)

        def _drift(r):
            _, g1, g2 = self._profile.log_ratio(r)
            return (n - 1.0 + g1 + g2 / (n + g1)) / r
        return self._apply(rho, _drift)

    def describe(self) -> Dict:
        info = {'label': self.label, 'kind': self.kind, 'n': self.n, 'avr': self.avr}
        if self.kind == CONE:
            info['theta'] = self.spec.theta
        if self._profile is not None:
            info['table_rows'] = int(len(self._profile.table.rho))
            info['tail_fit'] = self.tail_report
            info['diagnostic'] = True
        return info

    def __repr__(self) -> str:
        return f"RadialManifold({self.label}, avr={self.avr:.12g})"


def construct_manifold(spec: ManifoldSpec) -> RadialManifold:
    """
    Build a radial model manifold

    Args:
        spec: euclidean(n), cone(n, θ) or table(n, VolumeProfileTable)

    Returns:
        RadialManifold
    """
    if isinstance(spec.n, bool) or int(spec.n) != spec.n or spec.n < 2:
        raise InvalidDimensionError(f"Manifold dimension must be an integer >= 2, got {spec.n!r}")
    if spec.kind == EUCLIDEAN:
        spec = ManifoldSpec(kind=EUCLIDEAN, n=int(spec.n), theta=1.0)
    elif spec.kind == CONE:
        if not (isinstance(spec.theta, (int, float)) and 0.0 < spec.theta <= 1.0):
            raise ParameterDomainError(f"Cone parameter θ must lie in (0, 1], got {spec.theta}",
                                       details={'theta': spec.theta})
    elif spec.kind == TABLE:
        if spec.table is None:
            raise ProfileFormatError("Table manifold needs a VolumeProfileTable")
    else:
        raise ParameterDomainError(f"Unknown manifold kind {spec.kind!r}")

    manifold = RadialManifold(spec)
    logger.info(f"Constructed {manifold!r}")
    return manifold


def euclidean(n: int) -> RadialManifold:
    return construct_manifold(ManifoldSpec(kind=EUCLIDEAN, n=n))


def cone(n: int, theta: float) -> RadialManifold:
    return construct_manifold(ManifoldSpec(kind=CONE, n=n, theta=theta))


def from_table(n: int, table: VolumeProfileTable) -> RadialManifold:
    return construct_manifold(ManifoldSpec(kind=TABLE, n=n, table=table))


def parse_manifold_spec(text: str, n: int, tail_exponent_hint: Optional[float] = None) -> ManifoldSpec:
    """Parse ``euclidean``, ``cone:<θ>`` or ``table:<csv path>``"""
    text = text.strip()
    kind, _, argument = text.partition(':')
    kind = kind.strip().lower()
    if kind == EUCLIDEAN and not argument:
        return ManifoldSpec(kind=EUCLIDEAN, n=n)
    if kind == CONE:
        try:
            theta = float(argument)
        except ValueError:
            raise ParameterDomainError(f"Cone spec needs a numeric θ, got {text!r}")
        return ManifoldSpec(kind=CONE, n=n, theta=theta)
    if kind == TABLE and argument:
        table = load_profile_table(argument.strip(), tail_exponent_hint=tail_exponent_hint)
        return ManifoldSpec(kind=TABLE, n=n, table=table)
    raise ParameterDomainError(f"Unrecognized manifold spec {text!r}; "
                               "expected euclidean, cone:<theta> or table:<path>")


def asymptotic_volume_ratio(m: RadialManifold) -> float:
    """AVR = lim V(ρ)/(ω_n ρ^n); stored for analytic kinds, tail-extrapolated for tables"""
    return m.avr


@dataclass
class BishopGromovReport:
    """Outcome of validate_bishop_gromov"""
    manifold: str
    passed: bool
    max_upper_violation: float
    max_monotonicity_violation: float
    violation_interval: Optional[Tuple[float, float]]
    worst_rho: Optional[float]
    tolerance: float
    grid_size: int
    rows: List[Dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            'manifold': self.manifold,
            'passed': self.passed,
            'max_upper_violation': self.max_upper_violation,
            'max_monotonicity_violation': self.max_monotonicity_violation,
            'violation_interval': list(self.violation_interval) if self.violation_interval else None,
            'worst_rho': self.worst_rho,
            'tolerance': self.tolerance,
            'grid_size': self.grid_size,
        }


def validate_bishop_gromov(m: RadialManifold, grid: Sequence[float],
                           tol: float = BISHOP_GROMOV_TOL) -> BishopGromovReport:
    """
    Check V(ρ) <= ω_n ρ^n and monotonicity of V(ρ)/ρ^n

    Table rows are merged into the grid so violations inside the data are
    always located.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0.0):
        raise ParameterDomainError("Bishop-Gromov grid must be non-empty and positive")
    if m.kind == TABLE:
        grid = np.union1d(grid, m.spec.table.rho)
    else:
        grid = np.unique(grid)

    ratio = np.asarray(m.volume_ratio(grid), dtype=float)
    upper = np.maximum(ratio - 1.0, 0.0)
    increases = np.maximum(np.diff(ratio), 0.0) if grid.size > 1 else np.zeros(0)

    max_upper = float(upper.max())
    max_increase = float(increases.max()) if increases.size else 0.0
    passed = max_upper <= tol and max_increase <= tol

    interval = None
    worst = None
    if max_increase > tol:
        i = int(np.argmax(increases))
        lo, hi = i, i + 1
        while lo > 0 and increases[lo - 1] > tol:
            lo -= 1
        while hi < len(increases) and increases[hi] > tol:
            hi += 1
        interval = (float(grid[lo]), float(grid[hi]))
        worst = float(grid[i + 1])
    elif max_upper > tol:
        worst = float(grid[int(np.argmax(upper))])
        bad = grid[upper > tol]
        interval = (float(bad[0]), float(bad[-1]))

    rows = [{'rho': float(r), 'ratio': float(q)} for r, q in zip(grid, ratio)]
    report = BishopGromovReport(manifold=m.label, passed=passed, max_upper_violation=max_upper,
                                max_monotonicity_violation=max_increase, violation_interval=interval,
                                worst_rho=worst, tolerance=tol, grid_size=int(grid.size), rows=rows)
    if not passed:
        logger.warning(f"""
        Bishop-Gromov validation failed:
        Manifold: {m.label}
        Upper-bound violation: {max_upper:.3e}
        Monotonicity violation: {max_increase:.3e}
        Interval: {interval}
        """)
    return report


def radial_integral(m: RadialManifold, phi: Callable[[float], float],
                    tail: Optional[TailClass] = None, tol: float = DEFAULT_TOL,
                    scale: float = 1.0, singularity: float = 0.0,
                    points: Optional[Sequence[float]] = None) -> IntegralResult:
    """∫₀^∞ φ(ρ) A(ρ) dρ, the integral over M of the radial function φ(d(pole, ·))"""
    area = m.area
    extra = list(points or []) + m.breakpoints()
    return integrate_improper(lambda rho: phi(rho) * area(rho), tail=tail, tol=tol,
                              scale=scale, singularity=singularity, points=extra)


def layer_cake_integral(m: RadialManifold, dphi: Callable[[float], float],
                        tail: Optional[TailClass] = None, tol: float = DEFAULT_TOL,
                        scale: float = 1.0, singularity: float = 0.0,
                        points: Optional[Sequence[float]] = None) -> IntegralResult:
    """
    -∫₀^∞ φ'(ρ) V(ρ) dρ, equal to ∫ φ A dρ whenever φV vanishes at 0 and ∞

    Uses V rather than A, which is the better-conditioned quantity on tables.
    """
    volume = m.volume
    extra = list(points or []) + m.breakpoints()
    return integrate_improper(lambda rho: -dphi(rho) * volume(rho), tail=tail, tol=tol,
                              scale=scale, singularity=singularity, points=extra)
