"""Radial probability measures on a model manifold.

A measure is stored as its density φ against dv, so the mass in
[ρ, ρ+dρ] is φ(ρ)A(ρ)dρ. Cumulative masses from the left (F) and from
the right (S) are tabulated on a logarithmic cell grid; evaluating the
right tail through S keeps the inverse accurate where F is close to 1.
"""
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from src.core.bubbles.functionals import truncation
from src.core.constants import SobolevParams
from src.core.errors import (AdmissibilityError, ConvergenceError, IllConditionedInverseError,
                             ParameterDomainError)
from src.core.geometry.manifold import RadialManifold
from src.core.inequalities.functions import RadialFunction
from src.core.numerics.quadrature import (DEFAULT_TOL, TailClass, gauss_legendre_cells,
                                          integrate_improper)

CELLS_PER_DECADE = 256
INNER_DECADES = 6.0
ALGEBRAIC_DECADES = 8.0
EXPONENTIAL_REACH = 60.0
GL_ORDER = 10

ROOT_XTOL = 1e-300
ROOT_RTOL = 1e-15
ROOT_MAXITER = 200

Density = Callable[[np.ndarray], np.ndarray]


class RadialMeasure:
    """
    Normalized radial measure with tabulated cumulative masses

    Args:
        manifold: Ambient radial model
        density: Vectorized density against dv, not necessarily normalized
        name: Label used in reports
        support: Radius of the support, math.inf for full support
        scale: Radius where most of the mass sits
        tail: Decay class of density·A beyond the table (ignored for compact support)
        breakpoints: Radii where the density is only piecewise smooth
    """

    def __init__(self, manifold: RadialManifold, density: Density, name: str,
                 support: float = math.inf, scale: float = 1.0,
                 tail: Optional[TailClass] = None,
                 breakpoints: Sequence[float] = (),
                 cells_per_decade: int = CELLS_PER_DECADE):
        if not scale > 0.0:
            raise ParameterDomainError(f"Measure scale must be positive, got {scale}")
        self.manifold = manifold
        self.name = name
        self.support = float(support)
        self.scale = float(scale)
        self.tail = tail or TailClass.exponential()
        self._raw_density = density

        lo = min(self.scale, self.support) * 10.0 ** (-INNER_DECADES)
        if self.is_compact:
            hi = self.support
        elif self.tail.kind == 'algebraic':
            hi = self.scale * 10.0 ** ALGEBRAIC_DECADES
        else:
            hi = self.scale * EXPONENTIAL_REACH
        count = max(16, int(math.ceil(math.log10(hi / lo) * cells_per_decade)))
        extra = [b for b in list(breakpoints) + manifold.breakpoints() if lo < b < hi]
        self.edges = np.unique(np.concatenate(([0.0], np.geomspace(lo, hi, count + 1), extra)))
        self.breakpoints = tuple(sorted(extra))

        cells = gauss_legendre_cells(self._weighted_raw, self.edges, order=GL_ORDER)
        if np.any(cells < 0.0):
            raise AdmissibilityError(f"Density of {name} is negative somewhere")
        outer = 0.0 if self.is_compact else self._raw_tail_beyond(hi)
        total = float(cells.sum() + outer)
        if not total > 0.0 or not math.isfinite(total):
            raise AdmissibilityError(f"Measure {name} has mass {total}; cannot normalize")

        self.raw_mass = total
        self.cell_mass = cells / total
        self.outer_mass = outer / total
        self.cdf_table = np.concatenate(([0.0], np.cumsum(self.cell_mass)))
        self.sf_table = np.concatenate((np.cumsum(self.cell_mass[::-1])[::-1], [0.0])) + self.outer_mass

    @property
    def is_compact(self) -> bool:
        return math.isfinite(self.support)

    @property
    def total_mass(self) -> float:
        return float(self.cell_mass.sum() + self.outer_mass)

    def _weighted_raw(self, rho: np.ndarray) -> np.ndarray:
        return self._raw_density(rho) * self.manifold.area(rho)

    def _raw_tail_beyond(self, rho: float) -> float:
        def integrand(x: float) -> float:
            r = rho + x
            return float(self._raw_density(np.array([r]))[0] * self.manifold.area(r))

        return integrate_improper(integrand, tail=self.tail, tol=DEFAULT_TOL, scale=rho).value

    def density(self, rho):
        """Normalized density against dv"""
        arr = np.asarray(rho, dtype=float)
        values = self._raw_density(np.atleast_1d(arr)) / self.raw_mass
        values = np.where(np.atleast_1d(arr) <= self.support, values, 0.0)
        return float(values[0]) if arr.ndim == 0 else values.reshape(arr.shape)

    def _cell(self, rho: float) -> int:
        return int(np.clip(np.searchsorted(self.edges, rho, side='right') - 1, 0, len(self.edges) - 2))

    def _partial(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        return float(gauss_legendre_cells(self._weighted_raw, np.array([a, b]), order=GL_ORDER)[0]) / self.raw_mass

    def cdf(self, rho: float) -> float:
        """F(ρ), the mass of the ball B(ρ)"""
        if rho <= 0.0:
            return 0.0
        if rho >= self.edges[-1]:
            if self.is_compact:
                return float(self.cdf_table[-1])
            return self.total_mass - self.sf(rho)
        i = self._cell(rho)
        return float(self.cdf_table[i]) + self._partial(self.edges[i], rho)

    def sf(self, rho: float) -> float:
        """S(ρ) = 1 - F(ρ), evaluated from the right"""
        if rho <= 0.0:
            return self.total_mass
        if rho >= self.edges[-1]:
            if self.is_compact:
                return 0.0
            return self._raw_tail_beyond(rho) / self.raw_mass
        i = self._cell(rho)
        return float(self.sf_table[i + 1]) + self._partial(rho, self.edges[i + 1])

    def _solve(self, func: Callable[[float], float], a: float, b: float) -> float:
        root, info = optimize.brentq(func, a, b, xtol=ROOT_XTOL, rtol=ROOT_RTOL,
                                     maxiter=ROOT_MAXITER, full_output=True, disp=False)
        if not info.converged:
            raise ConvergenceError(f"Inverse of {self.name} did not converge in [{a:g}, {b:g}]",
                                   details={'iterations': info.iterations})
        return float(root)

    def inverse_cdf(self, mass: float) -> float:
        """ρ with F(ρ) = mass, bracketed by the cumulative table"""
        if mass <= 0.0:
            return 0.0
        i = int(np.searchsorted(self.cdf_table, mass, side='left'))
        if i >= len(self.edges):
            return self.inverse_sf(max(self.total_mass - mass, 0.0))
        if self.cdf_table[i] == mass:
            return float(self.edges[i])
        return self._solve(lambda r: self.cdf(r) - mass, self.edges[i - 1], self.edges[i])

    def inverse_sf(self, mass: float) -> float:
        """ρ with S(ρ) = mass; resolves the far tail without cancellation"""
        if mass <= 0.0:
            if self.is_compact:
                return self.support
            raise IllConditionedInverseError(f"Measure {self.name} has no finite radius with zero tail mass")
        if mass >= self.total_mass:
            return 0.0
        j = int(np.searchsorted(-self.sf_table, -mass, side='left'))
        if j < len(self.edges):
            if self.sf_table[j] == mass:
                return float(self.edges[j])
            return self._solve(lambda r: self.sf(r) - mass, self.edges[j - 1], self.edges[j])

        a = float(self.edges[-1])
        b = 2.0 * a
        for _ in range(ROOT_MAXITER):
            if self.sf(b) <= mass:
                return self._solve(lambda r: self.sf(r) - mass, a, b)
            a, b = b, 2.0 * b
        raise ConvergenceError(f"Tail of {self.name} holds mass {mass:.3e} beyond every bracket")

    def mass_radius(self, mass_cutoff: float) -> float:
        """Radius beyond which exactly mass_cutoff remains"""
        return self.inverse_sf(mass_cutoff)

    def check_invertible(self) -> None:
        """
        Raises:
            IllConditionedInverseError: a cell inside the support carries no mass
        """
        positive = np.nonzero(self.cell_mass > 0.0)[0]
        if positive.size == 0:
            raise IllConditionedInverseError(f"Measure {self.name} carries no mass")
        inside = self.cell_mass[positive[0]:positive[-1] + 1]
        empty = np.nonzero(inside == 0.0)[0]
        if empty.size:
            i = int(positive[0] + empty[0])
            raise IllConditionedInverseError(
                f"Measure {self.name} has a zero-density plateau inside its support "
                f"near ρ ∈ [{self.edges[i]:.6g}, {self.edges[i + 1]:.6g}]",
                details={'rho_lo': float(self.edges[i]), 'rho_hi': float(self.edges[i + 1])})

    def __repr__(self) -> str:
        return f"RadialMeasure({self.name}, support={self.support:g}, scale={self.scale:g})"


def uniform_ball(manifold: RadialManifold, radius: float) -> RadialMeasure:
    """Normalized volume measure of the metric ball B(R)"""
    if not radius > 0.0:
        raise ParameterDomainError(f"Ball radius must be positive, got {radius}")
    return RadialMeasure(manifold, lambda rho: np.where(rho <= radius, 1.0, 0.0),
                         name=f"uniform(B({radius:g}))", support=radius, scale=radius)


def function_measure(manifold: RadialManifold, f: RadialFunction, power: float) -> RadialMeasure:
    """Measure with density |f|^power"""
    profile = np.vectorize(lambda rho: abs(f(float(rho))) ** power, otypes=[float])
    if f.support_radius < math.inf:
        tail = None
    else:
        tail = f.integrand_tail(power, manifold.n)
    return RadialMeasure(manifold, profile, name=f"|{f.name}|^{power:g}", support=f.support_radius,
                         scale=f.scale, tail=tail, breakpoints=f.breakpoints)


def bubble_measure(manifold: RadialManifold, params: SobolevParams, lam: float,
                   k: Optional[float] = None) -> RadialMeasure:
    """Talentian target G_λ = (λ + d^{p'})^{-n}, optionally cut off by P_k"""
    if params.is_endpoint:
        raise ParameterDomainError("Talentian target needs p > 1")
    n, pc = manifold.n, params.p_conj
    scale = lam ** (1.0 / pc)

    if k is None or math.isinf(k):
        return RadialMeasure(manifold, lambda rho: (lam + rho ** pc) ** (-n),
                             name=f"G(lambda={lam:g})", scale=scale,
                             tail=TailClass.algebraic(n * pc - n + 1.0))

    cut = np.vectorize(lambda rho: truncation(k, float(rho)), otypes=[float])
    return RadialMeasure(manifold, lambda rho: cut(rho) * (lam + rho ** pc) ** (-n),
                         name=f"P_{k:g}G(lambda={lam:g})", support=k + 1.0,
                         scale=min(scale, k), breakpoints=(k,))


def polynomial_bump_measure(manifold: RadialManifold, radius: float, exponent: float,
                            perturbation: Sequence[float] = ()) -> RadialMeasure:
    """
    Density (1 - (ρ/R)²)^a (1 + Σ c_j (ρ/R)^{2j}) on B(R)

    Raises:
        ParameterDomainError: the perturbation makes the density negative
    """
    coeffs = [float(c) for c in perturbation]
    if sum(abs(c) for c in coeffs) >= 1.0:
        raise ParameterDomainError(f"Perturbation {coeffs} may make the density negative")

    def density(rho: np.ndarray) -> np.ndarray:
        x = np.clip(rho / radius, 0.0, 1.0)
        factor = 1.0 + sum(c * x ** (2 * (j + 1)) for j, c in enumerate(coeffs))
        return np.where(rho < radius, (1.0 - x * x) ** exponent * factor, 0.0)

    label = f"bump(R={radius:.4g}, a={exponent:.4g}" + (f", c={coeffs}" if coeffs else "") + ")"
    return RadialMeasure(manifold, density, name=label, support=radius, scale=0.5 * radius)
