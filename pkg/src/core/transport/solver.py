"""Radial monotone rearrangement between two radial probability measures.

The map T solves F_src(ρ) = F_tgt(T(ρ)). Its derivative is taken with
five-point differences in x = log ρ, so the stencils stay well-scaled on
the logarithmic grid, and u' = ρ - T(ρ) is the radial derivative of the
transport potential.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from src.core.errors import ParameterDomainError, PreconditionError
from src.core.geometry.manifold import RadialManifold
from src.core.transport.measures import RadialMeasure
from src.utils.logger import setup_logger

DEFAULT_NODES = 4096
INNER_RATIO = 1e-4
MASS_CUTOFF = 1e-13
WEIGHT_FLOOR = 1e-12
MEDIAN_SPLIT = 0.5
STENCIL_WIDTH = 5

logger = setup_logger('TransportSolver')


@dataclass
class TransportInstance:
    """Transport map and potential derived quantities on a logarithmic ρ-grid"""
    manifold: RadialManifold
    source: RadialMeasure
    target: RadialMeasure
    rho: np.ndarray
    T: np.ndarray
    T_prime: np.ndarray
    u_prime: np.ndarray
    u_second: np.ndarray
    jacobian: np.ndarray
    laplacian: np.ndarray
    resolved: np.ndarray

    @property
    def nodes(self) -> int:
        return int(self.rho.size)

    @property
    def support_radius(self) -> float:
        """K₀, the radius of the source support"""
        return self.source.support

    @property
    def slack(self) -> np.ndarray:
        """(1 - Δu/n) - J^{1/n} at every node"""
        n = self.manifold.n
        with np.errstate(invalid='ignore'):
            return (1.0 - self.laplacian / n) - np.power(self.jacobian, 1.0 / n)

    def transport(self, rho: float) -> float:
        """T at an arbitrary radius of the source support"""
        return transport_point(self.source, self.target, rho)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'rho': self.rho,
            'T': self.T,
            'u_prime': self.u_prime,
            'J': self.jacobian,
            'laplacian': self.laplacian,
            'slack': self.slack,
            'resolved': self.resolved,
        })


def transport_point(source: RadialMeasure, target: RadialMeasure, rho: float) -> float:
    """
    T(ρ) from cumulative-mass matching

    Below the median the left masses are matched, above it the right
    masses, so both ends keep full relative precision.
    """
    mass = source.cdf(rho)
    if mass <= MEDIAN_SPLIT:
        return target.inverse_cdf(mass)
    return target.inverse_sf(source.sf(rho))


def transport_grid(source: RadialMeasure, target: RadialMeasure, nodes: int = DEFAULT_NODES,
                   mass_cutoff: float = MASS_CUTOFF) -> np.ndarray:
    """Log-uniform grid over the source support, stopped where the source tail mass hits the cutoff
    when the target has unbounded support"""
    if nodes < 8:
        raise ParameterDomainError(f"Transport grid needs at least 8 nodes, got {nodes}")
    radius = source.support
    hi = radius if target.is_compact else min(radius, source.mass_radius(mass_cutoff))
    return np.geomspace(radius * INNER_RATIO, hi, nodes)


def _five_point(v: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
    d[-1] = (25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3] - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * h)
    d[-2] = (3.0 * v[-1] + 10.0 * v[-2] - 18.0 * v[-3] + 6.0 * v[-4] - v[-5]) / (12.0 * h)
    return d


def log_grid_derivative(values: np.ndarray, x: np.ndarray, splits: Sequence[int] = ()) -> np.ndarray:
    """
    d/dx on a uniform grid: five-point central stencil, one-sided five-point
    stencils at the ends and on both sides of every split index

    A split at i separates the pieces [.., i) and [i, ..); splits leaving a
    piece shorter than STENCIL_WIDTH nodes are ignored.
    """
    h = float(x[1] - x[0])
    if not np.allclose(np.diff(x), h, rtol=1e-8, atol=0.0):
        raise ParameterDomainError("Derivative stencils need a uniform grid in log ρ")
    v = np.asarray(values, dtype=float)
    if v.size < STENCIL_WIDTH:
        raise ParameterDomainError(f"Derivative stencils need at least {STENCIL_WIDTH} nodes")
    bounds = [0]
    for i in sorted({int(s) for s in splits}):
        if i - bounds[-1] >= STENCIL_WIDTH and v.size - i >= STENCIL_WIDTH:
            bounds.append(i)
    bounds.append(v.size)

    d = np.empty_like(v)
    for lo, hi in zip(bounds, bounds[1:]):
        d[lo:hi] = _five_point(v[lo:hi], h)
    return d


def kink_splits(rho: np.ndarray, T: np.ndarray, source: RadialMeasure, target: RadialMeasure) -> List[int]:
    """Grid indices where T'' may jump: source breakpoints and preimages of target breakpoints"""
    splits = [int(np.searchsorted(rho, b, side='right')) for b in source.breakpoints]
    splits += [int(np.searchsorted(T, b, side='right')) for b in target.breakpoints]
    return sorted(i for i in set(splits) if 0 < i < rho.size)


def solve_radial_transport(manifold: RadialManifold, source: RadialMeasure, target: RadialMeasure,
                           grid: Optional[Sequence[float]] = None, nodes: int = DEFAULT_NODES,
                           weight_floor: float = WEIGHT_FLOOR) -> TransportInstance:
    """
    Monotone rearrangement of source onto target

    Args:
        manifold: Model both measures live on
        source: Compactly supported probability measure
        target: Probability measure without zero-density plateaus
        grid: Log-uniform radii; built from the source support when omitted
        nodes: Grid size when the grid is built here
        weight_floor: Nodes where the source density falls below this fraction
            of its maximum are marked unresolved

    Raises:
        PreconditionError: source without compact support, or measures on another manifold
        IllConditionedInverseError: target with an empty cell inside its support
    """
    if not source.is_compact:
        raise PreconditionError(f"Source {source.name} must be compactly supported")
    if source.manifold is not manifold or target.manifold is not manifold:
        raise PreconditionError("Source and target must live on the manifold being solved on")
    target.check_invertible()

    rho = transport_grid(source, target, nodes) if grid is None else np.asarray(grid, dtype=float)
    if np.any(rho <= 0.0) or np.any(np.diff(rho) <= 0.0):
        raise ParameterDomainError("Transport grid must be positive and strictly increasing")
    logger.info(f"""
    === Transport solve START ===
    Manifold: {manifold.label}
    Source: {source.name}
    Target: {target.name}
    Nodes: {rho.size}, ρ ∈ [{rho[0]:.6g}, {rho[-1]:.6g}]
    """)

    T = np.array([transport_point(source, target, float(r)) for r in rho])
    x = np.log(rho)
    T_prime = log_grid_derivative(T, x, kink_splits(rho, T, source, target)) / rho
    u_prime = rho - T
    u_second = 1.0 - T_prime

    with np.errstate(divide='ignore', invalid='ignore'):
        jacobian = T_prime * np.asarray(manifold.area(T), dtype=float) / np.asarray(manifold.area(rho), dtype=float)
    laplacian = u_second + np.asarray(manifold.log_area_derivative(rho), dtype=float) * u_prime

    density = np.asarray(source.density(rho), dtype=float)
    resolved = density >= weight_floor * float(density.max())

    instance = TransportInstance(manifold=manifold, source=source, target=target, rho=rho, T=T,
                                 T_prime=T_prime, u_prime=u_prime, u_second=u_second,
                                 jacobian=jacobian, laplacian=laplacian, resolved=resolved)
    if np.any(np.diff(T) < 0.0):
        logger.warning(f"Transport map of {source.name} -> {target.name} is not monotone on the grid")
    logger.info(f"""
    === Transport solve END ===
    T range: [{T[0]:.6g}, {T[-1]:.6g}]
    Resolved nodes: {int(resolved.sum())}/{rho.size}
    """)
    return instance


def map_deviation(inst: TransportInstance, expected) -> float:
    """Largest relative deviation of T from an expected map on the resolved nodes"""
    rho = inst.rho[inst.resolved]
    reference = np.asarray([expected(float(r)) for r in rho])
    return float(np.max(np.abs(inst.T[inst.resolved] - reference) / np.maximum(reference, math.ulp(1.0))))
