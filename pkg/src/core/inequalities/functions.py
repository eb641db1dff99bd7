"""Radial test functions f(x) = φ(d(pole, x)).

By the eikonal identity |∇d| = 1 the gradient norm of f is |φ'(ρ)|, so
every norm in the inequalities is a one-dimensional integral against A(ρ).
"""
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

from src.core.constants import CknParams, SobolevParams
from src.core.errors import AdmissibilityError, ParameterDomainError, PreconditionError
from src.core.geometry.manifold import RadialManifold, radial_integral
from src.core.numerics.quadrature import DEFAULT_TOL, IntegralResult, TailClass

COMPACT = 'compact'
ALGEBRAIC = 'algebraic'
EXPONENTIAL = 'exponential'
GROWING = 'growing'


@dataclass(frozen=True)
class Decay:
    """Support or decay of a radial profile: compact radius R, |φ| ~ ρ^{-α}, or exponential"""
    kind: str
    radius: Optional[float] = None
    exponent: Optional[float] = None

    @classmethod
    def compact(cls, radius: float) -> 'Decay':
        return cls(kind=COMPACT, radius=float(radius))

    @classmethod
    def algebraic(cls, exponent: float) -> 'Decay':
        return cls(kind=ALGEBRAIC, exponent=float(exponent))

    @classmethod
    def exponential(cls) -> 'Decay':
        return cls(kind=EXPONENTIAL)

    @classmethod
    def growing(cls) -> 'Decay':
        return cls(kind=GROWING)

    @property
    def support_radius(self) -> float:
        return self.radius if self.kind == COMPACT else math.inf

    def describe(self) -> str:
        if self.kind == COMPACT:
            return f"compact({self.radius:g})"
        if self.kind == ALGEBRAIC:
            return f"algebraic({self.exponent:g})"
        return self.kind


@dataclass(frozen=True)
class RadialFunction:
    """Radial profile φ with derivative φ', decay descriptor and characteristic radius"""
    name: str
    profile: Callable[[float], float]
    derivative: Callable[[float], float]
    decay: Decay
    scale: float = 1.0
    breakpoints: Tuple[float, ...] = field(default_factory=tuple)
    factor: float = 1.0

    def __call__(self, rho: float) -> float:
        return self.factor * self.profile(rho)

    def grad(self, rho: float) -> float:
        return self.factor * self.derivative(rho)

    def scaled(self, factor: float) -> 'RadialFunction':
        return replace(self, factor=self.factor * factor)

    @property
    def support_radius(self) -> float:
        return self.decay.support_radius

    def integrand_tail(self, power: float, n: int, derivative: bool = False,
                       weight: float = 0.0) -> TailClass:
        """
        Tail class of |φ|^power ρ^weight A(ρ) (or of |φ'|^power ρ^weight A(ρ))

        Raises:
            AdmissibilityError: the integral diverges at infinity
        """
        if self.decay.kind == COMPACT:
            return TailClass.compact(self.decay.radius)
        if self.decay.kind == EXPONENTIAL:
            return TailClass.exponential()
        if self.decay.kind == GROWING:
            raise AdmissibilityError(f"{self.name} does not decay; its norms diverge")
        alpha = self.decay.exponent + (1.0 if derivative else 0.0)
        exponent = power * alpha - (n - 1.0) - weight
        if not exponent > 1.0:
            raise AdmissibilityError(
                f"Norm of {self.name} diverges: integrand decays like ρ^(-{exponent:g})",
                details={'power': power, 'decay': self.decay.describe()})
        return TailClass.algebraic(exponent)

    def norm_power(self, manifold: RadialManifold, power: float,
                   tol: float = DEFAULT_TOL) -> IntegralResult:
        """∫ |f|^power dv"""
        tail = self.integrand_tail(power, manifold.n)
        return radial_integral(manifold, lambda rho: abs(self(rho)) ** power, tail=tail, tol=tol,
                               scale=self.scale, points=self.breakpoints)

    def gradient_power(self, manifold: RadialManifold, power: float,
                       tol: float = DEFAULT_TOL) -> IntegralResult:
        """∫ |∇f|^power dv = ∫ |φ'(ρ)|^power A(ρ) dρ"""
        tail = self.integrand_tail(power, manifold.n, derivative=True)
        return radial_integral(manifold, lambda rho: abs(self.grad(rho)) ** power, tail=tail,
                               tol=tol, scale=self.scale, points=self.breakpoints)


def normalize(f: RadialFunction, manifold: RadialManifold, exponent: float,
              tol: float = DEFAULT_TOL) -> RadialFunction:
    """f/‖f‖_exponent, so that ∫|f|^exponent dv = 1"""
    mass = f.norm_power(manifold, exponent, tol=tol).value
    if not mass > 0.0 or not math.isfinite(mass):
        raise AdmissibilityError(f"Cannot normalize {f.name}: ∫|f|^{exponent:g} = {mass}")
    return f.scaled(mass ** (-1.0 / exponent))


def require_normalized(f: RadialFunction, manifold: RadialManifold, exponent: float,
                       auto_renormalize: bool, norm_tol: float,
                       tol: float = DEFAULT_TOL) -> RadialFunction:
    """Return f if ∫|f|^exponent = 1 within norm_tol, else renormalize or raise PreconditionError"""
    mass = f.norm_power(manifold, exponent, tol=tol).value
    if abs(mass - 1.0) <= norm_tol:
        return f
    if not auto_renormalize:
        raise PreconditionError(f"{f.name} is not normalized: ∫|f|^{exponent:g} dv = {mass:.12g}",
                                details={'mass': mass, 'tolerance': norm_tol})
    return f.scaled(mass ** (-1.0 / exponent))


def talenti_bubble(params: SobolevParams, lam: float) -> RadialFunction:
    """(λ + ρ^{p'})^{(p-n)/p}, extremal for the Euclidean Sobolev inequality"""
    if params.is_endpoint or params.p_star is None:
        raise ParameterDomainError("Talentian bubble needs 1 < p < n")
    if not lam > 0.0:
        raise ParameterDomainError(f"Bubble parameter must be positive, got {lam}")
    n, p, pc = params.n, params.p, params.p_conj
    power = (p - n) / p

    def profile(rho: float) -> float:
        return (lam + rho ** pc) ** power

    def derivative(rho: float) -> float:
        return power * pc * rho ** (pc - 1.0) * (lam + rho ** pc) ** (power - 1.0)

    return RadialFunction(name=f"talenti_bubble(lambda={lam:g})", profile=profile,
                          derivative=derivative, decay=Decay.algebraic(pc * (n - p) / p),
                          scale=lam ** (1.0 / pc))


def gaussian_bubble(params: SobolevParams, lam: float) -> RadialFunction:
    """e^{-(λ/p) ρ^{p'}}, whose p-th power is the Gaussian bubble e^{-λρ^{p'}}"""
    if params.is_endpoint:
        raise ParameterDomainError("Gaussian bubble needs p > 1")
    if not lam > 0.0:
        raise ParameterDomainError(f"Bubble parameter must be positive, got {lam}")
    p, pc = params.p, params.p_conj

    def profile(rho: float) -> float:
        return math.exp(-(lam / p) * rho ** pc)

    def derivative(rho: float) -> float:
        return -(lam / p) * pc * rho ** (pc - 1.0) * math.exp(-(lam / p) * rho ** pc)

    return RadialFunction(name=f"gaussian_bubble(lambda={lam:g})", profile=profile,
                          derivative=derivative, decay=Decay.exponential(),
                          scale=lam ** (-1.0 / pc))


def ckn_bubble(ckn: CknParams, lam: float) -> RadialFunction:
    """(λ + ρ^{2-bq+2a})^{-(n-2a-2)/(2-bq+2a)}, extremal for the weighted inequality"""
    if not lam > 0.0:
        raise ParameterDomainError(f"Bubble parameter must be positive, got {lam}")
    t = ckn.profile_exponent
    power = -(ckn.n - 2.0 * ckn.a - 2.0) / t

    def profile(rho: float) -> float:
        return (lam + rho ** t) ** power

    def derivative(rho: float) -> float:
        return power * t * rho ** (t - 1.0) * (lam + rho ** t) ** (power - 1.0)

    return RadialFunction(name=f"ckn_bubble(lambda={lam:g})", profile=profile,
                          derivative=derivative,
                          decay=Decay.algebraic(ckn.n - 2.0 * ckn.a - 2.0),
                          scale=lam ** (1.0 / t))


def smooth_bump(radius: float = 1.0, order: int = 3) -> RadialFunction:
    """(1 - (ρ/R)²)^m on [0, R], zero beyond"""
    if not radius > 0.0 or order < 1:
        raise ParameterDomainError(f"Bump needs R > 0 and order >= 1, got R={radius}, m={order}")
    r2 = radius * radius

    def profile(rho: float) -> float:
        return (1.0 - rho * rho / r2) ** order if rho < radius else 0.0

    def derivative(rho: float) -> float:
        if rho >= radius:
            return 0.0
        return -order * (2.0 * rho / r2) * (1.0 - rho * rho / r2) ** (order - 1)

    return RadialFunction(name=f"smooth_bump(R={radius:g}, m={order})", profile=profile,
                          derivative=derivative, decay=Decay.compact(radius),
                          scale=0.5 * radius)


def mollified_ball_indicator(radius: float = 1.0, width: float = 0.1) -> RadialFunction:
    """1 on [0, R-ε], quintic smoothstep down to 0 on [R-ε, R]"""
    if not 0.0 < width < radius:
        raise ParameterDomainError(f"Mollifier width must lie in (0, R), got {width}")
    inner = radius - width

    def profile(rho: float) -> float:
        if rho <= inner:
            return 1.0
        if rho >= radius:
            return 0.0
        x = (rho - inner) / width
        return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)

    def derivative(rho: float) -> float:
        if rho <= inner or rho >= radius:
            return 0.0
        x = (rho - inner) / width
        return -30.0 * x * x * (1.0 - x) * (1.0 - x) / width

    return RadialFunction(name=f"mollified_ball(R={radius:g}, eps={width:g})", profile=profile,
                          derivative=derivative, decay=Decay.compact(radius),
                          scale=inner, breakpoints=(inner,))


def gaussian_profile(c: float) -> RadialFunction:
    """e^{-cρ²}; c <= 0 gives a non-decaying profile for weighted (Gaussian-measure) norms"""

    def profile(rho: float) -> float:
        return math.exp(-c * rho * rho)

    def derivative(rho: float) -> float:
        return -2.0 * c * rho * math.exp(-c * rho * rho)

    decay = Decay.exponential() if c > 0.0 else Decay.growing()
    scale = 1.0 / math.sqrt(c) if c > 0.0 else 1.0
    return RadialFunction(name=f"gaussian_profile(c={c:g})", profile=profile,
                          derivative=derivative, decay=decay, scale=scale)


def dilate(f: RadialFunction, c: float) -> RadialFunction:
    """ρ ↦ φ(cρ)"""
    if not c > 0.0:
        raise ParameterDomainError(f"Dilation factor must be positive, got {c}")
    profile, derivative = f.profile, f.derivative
    decay = f.decay
    if decay.kind == COMPACT:
        decay = Decay.compact(decay.radius / c)
    return replace(f, name=f"{f.name}∘{c:g}", profile=lambda rho: profile(c * rho),
                   derivative=lambda rho: c * derivative(c * rho), decay=decay,
                   scale=f.scale / c, breakpoints=tuple(b / c for b in f.breakpoints))
