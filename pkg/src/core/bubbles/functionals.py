"""Talentian, Gaussian and CKN bubble functionals on radial models.

All functionals are evaluated through the layer-cake form
∫ φ(d) dv = -∫₀^∞ φ'(ρ) V(ρ) dρ, with the natural length scale of the
bubble as the quadrature split point.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from scipy import special

from src.core.constants import SobolevParams, volume_unit_ball
from src.core.errors import DivergentIntegralError, ExponentRangeError, ParameterDomainError
from src.core.geometry.manifold import RadialManifold, layer_cake_integral
from src.core.numerics.quadrature import DEFAULT_TOL, IntegralResult, TailClass


@dataclass(frozen=True)
class BubbleQuery:
    """Manifold, exponents and bubble parameters of an H or K evaluation"""
    manifold: RadialManifold
    params: SobolevParams
    lam: float
    s: Optional[float] = None
    r: Optional[float] = None
    t: Optional[float] = None


def truncation(k: float, rho: float) -> float:
    """Cut-off P_k(ρ) = max(0, min(0, k-ρ) + 1): 1 on [0, k], linear to 0 on [k, k+1]"""
    return max(0.0, min(0.0, k - rho) + 1.0)


def truncation_slope(k: float, rho: float) -> float:
    return -1.0 if k < rho < k + 1.0 else 0.0


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0.0 or not math.isfinite(lam):
        raise ParameterDomainError(f"Bubble parameter λ must be positive and finite, got {lam}")
    return lam


def _check_truncation(k: Optional[float]) -> Optional[float]:
    if k is None or math.isinf(k):
        return None
    if not k > 0.0:
        raise ParameterDomainError(f"Truncation level must be positive, got {k}")
    return float(k)


def _require_p_gt_1(params: SobolevParams, what: str) -> float:
    if params.is_endpoint:
        raise ExponentRangeError(f"{what} needs p > 1", details={'p': params.p})
    return params.p_conj


def talenti_H_integral(q: BubbleQuery, k: Optional[float] = None,
                       tol: float = DEFAULT_TOL) -> IntegralResult:
    """
    H(λ, s) = ∫_M (λ + d^{p'})^{-s} dv, optionally truncated by P_k(d)

    Raises:
        DivergentIntegralError: s <= n/p'
        ExponentRangeError: p = 1
    """
    m, params = q.manifold, q.params
    pc = _require_p_gt_1(params, 'Talentian functional')
    lam = _check_lambda(q.lam)
    s = float(q.s)
    n = m.n
    if not s > n / pc:
        raise DivergentIntegralError(f"H(λ, s) diverges for s <= n/p' = {n / pc:g}, got s={s}",
                                     details={'s': s, 'n': n, 'p_conj': pc})
    k = _check_truncation(k)
    scale = lam ** (1.0 / pc)

    if k is None:
        def dphi(rho: float) -> float:
            return -s * pc * rho ** (pc - 1.0) * (lam + rho ** pc) ** (-s - 1.0)

        return layer_cake_integral(m, dphi, tail=TailClass.algebraic(pc * s - n + 1.0),
                                   tol=tol, scale=scale)

    def dphi_truncated(rho: float) -> float:
        base = lam + rho ** pc
        return (truncation_slope(k, rho) * base ** (-s)
                - truncation(k, rho) * s * pc * rho ** (pc - 1.0) * base ** (-s - 1.0))

    return layer_cake_integral(m, dphi_truncated, tail=TailClass.compact(k + 1.0),
                               tol=tol, scale=scale, points=[k])


def talenti_H(q: BubbleQuery, k: Optional[float] = None, tol: float = DEFAULT_TOL) -> float:
    """Value of H(λ, s); see talenti_H_integral"""
    return talenti_H_integral(q, k=k, tol=tol).value


def gaussian_L_integrals(manifold: RadialManifold, params: SobolevParams, lam: float,
                         k: Optional[float] = None,
                         tol: float = DEFAULT_TOL) -> Tuple[IntegralResult, IntegralResult]:
    """L₁ = ∫ e^{-λd^{p'}} dv and L₂ = ∫ e^{-λd^{p'}} d^{p'} dv (L₁ optionally truncated)"""
    pc = _require_p_gt_1(params, 'Gaussian functional')
    lam = _check_lambda(lam)
    k = _check_truncation(k)
    scale = lam ** (-1.0 / pc)

    def dphi_1(rho: float) -> float:
        return -lam * pc * rho ** (pc - 1.0) * math.exp(-lam * rho ** pc)

    def dphi_2(rho: float) -> float:
        x = rho ** pc
        return pc * rho ** (pc - 1.0) * math.exp(-lam * x) * (1.0 - lam * x)

    if k is None:
        l1 = layer_cake_integral(manifold, dphi_1, tail=TailClass.exponential(), tol=tol, scale=scale)
    else:
        def dphi_1_truncated(rho: float) -> float:
            return (truncation_slope(k, rho) * math.exp(-lam * rho ** pc)
                    + truncation(k, rho) * dphi_1(rho))

        l1 = layer_cake_integral(manifold, dphi_1_truncated, tail=TailClass.compact(k + 1.0),
                                 tol=tol, scale=scale, points=[k])
    l2 = layer_cake_integral(manifold, dphi_2, tail=TailClass.exponential(), tol=tol, scale=scale)
    return l1, l2


def gaussian_L(manifold: RadialManifold, params: SobolevParams, lam: float,
               k: Optional[float] = None, tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """(L₁, L₂) at λ; see gaussian_L_integrals"""
    l1, l2 = gaussian_L_integrals(manifold, params, lam, k=k, tol=tol)
    return l1.value, l2.value


def check_K_hypothesis(n: int, r: float, t: float, s: float) -> None:
    if not (t > 0.0 and n + r > 0.0 and s * t > n + r):
        raise DivergentIntegralError(
            f"K(λ, r, t, s) needs t > 0 and s·t > n + r > 0, got r={r}, t={t}, s={s}, n={n}",
            details={'n': n, 'r': r, 't': t, 's': s})


def ckn_K_integral(manifold: RadialManifold, lam: float, r: float, t: float, s: float,
                   tol: float = DEFAULT_TOL) -> IntegralResult:
    """K(λ, r, t, s) = ∫_M d^r (λ + d^t)^{-s} dv"""
    lam = _check_lambda(lam)
    r, t, s = float(r), float(t), float(s)
    n = manifold.n
    check_K_hypothesis(n, r, t, s)

    def dphi(rho: float) -> float:
        base = lam + rho ** t
        value = -s * t * rho ** (r + t - 1.0) * base ** (-s - 1.0)
        if r != 0.0:
            value += r * rho ** (r - 1.0) * base ** (-s)
        return value

    # -φ'V behaves like ρ^{n+r-1} at the origin
    singularity = max(0.0, 1.0 - (n + r))
    return layer_cake_integral(manifold, dphi, tail=TailClass.algebraic(s * t - n - r + 1.0),
                               tol=tol, scale=lam ** (1.0 / t), singularity=singularity)


def ckn_K(manifold: RadialManifold, lam: float, r: float, t: float, s: float,
          tol: float = DEFAULT_TOL) -> float:
    return ckn_K_integral(manifold, lam, r, t, s, tol=tol).value


def g_moment_identity(manifold: RadialManifold, params: SobolevParams, lam: float,
                      tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """(∫ G_λ d^{p'} dv computed directly, H(λ, n-1) - λH(λ, n)) with G_λ = (λ + d^{p'})^{-n}"""
    pc = _require_p_gt_1(params, 'Moment identity')
    n = manifold.n
    direct = ckn_K(manifold, lam, pc, pc, n, tol=tol)
    h_n = talenti_H(BubbleQuery(manifold, params, lam, s=n), tol=tol)
    h_n1 = talenti_H(BubbleQuery(manifold, params, lam, s=n - 1), tol=tol)
    return direct, h_n1 - lam * h_n


# Closed forms (exact on euclidean(n); limits with the AVR factor on any model)

def K_limit_constant(n: int, avr: float, r: float, t: float, s: float) -> float:
    """lim_{λ→∞} λ^{s-(n+r)/t} K = (n/t) ω_n AVR Γ((n+r)/t) Γ(s-(n+r)/t) / Γ(s)"""
    check_K_hypothesis(n, r, t, s)
    m = (n + r) / t
    log_value = (math.log(n / t) + math.log(volume_unit_ball(n) * avr)
                 + special.gammaln(m) + special.gammaln(s - m) - special.gammaln(s))
    return math.exp(log_value)


def H_limit_constant(n: int, avr: float, p_conj: float, s: float) -> float:
    """lim_{λ→∞} λ^{s-n/p'} H(λ, s) = ω_n AVR Γ(n/p'+1) Γ(s-n/p') / Γ(s)"""
    return K_limit_constant(n, avr, 0.0, p_conj, s)


def L1_limit_constant(n: int, avr: float, p_conj: float) -> float:
    """lim_{λ→0} λ^{n/p'} L₁ = ω_n AVR Γ(n/p'+1)"""
    return volume_unit_ball(n) * avr * math.exp(special.gammaln(n / p_conj + 1.0))


def L2_limit_constant(n: int, avr: float, p_conj: float) -> float:
    """lim_{λ→0} λ^{n/p'+1} L₂ = ω_n AVR (n/p') Γ(n/p'+1)"""
    return (n / p_conj) * L1_limit_constant(n, avr, p_conj)


def euclidean_H(n: int, p_conj: float, lam: float, s: float) -> float:
    return lam ** (n / p_conj - s) * H_limit_constant(n, 1.0, p_conj, s)


def euclidean_K(n: int, lam: float, r: float, t: float, s: float) -> float:
    return lam ** ((n + r) / t - s) * K_limit_constant(n, 1.0, r, t, s)


def euclidean_L(n: int, p_conj: float, lam: float) -> Tuple[float, float]:
    return (lam ** (-n / p_conj) * L1_limit_constant(n, 1.0, p_conj),
            lam ** (-n / p_conj - 1.0) * L2_limit_constant(n, 1.0, p_conj))
