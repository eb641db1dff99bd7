"""Closed-form sharp constants and exponent arithmetic.

Gamma values come from ``scipy.special.gammaln`` (Cephes), whose relative
error is far below the 1e-13 floor the numerical checks rely on.
"""
import math
from dataclasses import dataclass
from typing import Optional

from scipy import special

from src.core.errors import ExponentRangeError, InvalidDimensionError, ParameterDomainError


@dataclass(frozen=True)
class SobolevParams:
    """Dimension and exponent with derived conjugate and critical exponent.

    ``p_conj`` is ``math.inf`` when p = 1. ``p_star`` is None when p >= n
    (only log-Sobolev operations accept such pairs).
    """
    n: int
    p: float
    p_conj: float
    p_star: Optional[float]

    @property
    def is_endpoint(self) -> bool:
        return self.p == 1.0

    def as_dict(self) -> dict:
        return {
            'n': self.n,
            'p': self.p,
            'p_conj': None if math.isinf(self.p_conj) else self.p_conj,
            'p_star': self.p_star,
        }


@dataclass(frozen=True)
class CknParams:
    """Admissible Caffarelli-Kohn-Nirenberg pair (a, b) with exponent q and sharp constant"""
    n: int
    a: float
    b: float
    q: float
    k_ab: float

    @property
    def weight_gap(self) -> float:
        """a + 1 - b, the exponent that governs the volume scaling"""
        return self.a + 1.0 - self.b

    @property
    def profile_exponent(self) -> float:
        """t = 2 - bq + 2a, the power of d in the extremal profile"""
        return 2.0 - self.b * self.q + 2.0 * self.a

    def as_dict(self) -> dict:
        return {'n': self.n, 'a': self.a, 'b': self.b, 'q': self.q, 'k_ab': self.k_ab}


def _check_dimension(n, minimum: int = 1) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise InvalidDimensionError(f"Dimension must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise InvalidDimensionError(f"Dimension must be >= {minimum}, got {n}",
                                    details={'n': n})
    return n


def _conjugate(p: float) -> float:
    return math.inf if p == 1.0 else p / (p - 1.0)


def volume_unit_ball(n: int) -> float:
    """Volume ω_n = π^{n/2}/Γ(n/2+1) of the unit ball in R^n"""
    n = _check_dimension(n, 1)
    return math.exp(0.5 * n * math.log(math.pi) - special.gammaln(0.5 * n + 1.0))


def sobolev_exponents(n: int, p: float) -> SobolevParams:
    """
    Exponent bookkeeping for the Sobolev inequality

    Args:
        n: Dimension, n >= 2
        p: Exponent with 1 <= p < n

    Returns:
        SobolevParams with p' and p★ = pn/(n-p)
    """
    n = _check_dimension(n, 2)
    p = float(p)
    if not math.isfinite(p) or p < 1.0:
        raise ExponentRangeError(f"Sobolev exponent must satisfy p >= 1, got {p}",
                                 details={'n': n, 'p': p})
    if p >= n:
        raise ExponentRangeError(f"Sobolev exponent must satisfy p < n, got p={p}, n={n}",
                                 details={'n': n, 'p': p})
    return SobolevParams(n=n, p=p, p_conj=_conjugate(p), p_star=p * n / (n - p))


def log_sobolev_exponents(n: int, p: float) -> SobolevParams:
    """Exponent bookkeeping for the log-Sobolev inequality (any p >= 1)"""
    n = _check_dimension(n, 2)
    p = float(p)
    if not math.isfinite(p) or p < 1.0:
        raise ExponentRangeError(f"Log-Sobolev exponent must satisfy p >= 1, got {p}",
                                 details={'n': n, 'p': p})
    p_star = p * n / (n - p) if p < n else None
    return SobolevParams(n=n, p=p, p_conj=_conjugate(p), p_star=p_star)


def aubin_talenti(n: int, p: float) -> float:
    """
    Sharp Euclidean Sobolev constant AT(n, p)

    Args:
        n: Dimension, n >= 2
        p: Exponent with 1 <= p < n; p = 1 is the isoperimetric endpoint

    Returns:
        AT(n, p) > 0
    """
    params = sobolev_exponents(n, p)
    n, p = params.n, params.p
    if params.is_endpoint:
        return 1.0 / (n * volume_unit_ball(n) ** (1.0 / n))

    p_conj = params.p_conj
    log_gamma_ratio = (special.gammaln(1.0 + 0.5 * n) + special.gammaln(n)
                       - special.gammaln(n / p) - special.gammaln(1.0 + n / p_conj))
    log_value = (-0.5 * math.log(math.pi)
                 - math.log(n) / p
                 + math.log((p - 1.0) / (n - p)) / p_conj
                 + log_gamma_ratio / n)
    return math.exp(log_value)


def log_sobolev_constant(n: int, p: float) -> float:
    """Sharp Euclidean L^p log-Sobolev constant L(n, p); L(n, 1) = AT(n, 1)"""
    params = log_sobolev_exponents(n, p)
    n, p = params.n, params.p
    omega = volume_unit_ball(n)
    if params.is_endpoint:
        return 1.0 / (n * omega ** (1.0 / n))

    # ((p-1)/e)^{p-1} written in log form
    log_value = (math.log(p / n)
                 + (p - 1.0) * (math.log(p - 1.0) - 1.0)
                 - (p / n) * (math.log(omega) + special.gammaln(n / params.p_conj + 1.0)))
    return math.exp(log_value)


def check_ckn_admissible(n: int, a: float, b: float) -> None:
    """Raise ParameterDomainError unless 0 <= a < (n-2)/2 and a <= b < a+1"""
    if not (0.0 <= a < 0.5 * (n - 2)):
        raise ParameterDomainError(f"CKN parameter a must satisfy 0 <= a < (n-2)/2, got a={a}, n={n}",
                                   details={'n': n, 'a': a, 'b': b})
    if not (a <= b < a + 1.0):
        raise ParameterDomainError(f"CKN parameter b must satisfy a <= b < a+1, got a={a}, b={b}",
                                   details={'n': n, 'a': a, 'b': b})


def ckn_constants(n: int, a: float, b: float) -> CknParams:
    """
    Exponent q and sharp constant K_{a,b} of the Caffarelli-Kohn-Nirenberg inequality

    Args:
        n: Dimension, n >= 3
        a, b: Weights with 0 <= a < (n-2)/2 and a <= b < a+1

    Returns:
        CknParams; K_{0,0} coincides with AT(n, 2)
    """
    n = _check_dimension(n, 3)
    a, b = float(a), float(b)
    check_ckn_admissible(n, a, b)

    q = 2.0 * n / (n - 2.0 + 2.0 * (b - a))
    gap = a + 1.0 - b
    omega = volume_unit_ball(n)

    log_inner = (math.log((2.0 - b * q + 2.0 * a) / (n * omega))
                 + special.gammaln(n / gap)
                 - 2.0 * special.gammaln(n / (2.0 * gap)))
    log_k = -0.5 * math.log((n - 2.0 * a - 2.0) * (n - b * q)) + (gap / n) * log_inner
    return CknParams(n=n, a=a, b=b, q=q, k_ab=math.exp(log_k))
