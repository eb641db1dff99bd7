from src.core.constants import SobolevParams, aubin_talenti
from src.core.errors import AdmissibilityError
from src.core.geometry.manifold import RadialManifold
from src.core.inequalities.functions import RadialFunction
from src.core.inequalities.quotient import QUOTIENT_TOL, QuotientReport
from src.core.numerics.quadrature import DEFAULT_TOL
from src.utils.logger import setup_logger

logger = setup_logger('SobolevQuotient')


def sobolev_quotient(manifold: RadialManifold, params: SobolevParams, f: RadialFunction,
                     tol: float = DEFAULT_TOL, slack_tol: float = QUOTIENT_TOL) -> QuotientReport:
    """
    Sobolev quotient ‖f‖_{p★} / ‖∇f‖_p against AT(n, p) AVR^{-1/n}

    Args:
        manifold: Radial model
        params: Exponents with 1 <= p < n
        f: Radial test function with finite norms
        tol: Quadrature tolerance
        slack_tol: Accepted negative slack

    Returns:
        QuotientReport with lhs = ‖f‖_{p★}, rhs = ‖∇f‖_p
    """
    n, p, p_star = params.n, params.p, params.p_star
    mass = f.norm_power(manifold, p_star, tol=tol)
    energy = f.gradient_power(manifold, p, tol=tol)
    if not energy.value > 0.0:
        raise AdmissibilityError(f"{f.name} has vanishing gradient norm")

    lhs = mass.value ** (1.0 / p_star)
    rhs = energy.value ** (1.0 / p)
    ratio = lhs / rhs
    sharp = aubin_talenti(n, p) * manifold.avr ** (-1.0 / n)

    report = QuotientReport(inequality='sobolev', manifold=manifold.label, function=f.name,
                            lhs=lhs, rhs=rhs, ratio=ratio, sharp_bound=sharp,
                            slack=sharp - ratio, tolerance=slack_tol,
                            diagnostic=manifold.is_diagnostic,
                            details={'p': p, 'p_star': p_star,
                                     'integral_error': mass.relative_error + energy.relative_error})
    logger.debug(f"Sobolev quotient of {f.name} on {manifold.label}: ratio={ratio:.15g}, "
                 f"sharp={sharp:.15g}, slack={report.slack:.3e}")
    return report
