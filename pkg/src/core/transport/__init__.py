from .checks import determinant_trace_check, monge_ampere_residual
from .measures import RadialMeasure
from .pipelines import proof_pipeline_p_eq_1, proof_pipeline_p_gt_1
from .solver import TransportInstance, solve_radial_transport

__all__ = [
    'RadialMeasure',
    'TransportInstance',
    'determinant_trace_check',
    'monge_ampere_residual',
    'proof_pipeline_p_eq_1',
    'proof_pipeline_p_gt_1',
    'solve_radial_transport',
]
