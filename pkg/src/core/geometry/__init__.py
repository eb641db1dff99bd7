from .manifold import (RadialManifold, cone, construct_manifold, euclidean, from_table,
                       parse_manifold_spec, validate_bishop_gromov)
from .profile_table import VolumeProfileTable, load_profile_table, sample_profile

__all__ = [
    'RadialManifold',
    'VolumeProfileTable',
    'cone',
    'construct_manifold',
    'euclidean',
    'from_table',
    'load_profile_table',
    'parse_manifold_spec',
    'sample_profile',
    'validate_bishop_gromov',
]
