"""Averaged self-distance of probability measures on unit balls of normed spaces."""

from .bounds import (
    BoundReport,
    Ratio,
    Theorem,
    ThetaVariant,
    best_bound,
    bound_dim2,
    bound_highdim,
    covering_bound_generic,
    f_of_n,
    fixed_point_bound,
    optimal_r,
    theta_n,
)
from .covering import (
    Covering,
    Homothet,
    certified_bound,
    cube_cover,
    partition_masses,
    verify_cover,
)
from .delta import DeltaEstimate, delta_discrete, delta_monte_carlo
from .errors import (
    CertificateInvalidError,
    DomainError,
    InputError,
    SamplerInfeasibleError,
    SelfDistError,
)
from .measures import DiscreteMeasure, SamplerSpec, sample_ball, uniform_vertex_measure
from .norms import NormSpec, distance_matrix, in_unit_ball, norm_eval
from .optimize import OptimizationResult, brute_force_weights, maximize_weights, perturb_atoms

__version__ = "0.1.0"
