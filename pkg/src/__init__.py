"""
idemetric

The idempotent (max-plus) analogue of the Kantorovich metric on finitely
supported idempotent probability measures:
- Max-plus scalar arithmetic and Maslov dequantization
- Finite metric spaces and idempotent measures with Maslov integration
- Couplings, an exact distance solver and an exhaustive oracle
- Convergence diagnostics for measure sequences
"""

from .config import Config
from .logger import logger
from .errors import (IdemetricError, ParseError, UnknownPointError, SupportLimitError,
                     MetricValidationError, NormalizationError, SpaceMismatchError,
                     OracleMismatchError, MarginalError, InvalidArgumentError)
from .semiring import MaxPlusScalar, BOTTOM, ONE, oplus, odot, precedes, oplus_h
from .space import GroundSpace, ValidationReport, distance, validate_metric, diam
from .measure import (IdempotentMeasure, TestFunction, make_measure, dirac, integrate, pushforward,
                      support, support_size, check_axioms)
from .coupling import (Coupling, check_marginals, xi0, random_member, compose,
                       enumerate_feasible_supports)
from .metric import (DistanceReport, cost_matrix, h_distance, h_bruteforce, rho_omega,
                     verified_distance, optimal_coupling, rho_i_estimate, gram)
from .convergence import (MeasureSequence, star_condition, in_neighborhood, converges_metric,
                          converges_pointwise, diagnose)
from .exporters import ResultExporter

__version__ = "1.0.0"

__all__ = [
    'Config',
    'logger',
    'IdemetricError', 'ParseError', 'UnknownPointError', 'SupportLimitError',
    'MetricValidationError', 'NormalizationError', 'SpaceMismatchError',
    'OracleMismatchError', 'MarginalError', 'InvalidArgumentError',
    'MaxPlusScalar', 'BOTTOM', 'ONE', 'oplus', 'odot', 'precedes', 'oplus_h',
    'GroundSpace', 'ValidationReport', 'distance', 'validate_metric', 'diam',
    'IdempotentMeasure', 'TestFunction', 'make_measure', 'dirac', 'integrate', 'pushforward',
    'support', 'support_size', 'check_axioms',
    'Coupling', 'check_marginals', 'xi0', 'random_member', 'compose', 'enumerate_feasible_supports',
    'DistanceReport', 'cost_matrix', 'h_distance', 'h_bruteforce', 'rho_omega', 'verified_distance',
    'optimal_coupling', 'rho_i_estimate', 'gram',
    'MeasureSequence', 'star_condition', 'in_neighborhood', 'converges_metric',
    'converges_pointwise', 'diagnose',
    'ResultExporter',
]
