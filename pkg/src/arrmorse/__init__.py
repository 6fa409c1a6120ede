"""Hyperplane arrangements, master functions and their Morse-Novikov rank predictions."""

from .arrangement import (Arrangement, Hyperplane, Weights, evaluate_xi, log_f_alpha, parse_arrangement,
                          parse_point, serialize_arrangement)
from .bounds import (BoundCertificate, certify_grad_lower_bound, certify_neighborhood_bounds,
                     certify_pairing_bound, sample_near_arrangement)
from .chambers import Chamber, bounded_chambers
from .errors import (ArrangementError, BudgetExhausted, DegenerateCritical, DuplicateHyperplane, LengthMismatch,
                     MalformedInput, NonCentral, NonPositiveWeights, NotCritical, NotRankOne, PointOnArrangement,
                     StepUnderflow, ZeroLinearPart)
from .flows import Trajectory, fibration_return_map, integrate, weight_rank
from .lattice import (Flat, Lattice, build_lattice, essentialize, euler_characteristic, is_central, is_essential,
                      poincare_coefficients)
from .master import (CriticalPoint, LogGradient, SolverConfig, certify_morse, critical_equation_residual,
                     find_critical_points, log_gradient)
from .os_aomoto import OSAlgebra, aomoto_cohomology, build_os_algebra, check_nonresonance
from .report import RankReport, full_report

__version__ = "0.1.0"
