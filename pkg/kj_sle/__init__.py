from .core_config import SleConfig
from .errors import CapacityError, ConvergenceError, InputError, SleError, VerificationError
from .classes.boolean_oracle import BooleanOracle
from .classes.bounded_vector import BoundedVector
from .classes.potential import Potential, SmoothIntegrand
from .classes.query_ledger import QueryLedger
from .solvers.eigen import reference_lambda, smallest_eigenvalue_classical
from .solvers.qpe import estimate_lambda, make_plan
from .reductions.integrate import integrate_weighted
from .reductions.boolmean import boolean_mean
from .reductions.sat import CnfFormula, cnf_oracle, parse_dimacs, sat_decide, sat_search
from .reductions.grover import grover_find
from .reductions.minimize import min_index, min_value, threshold_oracle
from .reductions.tsp import DistanceMatrix, tsp_decide, tsp_min_length, tsp_optimal_tour

from kj_logger import get_logger

logger = get_logger(__name__)
