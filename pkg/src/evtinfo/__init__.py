"""Max-score calculus for Gumbel-domain extreme values.

Max-scores, entropies and relative entropies to the Gumbel law, norming
constants from von Mises representations, and quadrature / Monte Carlo
checks of the associated limit identities.
"""
__version__ = "0.1.0"

from .distributions import (
    Distribution,
    GumbelParams,
    SupportInterval,
    VonMisesSpec,
    cdf_from_score,
    hazard,
    make_exponential,
    make_gnedenko,
    make_gumbel,
    make_von_mises,
    max_score,
    max_score_vonmises,
)
from .errors import (
    BracketError,
    BudgetError,
    DivergenceError,
    DomainError,
    EstimationError,
    EvaluationError,
    EvtInfoError,
    UnsupportedError,
)
from .information import (
    KlDecomposition,
    entropy_direct,
    entropy_via_score,
    expected_log_cdf_at_max,
    expected_log_tail_at_max,
    kl_decomposition,
    kl_direct,
    kl_to_gumbel,
    limiting_moment,
    mgf,
    moment,
    taylor_gap,
    taylor_terms,
)
from .normalize import (
    NormalizedMax,
    NormingConstants,
    normalized_max,
    normalized_max_cdf,
    normalized_max_score,
    normalized_quantile,
    norming_constants,
)
from .numerics import QuadratureResult, RootResult, expectation, find_root, integrate_unit
from .specfun import euler_gamma, gamma_derivative_at_1, gamma_fn, harmonic
