"""Exact rational price intervals for European calls on m binomial assets.

The library works over the one-step sample space {0,1}^m.  A market with m
binomial assets pins the one-step martingale densities to a fiber P(b); the
basket call payoff is a truncated positive-parity function, so its maximal
and minimal expectations over all tree measures are attained at two product
measures given in closed form.  An exact simplex oracle and an exponential
tree optimizer independently validate every fast path.
"""

from .lattice import (
    LatticeElement,
    LatticeVector,
    Permutation,
    c_vector,
    ell,
    ell_dprime,
    ell_prime,
    mu,
    nu,
    permute_lattice,
    permute_vector,
)
from .lpos import (
    EllCoefficients,
    EuropeanCertificate,
    TruncatedSum,
    is_ell_positive,
    is_order_reversing,
    one_step_factor,
    truncate,
)
from .lp_oracle import LpProblem, LpSolution, minimize_lower_gap, solve
from .polytope import (
    EmptyPolytopeError,
    PolytopeSpec,
    VertexDensity,
    contains,
    is_vertex,
    make_spec,
    subvertex,
    subvertex_in_polytope,
    supervertex,
)
from .fast_bounds import (
    MinimizerData,
    SubvertexCriterionError,
    SumStats,
    compositions,
    minimizer_at_node,
    minimizer_bound,
    multinomial,
    subvertex_expectation,
    supervertex_expectation,
)
from .pricing import (
    Asset,
    MarketModel,
    NodeBounds,
    PriceInterval,
    b_from_market,
    market_spec,
    option_value_bounds,
    payoff,
    price_interval,
)
from .tree_engine import (
    Payoff,
    TreePolicy,
    Word,
    WordFunction,
    cylinder_probability,
    extend,
    measure_of_policy,
    policy_from_density,
    restrict,
    tree_extremum,
)

__version__ = "0.1.0"
