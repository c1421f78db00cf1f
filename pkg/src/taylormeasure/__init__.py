"""Signed Taylor measures on subsets of the naturals.

Evaluation with certified error bounds, Jordan decomposition, a
factorial-weighted inner-product geometry, power-series probability
distributions with samplers and Monte Carlo estimators, stochastic
Taylor measures, and Taylor-coefficient representations of analytic
functions.
"""

from .errors import (
    CenterMismatch,
    DegenerateDistribution,
    DivergenceUnknown,
    InvalidDocument,
    InvalidPmf,
    NegativeRadicand,
    NoSamplerAvailable,
    OutOfDomain,
    QuadratureStall,
    QuantileTailUnresolved,
    TaylorMeasureError,
    UnsupportedSpec,
)
from .kernel import (
    Bounded,
    CoefficientSequence,
    ConstantTail,
    CustomTail,
    FactorialGeometric,
    FiniteSupport,
    GeometricEnvelope,
    GeometricTail,
    SignedLogTerm,
    TermBackedSequence,
    TruncationPlan,
    Unverified,
    ZeroTail,
    constant_sequence,
    finite_sequence,
    geometric_sequence,
    plan_truncation,
    rule_sequence,
    sum_terms,
    tail_bound,
    term,
    term_value,
)
from .measure import (
    JordanPair,
    MeasureValue,
    NatSet,
    TaylorMeasure,
    evaluate,
    from_term_function,
    jordan_decompose,
    linear_combination,
    taylor_derivative,
    total_variation,
    zero_measure,
)
from .geometry import (
    HilbertAxiomReport,
    distance,
    hilbert_axiom_report,
    inner_product,
    norm,
    rational_approximation,
)
from .probability import (
    JordanPmf,
    PowerSeriesPmf,
    TaylorProbabilityPair,
    cdf,
    from_pmf,
    measure_from_densities,
    normalizer,
    pmf_eval,
    probability_pair,
    quantile,
)
from .montecarlo import (
    McEstimate,
    RngSpec,
    estimate_measure,
    estimate_normalizer_poisson,
    sample_pmf,
)
from .analytic import (
    AnalyticRep,
    builtin,
    cos_rep,
    eval_rep,
    exp_rep,
    geometric_rep,
    linear_combine,
    lp_norm_on_interval,
    multiply,
    polynomial_rep,
    power,
    recenter,
    sin_rep,
    sup_distance_on_grid,
    truncate_rep,
)
from .stochastic import (
    Ar1,
    BernoulliStep,
    BrownianApprox,
    GaussianIID,
    GaussianIndep,
    IndicatorGamma,
    NormalStep,
    RandomWalk,
    SamplePath,
    SimpleFunction,
    UniformStep,
    brownian_marginal_moments,
    gaussian_truncation_plan,
    sample_stm,
    sample_stm_batch,
    simulate_brownian,
    simulate_brownian_batch,
    simulate_random_walk,
    simulate_random_walk_batch,
    stm_coefficients,
    stm_moments,
)

__version__ = "0.1.0"
