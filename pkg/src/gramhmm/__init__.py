"""Grammar-constrained inference, sampling and approximation for HMMs."""

from .grammar import (
    CnfGrammar,
    GrammarError,
    GrammarSyntaxError,
    derivation_count,
    dyck_grammar,
    enumerate_language,
    format_grammar,
    inside_vector,
    max_ambiguity,
    parse_grammar,
    union,
    universal_grammar,
)
from .hmm import (
    Hmm,
    HmmError,
    format_hmm,
    parse_hmm,
    random_hmm,
    split_likelihood,
    string_likelihood,
    uniform_hmm,
)
from .inference import (
    AttestationError,
    ForwardTable,
    InferenceError,
    LikelihoodResult,
    forward_table,
    likelihood_upto,
    ucfg_likelihood,
    weighted_mass,
)
from .sampling import (
    DerivationNode,
    RngSeed,
    Sampler,
    SampleTrace,
    SamplingError,
    sample,
    sample_many,
)
from .approx import (
    ApproxError,
    FprasReport,
    exact_bernoulli,
    fpras_likelihood,
    sample_size,
)
from .oracle import (
    ExactDistribution,
    OracleError,
    brute_force_likelihood,
    brute_force_weighted_mass,
    exact_distribution,
    tv_distance,
)
from .reductions import (
    Cnf3Formula,
    ReductionError,
    brute_force_model_count,
    clause_complement_grammar,
    formula_to_cfg,
    model_count_via_likelihood,
    parse_dimacs,
)

__version__ = "0.1.0"
