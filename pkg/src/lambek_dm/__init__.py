"""Lambek-calculus parsing with directional density-matrix semantics."""

__version__ = "0.1.0"

from .ambiguity import (
    Reading,
    Route,
    RouteStep,
    assign_subsystems,
    enumerate_readings,
    permutation_route,
)
from .density import (
    DUAL,
    LOWER,
    RESIDUE,
    STANDARD,
    UPPER,
    BigMetric,
    DMTensor,
    FactorVariance,
    PermutationKind,
    PermutationOp,
    SpaceFactor,
    apply_permutation,
    big_metric_apply,
    big_metric_raise,
    contract_network,
    directional_swap,
    dm_contract,
    dm_from_vector,
    dm_mix,
    dm_multiply,
    dm_trace,
    dm_validate,
    dual_functor,
    retarget_trace,
)
from .errors import *  # noqa: F401,F403
from .fit import FitResult, Sample, fit_metric, metric_fit
from .interpret import (
    Lexicon,
    LexEntry,
    interpret_derivation,
    interpret_term,
    interpret_type,
)
from .lexicon import LexiconFile, load_judgments, load_lexicon, load_lexicon_file
from .logic import (
    Atom,
    Derivation,
    Leaf,
    Mode,
    Node,
    Over,
    Rule,
    Sequent,
    Under,
    parse,
    parse_type,
    validate,
)
from .tensor import (
    DOWN,
    UP,
    BasisChange,
    Metric,
    Tensor,
    canonicalize_mixed,
    contract,
    cosine_similarity,
    covector,
    decanonicalize_mixed,
    dual_vector,
    eps_l,
    eps_r,
    eta_l,
    eta_r,
    inner_product,
    lower_index,
    raise_index,
    tensor_product,
    transform_metric,
    transform_vector,
    vector,
)
from .terms import (
    AppOver,
    AppUnder,
    LamL,
    LamR,
    Var,
    alpha_equal,
    beta_reduce,
    extract_term,
    format_term,
    parse_term,
    type_of,
)
