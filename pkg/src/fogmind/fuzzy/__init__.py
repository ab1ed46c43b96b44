from .membership import (
    Gaussian,
    InvalidBoundsError,
    MembershipFunction,
    Singleton,
    Triangular,
    make_gaussian,
    membership_degree,
    mf_center,
)
from .variables import (
    DEFAULT_THRESHOLD,
    INPUT,
    KIND_BOOLEAN,
    KIND_INTEGER,
    KIND_LINGUISTIC,
    OUTPUT,
    LinguisticVariable,
    classify,
    fuzzify,
)
from .engine import (
    DEFAULT_GRID_POINTS,
    DEFAULT_RULE_THRESHOLD,
    AggregatedOutput,
    InferenceResult,
    NoOutputError,
    defuzzify_cog,
    infer,
    output_grid,
    rule_strength,
    sample_mf,
    select_integer_output,
)

__all__ = [
    "AggregatedOutput",
    "DEFAULT_GRID_POINTS",
    "DEFAULT_RULE_THRESHOLD",
    "DEFAULT_THRESHOLD",
    "Gaussian",
    "INPUT",
    "InferenceResult",
    "InvalidBoundsError",
    "KIND_BOOLEAN",
    "KIND_INTEGER",
    "KIND_LINGUISTIC",
    "LinguisticVariable",
    "MembershipFunction",
    "NoOutputError",
    "OUTPUT",
    "Singleton",
    "Triangular",
    "classify",
    "defuzzify_cog",
    "fuzzify",
    "infer",
    "make_gaussian",
    "membership_degree",
    "mf_center",
    "output_grid",
    "rule_strength",
    "sample_mf",
    "select_integer_output",
]
