"""ghzlab: desk-scale experiments on the repeated GHZ game.

Exact and Monte Carlo game values, the mod-4 recoding of strategies into
cross-functions Z2^n -> Z4^n, additive-quadruple counting, sumset machinery
over Z2^n x Z4^n, and the constructive extraction of shift structure from
successful strategies.
"""

from .additive import (
    DoublingReport,
    FreimanReport,
    FreimanWitness,
    GroupElem,
    GroupSet,
    PartialMap,
    QuadrupleReport,
    count_quadruples,
    difference_set,
    doubling_report,
    freiman_check,
    freiman_witness_violates,
    iterated_sumset,
    quadruple_bound_check,
    sumset,
)
from .crossfn import (
    CrossFn,
    CrossTriple,
    PlantedInstance,
    cross_success,
    cross_triple,
    equivalence_check,
    make_planted,
    strategy_from_cross,
    to_cross,
)
from .errors import (
    DimensionError,
    GhzError,
    InternalCheckError,
    RetryExhaustedError,
    StageError,
    ValidationError,
)
from .extraction import (
    ExtractionReport,
    ParityConstraintSystem,
    PipelineConfig,
    bsg_exhaustive_oracle,
    bsg_extract,
    build_Y,
    check_Yx_law,
    choose_W,
    choose_a,
    full_pipeline,
    graph_of,
    mod2_shift_fraction,
    sample_W,
    shift_extract,
)
from .game import (
    QuestionTriple,
    StrategyTable,
    StrategyTriple,
    ValueReport,
    best_response,
    constant_strategy,
    enumerate_questions,
    evaluate_value_exact,
    evaluate_value_mc,
    exact_game_value,
    make_strategy,
    product_strategy,
    random_strategy,
    win_predicate,
)
from .packed import BitVec, QuatVec

__version__ = "0.1.0"

__all__ = [
    "BitVec",
    "QuatVec",
    "QuestionTriple",
    "StrategyTable",
    "StrategyTriple",
    "ValueReport",
    "CrossFn",
    "CrossTriple",
    "PlantedInstance",
    "GroupElem",
    "GroupSet",
    "PartialMap",
    "QuadrupleReport",
    "DoublingReport",
    "FreimanReport",
    "FreimanWitness",
    "ParityConstraintSystem",
    "PipelineConfig",
    "ExtractionReport",
    "GhzError",
    "ValidationError",
    "DimensionError",
    "InternalCheckError",
    "RetryExhaustedError",
    "StageError",
    "enumerate_questions",
    "win_predicate",
    "evaluate_value_exact",
    "evaluate_value_mc",
    "best_response",
    "exact_game_value",
    "make_strategy",
    "constant_strategy",
    "product_strategy",
    "random_strategy",
    "to_cross",
    "cross_triple",
    "cross_success",
    "equivalence_check",
    "strategy_from_cross",
    "make_planted",
    "count_quadruples",
    "quadruple_bound_check",
    "sumset",
    "difference_set",
    "iterated_sumset",
    "doubling_report",
    "freiman_check",
    "freiman_witness_violates",
    "graph_of",
    "bsg_extract",
    "bsg_exhaustive_oracle",
    "build_Y",
    "sample_W",
    "choose_W",
    "choose_a",
    "shift_extract",
    "mod2_shift_fraction",
    "check_Yx_law",
    "full_pipeline",
]
