"""Equation-template toolkit for math word problems.

Turns problem/equation records into normalized templates over number
tokens, serializes them as postorder sequences, scores predicted
sequences by solution accuracy, and selects among multiple models'
candidates by generation probability.
"""

from .expr import (
    Constant,
    Expr,
    InvalidSequence,
    NumberToken,
    Op,
    ParseError,
    StrayUnknownError,
    parse_infix,
    parse_postorder,
    postorder_string,
    to_infix,
    to_postorder,
)
from .evaluate import (
    EvaluationError,
    check_answer,
    evaluate,
    evaluate_postorder,
    parse_answer,
)
from .normalize import (
    NormalizeConfig,
    canonical_key,
    equivalent_by_oracle,
    normalize,
)
from .mapping import (
    ExtractedNumber,
    NumberMapping,
    TemplateRecord,
    build_template,
    extract_numbers,
    instantiate,
    significant_filter,
)
from .dataset import (
    CorpusStats,
    ProcessedRecord,
    RawRecord,
    ScoreReport,
    load_math23k,
    preprocess,
    read_processed,
    score_predictions,
    split,
    write_processed,
)
from .ensemble import (
    Candidate,
    EnsembleConfig,
    read_candidates,
    score_from_token_logprobs,
    select,
    write_selection,
)

__version__ = "0.1.0"
