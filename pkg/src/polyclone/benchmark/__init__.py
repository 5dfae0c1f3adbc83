"""Benchmark harness: OJ-corpus recall and precision scoring."""

from .corpus import (
    MatchConfig,
    Submission,
    description_words,
    jaccard,
    list_problems,
    load_description_words,
    load_problem_submissions,
)
from .levenshtein import ID_SENTINEL, lev_simi, lev_ts, normalize_seq
from .precision import (
    GroupScore,
    PairGroup,
    ProblemPair,
    build_precision_dataset,
    group_of,
    materialize_pair,
    score_precision,
)
from .recall import (
    BUCKETS,
    LabeledClone,
    RecallScore,
    bucket_of,
    build_recall_dataset,
    match_clones,
    pair_matches,
    read_truth,
    write_truth,
)

__all__ = [
    "BUCKETS",
    "GroupScore",
    "ID_SENTINEL",
    "LabeledClone",
    "MatchConfig",
    "PairGroup",
    "ProblemPair",
    "RecallScore",
    "Submission",
    "bucket_of",
    "build_precision_dataset",
    "build_recall_dataset",
    "description_words",
    "group_of",
    "jaccard",
    "lev_simi",
    "lev_ts",
    "list_problems",
    "load_description_words",
    "load_problem_submissions",
    "match_clones",
    "materialize_pair",
    "normalize_seq",
    "pair_matches",
    "read_truth",
    "score_precision",
    "write_truth",
]
