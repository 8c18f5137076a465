"""Open relation modeling toolkit.

Builds knowledge graphs from TSV files, finds and encodes reasoning paths
between entity pairs, derives training data from definition sentences,
trains and serves a seq2seq-style scorer baseline, selects paths by model
confidence, and evaluates generations and selections.
"""

from .accel import backend_name, bfs_distances, pair_hop_buckets
from .corpus import (
    DatasetRow,
    DatasetSplit,
    DefinitionRecord,
    DroppedExample,
    RelationExample,
    build_dataset_rows,
    dependency_coverage,
    extract_pairs,
    filter_examples,
    load_conllu,
    parse_definition_record,
    split_dataset,
    subsample,
    surface_coverage,
)
from .encode import (
    PATH,
    UNKNOWN,
    VANILLA,
    DecodedInput,
    EncodedInput,
    decode,
    encode_path,
    encode_unknown,
    encode_vanilla,
)
from .kg import KnowledgeGraph, LoadError, Triple, hop_histogram, load_kg, load_kg_files
from .metrics import MetricReport, bleu, meteor_lite, rouge_l, selection_accuracy, stem
from .pathfind import (
    EntityPair,
    PathStep,
    ReasoningPath,
    count_shortest_paths,
    hop_distance,
    k_shortest_paths,
    shortest_path,
    validate_path,
)
from .scorer import (
    GenerationParams,
    GenerationResult,
    NgramCopyModel,
    ScorerBackend,
    ScorerConfig,
    confidence,
    train_baseline,
)
from .scorer_client import (
    ProtocolError,
    RemoteScorer,
    RemoteScorerConfig,
    RemoteScorerError,
    TransportError,
)
from .select import (
    SelectionOutcome,
    random_walk_prob,
    select_by_confidence,
    select_random_walk,
    select_shortest,
)

__version__ = "0.1.0"

__all__ = [
    "DatasetRow",
    "DatasetSplit",
    "DecodedInput",
    "DefinitionRecord",
    "DroppedExample",
    "EncodedInput",
    "EntityPair",
    "GenerationParams",
    "GenerationResult",
    "KnowledgeGraph",
    "LoadError",
    "MetricReport",
    "NgramCopyModel",
    "PATH",
    "PathStep",
    "ProtocolError",
    "ReasoningPath",
    "RelationExample",
    "RemoteScorer",
    "RemoteScorerConfig",
    "RemoteScorerError",
    "ScorerBackend",
    "ScorerConfig",
    "SelectionOutcome",
    "TransportError",
    "Triple",
    "UNKNOWN",
    "VANILLA",
    "backend_name",
    "bfs_distances",
    "bleu",
    "build_dataset_rows",
    "confidence",
    "count_shortest_paths",
    "decode",
    "dependency_coverage",
    "encode_path",
    "encode_unknown",
    "encode_vanilla",
    "extract_pairs",
    "filter_examples",
    "hop_distance",
    "hop_histogram",
    "k_shortest_paths",
    "load_conllu",
    "load_kg",
    "load_kg_files",
    "meteor_lite",
    "pair_hop_buckets",
    "parse_definition_record",
    "random_walk_prob",
    "rouge_l",
    "select_by_confidence",
    "select_random_walk",
    "select_shortest",
    "selection_accuracy",
    "shortest_path",
    "split_dataset",
    "stem",
    "subsample",
    "surface_coverage",
    "validate_path",
    "__version__",
]
