"""Optimal synthesis embeddings.

Synthesize unit vectors that are equidistant (in cosine distance) from a set
of embeddings at minimal distance, or that sit at prescribed distances, and
use them for sentence composition and class-exemplar augmentation.
"""

__version__ = "0.1.0"

from .augmentation import AugmentationConfig, LabeledDataset, Record, augment, split_dataset
from .composer import CompositionRequest, compose_bov, compose_sentence, tokenize
from .distances import (
    DistanceSpec,
    FeasibleInterval,
    equal_distance_interval,
    reduce_dependent_rows,
    solve_at_distances,
    varying_distance_range,
)
from .equidistant import SynthesisResult, ose, ose_closed_form_pair, ose_gram_alternative
from .evaluate import EvalReport, centroid_predict, knn_predict, run_benchmark
from .linalg import cosine_distance, orthonormalize, project_onto_complement, solve_gram
from .store import EmbeddingTable, classify_by_partition, load_embeddings, retrieve

__all__ = [
    "AugmentationConfig", "CompositionRequest", "DistanceSpec", "EmbeddingTable", "EvalReport",
    "FeasibleInterval", "LabeledDataset", "Record", "SynthesisResult", "augment",
    "centroid_predict", "classify_by_partition", "compose_bov", "compose_sentence",
    "cosine_distance", "equal_distance_interval", "knn_predict", "load_embeddings",
    "orthonormalize", "ose", "ose_closed_form_pair", "ose_gram_alternative",
    "project_onto_complement", "reduce_dependent_rows", "retrieve", "run_benchmark",
    "solve_at_distances", "solve_gram", "split_dataset", "tokenize", "varying_distance_range",
]
