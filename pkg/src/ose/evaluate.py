"""Cosine KNN and nearest-centroid classifiers with accuracy reports."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .augmentation import LabeledDataset
from .errors import DimMismatch, EmptyTrainSet, ZeroVector
from .linalg import as_vector

log = logging.getLogger(__name__)

CLASSIFIERS = ("knn", "nc")
DEFAULT_K_NEIGHBORS = 5


def _train_units(train: LabeledDataset) -> tuple[np.ndarray, np.ndarray]:
    if len(train) == 0:
        raise EmptyTrainSet("training set is empty")
    X = train.matrix
    norms = np.linalg.norm(X, axis=1)
    keep = norms > 0
    if not np.all(keep):
        log.warning("%d zero training vectors ignored", int(np.count_nonzero(~keep)))
    if not np.any(keep):
        raise EmptyTrainSet("training set has only zero vectors")
    idx = np.flatnonzero(keep)
    return X[idx] / norms[idx, None], train.label_array[idx]


def _unit_query(x, dim: int) -> np.ndarray:
    x = as_vector(x)
    if x.size != dim:
        raise DimMismatch(f"query has dim {x.size}, training vectors have {dim}")
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ZeroVector("query vector is zero")
    return x / nrm


def _vote(labels: np.ndarray, dists: np.ndarray) -> str:
    # labels/dists are ordered by (distance, insertion order)
    counts: dict[str, int] = {}
    nearest: dict[str, float] = {}
    for lab, d in zip(labels, dists):
        counts[lab] = counts.get(lab, 0) + 1
        nearest.setdefault(lab, float(d))
    return min(counts, key=lambda lab: (-counts[lab], nearest[lab], lab))


def _knn_from_units(U: np.ndarray, labels: np.ndarray, q: np.ndarray, k: int) -> str:
    dist = 1.0 - np.clip(U @ q, -1.0, 1.0)
    order = np.argsort(dist, kind="stable")[:k]
    return _vote(labels[order], dist[order])


def knn_predict(train: LabeledDataset, x, k_neighbors: int = DEFAULT_K_NEIGHBORS) -> str:
    """Majority label among the ``k_neighbors`` nearest records by cosine distance.

    Distance ties go to the earlier record; vote ties go to the label whose
    nearest neighbor is closest, then to the lexicographically smaller label.
    """
    if k_neighbors < 1:
        raise ValueError("k_neighbors must be >= 1")
    U, labels = _train_units(train)
    return _knn_from_units(U, labels, _unit_query(x, U.shape[1]), k_neighbors)


def _centroids(train: LabeledDataset) -> tuple[list[str], np.ndarray]:
    if len(train) == 0:
        raise EmptyTrainSet("training set is empty")
    X = train.matrix
    groups = train.indices_by_label()
    labels, units = [], []
    for lab in sorted(groups):
        c = X[groups[lab]].mean(axis=0)
        nrm = np.linalg.norm(c)
        if nrm == 0.0:
            log.warning("class %r has a zero centroid; excluded", lab)
            continue
        labels.append(lab)
        units.append(c / nrm)
    if not labels:
        raise EmptyTrainSet("every class centroid is zero")
    return labels, np.vstack(units)


def centroid_predict(train: LabeledDataset, x) -> str:
    """Label of the class mean closest to ``x``; ties go to the smaller label."""
    labels, C = _centroids(train)
    q = _unit_query(x, C.shape[1])
    dist = 1.0 - np.clip(C @ q, -1.0, 1.0)
    return labels[int(np.argmin(dist))]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    per_class_accuracy: dict
    config_echo: dict
    n_test: int
    n_correct: int = 0
    per_class_count: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "config": self.config_echo,
            "n_correct": self.n_correct,
            "n_test": self.n_test,
            "per_class_accuracy": dict(sorted(self.per_class_accuracy.items())),
            "per_class_count": dict(sorted(self.per_class_count.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv_row(self, header: bool = True) -> str:
        cfg = self.config_echo
        keys = sorted(cfg)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["accuracy", "n_correct", "n_test", *keys])
        w.writerow([repr(self.accuracy), self.n_correct, self.n_test, *(cfg[k] for k in keys)])
        return buf.getvalue()


def predict_all(train: LabeledDataset, test: LabeledDataset, classifier: str = "knn",
                k_neighbors: int = DEFAULT_K_NEIGHBORS) -> list[str]:
    if classifier == "knn":
        if k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        U, labels = _train_units(train)
        return [_knn_from_units(U, labels, _unit_query(r.vector, U.shape[1]), k_neighbors)
                for r in test.records]
    if classifier == "nc":
        clabels, C = _centroids(train)
        out = []
        for r in test.records:
            dist = 1.0 - np.clip(C @ _unit_query(r.vector, C.shape[1]), -1.0, 1.0)
            out.append(clabels[int(np.argmin(dist))])
        return out
    raise ValueError(f"classifier must be one of {CLASSIFIERS}, got {classifier!r}")


def run_benchmark(train: LabeledDataset, test: LabeledDataset, classifier: str = "knn",
                  params: dict | None = None) -> EvalReport:
    params = dict(params or {})
    k = int(params.get("k_neighbors", DEFAULT_K_NEIGHBORS))
    if train.dim != test.dim and len(test):
        raise DimMismatch(f"train dim {train.dim} vs test dim {test.dim}")
    preds = predict_all(train, test, classifier, k)
    truth = [r.label for r in test.records]
    n_test = len(truth)
    correct: dict[str, int] = {}
    count: dict[str, int] = {}
    for t, p in zip(truth, preds):
        count[t] = count.get(t, 0) + 1
        correct[t] = correct.get(t, 0) + int(t == p)
    n_correct = sum(correct.values())
    echo = {"classifier": classifier, **params}
    if classifier == "knn":
        echo["k_neighbors"] = k
    return EvalReport(
        accuracy=n_correct / n_test if n_test else 0.0,
        per_class_accuracy={lab: correct[lab] / count[lab] for lab in sorted(count)},
        config_echo=dict(sorted(echo.items())),
        n_test=n_test,
        n_correct=n_correct,
        per_class_count=dict(sorted(count.items())),
    )
