"""Cluster-to-class alignment and partition-quality metrics.

Clustering labels are arbitrary, so before supervised metrics make sense
the cluster ids must be mapped onto class ids: either a one-to-one
assignment matching cluster centroids to class one-hot corners (Hungarian)
or a many-to-one majority vote. NMI needs no alignment and is the primary
score; accuracy and IoU are reported after alignment.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import xlogy

from .errors import ConfigError, DomainError, ShapeError

__all__ = [
    "AlignmentMap",
    "hungarian_align",
    "argmax_align",
    "confusion_matrix",
    "nmi",
    "accuracy",
    "iou",
    "mean_iou",
    "MetricReport",
    "evaluate",
]


@dataclass(frozen=True)
class AlignmentMap:
    """Cluster-id to class-id mapping.

    ``mapping[j]`` is the class assigned to cluster j. ``bijective`` is
    True when the map is a permutation (every class hit exactly once).
    """

    mapping: tuple
    bijective: bool

    def apply(self, labels):
        labels = np.asarray(labels)
        table = np.asarray(self.mapping)
        if labels.min(initial=0) < 0 or labels.max(initial=0) >= table.size:
            raise DomainError("labels outside the aligned cluster range")
        return table[labels]


def hungarian_align(centroids, n_classes=None):
    """One-to-one map of clusters onto classes by centroid geometry.

    Class c is represented by the one-hot vector e_c; cluster j by its
    centroid row. The permutation minimizing total squared Euclidean cost
    between matched pairs is returned. Requires exactly as many clusters
    as classes.

    Raises
    ------
    ConfigError
        If the cluster count differs from the class count.
    """
    C = np.asarray(centroids, dtype=float)
    if C.ndim != 2:
        raise ShapeError("centroids must be a (K, D) array")
    k, d = C.shape
    n_classes = d if n_classes is None else int(n_classes)
    if k != n_classes:
        raise ConfigError(
            f"one-to-one alignment needs k == number of classes, got {k} and {n_classes}"
        )
    targets = np.eye(n_classes, d)
    diff = C[:, None, :] - targets[None, :, :]
    cost = np.einsum("kcd,kcd->kc", diff, diff)
    rows, cols = linear_sum_assignment(cost)
    mapping = np.empty(k, dtype=int)
    mapping[rows] = cols
    return AlignmentMap(mapping=tuple(int(m) for m in mapping), bijective=True)


def argmax_align(pred_labels, true_labels, k, n_classes):
    """Many-to-one map sending each cluster to its majority true class.

    Clusters with no members map to class 0. The result is bijective only
    if every class is hit exactly once.
    """
    pred = np.asarray(pred_labels)
    true = np.asarray(true_labels)
    conf = confusion_matrix(pred, true, k, n_classes)
    mapping = conf.argmax(axis=1)
    hit = np.bincount(mapping, minlength=n_classes)
    bijective = k == n_classes and np.all(hit == 1)
    return AlignmentMap(mapping=tuple(int(m) for m in mapping), bijective=bool(bijective))


def confusion_matrix(pred_labels, true_labels, n_pred, n_true):
    """Count matrix: entry (j, c) is how many points have pred j and true c."""
    pred = np.asarray(pred_labels)
    true = np.asarray(true_labels)
    if pred.shape != true.shape or pred.ndim != 1:
        raise ShapeError("label vectors must be 1-D and aligned")
    if pred.size == 0:
        raise DomainError("cannot tabulate empty label vectors")
    if pred.min() < 0 or pred.max() >= n_pred or true.min() < 0 or true.max() >= n_true:
        raise DomainError("labels out of range")
    flat = pred * n_true + true
    return np.bincount(flat, minlength=n_pred * n_true).reshape(n_pred, n_true)


def _entropy(counts):
    n = counts.sum()
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(labels_a, labels_b):
    """Normalized mutual information between two labelings, in [0, 1].

    Mutual information in natural logs, normalized by the arithmetic mean
    of the two label entropies. When both labelings are single-block the
    partitions are identical and the score is 1; if only one is
    single-block there is nothing shared and the score is 0.
    """
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ShapeError("label vectors must be 1-D, aligned and nonempty")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    na = ai.max() + 1
    nb = bi.max() + 1
    conf = confusion_matrix(ai, bi, na, nb)
    n = a.size
    ha = _entropy(conf.sum(axis=1))
    hb = _entropy(conf.sum(axis=0))
    denom = 0.5 * (ha + hb)
    if denom == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    p = conf / n
    outer = np.outer(conf.sum(axis=1), conf.sum(axis=0)) / (n * n)
    mi = float(xlogy(p, p).sum() - xlogy(p, outer).sum())
    return float(mi / denom)


def accuracy(pred_classes, true_labels):
    """Fraction of points whose aligned class matches the true class."""
    pred = np.asarray(pred_classes)
    true = np.asarray(true_labels)
    if pred.shape != true.shape or pred.size == 0:
        raise ShapeError("label vectors must be aligned and nonempty")
    return float((pred == true).mean())


def iou(pred_classes, true_labels, cls):
    """Intersection over union for one class.

    A class absent from both labelings scores 1 (vacuously perfect); such
    classes are excluded from the mean.
    """
    pred = np.asarray(pred_classes) == cls
    true = np.asarray(true_labels) == cls
    union = (pred | true).sum()
    if union == 0:
        return 1.0
    return float((pred & true).sum() / union)


def mean_iou(pred_classes, true_labels, n_classes):
    """Average per-class IoU over classes present in either labeling."""
    scores = []
    pred = np.asarray(pred_classes)
    true = np.asarray(true_labels)
    for c in range(n_classes):
        if not ((pred == c).any() or (true == c).any()):
            continue
        scores.append(iou(pred, true, c))
    if not scores:
        raise DomainError("no class present in either labeling")
    return float(np.mean(scores))


@dataclass
class MetricReport:
    nmi: float
    accuracy: float
    mean_iou: float
    per_class_iou: dict
    confusion: np.ndarray


def evaluate(pred_labels, true_labels, alignment: AlignmentMap, n_classes):
    """All reported metrics in one pass, derived from one confusion matrix.

    NMI compares the raw clustering to the truth (alignment-invariant);
    accuracy and IoU compare the aligned classes to the truth.
    """
    pred = np.asarray(pred_labels)
    true = np.asarray(true_labels)
    aligned = alignment.apply(pred)
    conf = confusion_matrix(aligned, true, n_classes, n_classes)
    n = conf.sum()
    acc = float(np.trace(conf) / n)
    per_class = {}
    for c in range(n_classes):
        inter = conf[c, c]
        union = conf[c, :].sum() + conf[:, c].sum() - inter
        if union == 0:
            continue
        per_class[c] = float(inter / union)
    if not per_class:
        raise DomainError("no class present in either labeling")
    return MetricReport(
        nmi=nmi(pred, true),
        accuracy=acc,
        mean_iou=float(np.mean(list(per_class.values()))),
        per_class_iou=per_class,
        confusion=conf,
    )
