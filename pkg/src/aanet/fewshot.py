"""Few-shot episodes and nearest-centroid classification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError


@dataclass
class Episode:
    support_x: np.ndarray
    support_y: np.ndarray
    query_x: np.ndarray
    query_y: np.ndarray
    way: int
    shots: int
    classes: np.ndarray  # original class id of each episode label
    support_index: np.ndarray
    query_index: np.ndarray


def sample_episode(examples, labels, way: int, shots: int, query_per_class: int, seed: int) -> Episode:
    """Draw a ``way``-way ``shots``-shot episode.

    Classes are chosen uniformly without replacement and each class's
    examples are shuffled before the support/query split, so repeated calls
    with different seeds see different examples. Episode labels are
    ``0..way-1`` in the order the classes were drawn.
    """
    labels = np.asarray(labels)
    if way < 1 or shots < 1 or query_per_class < 1:
        raise ArgumentError("way, shots and query_per_class must all be >= 1")
    need = shots + query_per_class
    counts = {c: int(n) for c, n in zip(*np.unique(labels, return_counts=True))}
    eligible = sorted(c for c, n in counts.items() if n >= need)
    if len(eligible) < way:
        raise ArgumentError(
            f"need {way} classes with >= {need} examples each, only {len(eligible)} qualify"
        )
    rng = np.random.default_rng(seed)
    chosen = rng.choice(np.asarray(eligible), size=way, replace=False)
    sup_idx, qry_idx, sup_y, qry_y = [], [], [], []
    for new_label, c in enumerate(chosen):
        members = rng.permutation(np.flatnonzero(labels == c))
        sup_idx.append(members[:shots])
        qry_idx.append(members[shots:need])
        sup_y += [new_label] * shots
        qry_y += [new_label] * query_per_class
    sup_idx = np.concatenate(sup_idx)
    qry_idx = np.concatenate(qry_idx)
    examples = np.asarray(examples)
    return Episode(
        examples[sup_idx], np.array(sup_y), examples[qry_idx], np.array(qry_y),
        way, shots, chosen, sup_idx, qry_idx,
    )


def ncc_classify(support_features, support_labels, query_features) -> np.ndarray:
    """Assign each query the label of the nearest class centroid (Euclidean).

    Ties go to the lowest class label.
    """
    sf = np.asarray(support_features, dtype=np.float64)
    sl = np.asarray(support_labels)
    qf = np.asarray(query_features, dtype=np.float64)
    if sf.ndim != 2 or qf.ndim != 2 or sf.shape[1] != qf.shape[1]:
        raise ArgumentError("support and query features must be 2-D with matching widths")
    if sf.shape[0] == 0:
        raise ArgumentError("empty support set")
    classes = np.unique(sl)
    centroids = np.stack([sf[sl == c].mean(axis=0) for c in classes])
    d2 = ((qf[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return classes[np.argmin(d2, axis=1)]


def mean_confidence_interval(accuracies) -> tuple[float, float]:
    """Mean and 95% normal-approximation half-width."""
    a = np.asarray(accuracies, dtype=np.float64)
    if a.size == 0:
        raise ArgumentError("no accuracies given")
    half = 1.96 * a.std(ddof=1) / np.sqrt(a.size) if a.size > 1 else 0.0
    return float(a.mean()), float(half)
