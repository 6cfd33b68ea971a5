"""Training loop and evaluation helpers."""

from __future__ import annotations

import copy
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import NumericError
from .network import LayerGraph, loss_and_backward, sgd_step
from .robustness import CORRUPTIONS, SEVERITY_LEVELS, ErrorTable, corrupt


def fit(net: LayerGraph, images, labels, *, epochs: int, batch_size: int, lr: float,
        momentum: float = 0.9, lr_decay: float = 1.0, seed: int = 0, on_epoch=None) -> list[dict]:
    """Minibatch momentum SGD; the learning rate is multiplied by ``lr_decay`` after each epoch.

    The shuffling order depends only on ``seed``, so two networks trained
    with the same seed see identical batches.
    """
    rng = np.random.default_rng(seed)
    n = len(labels)
    history = []
    net.train()
    for epoch in range(epochs):
        order = rng.permutation(n)
        losses, correct = [], 0
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            if len(idx) < 2:
                continue  # batch-norm needs more than one sample
            loss, _ = loss_and_backward(net, images[idx], labels[idx])
            if not np.isfinite(loss):
                raise NumericError(f"non-finite loss at epoch {epoch + 1}")
            sgd_step(net, lr, momentum)
            losses.append(loss)
        net.eval()
        train_error = error_rate(net, images, labels)
        net.train()
        row = {"epoch": epoch + 1, "loss": float(np.mean(losses)), "train_error": train_error, "lr": lr}
        history.append(row)
        if on_epoch is not None:
            on_epoch(row)
        lr *= lr_decay
    net.eval()
    return history


def predict(net: LayerGraph, images, batch_size: int = 256) -> np.ndarray:
    mode = net.mode
    net.eval()
    try:
        out = [net.forward(images[i : i + batch_size]).argmax(axis=1) for i in range(0, len(images), batch_size)]
    finally:
        net.mode = mode
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def extract_features(net: LayerGraph, images, batch_size: int = 256) -> np.ndarray:
    mode = net.mode
    net.eval()
    try:
        return np.concatenate([net.features(images[i : i + batch_size]) for i in range(0, len(images), batch_size)])
    finally:
        net.mode = mode


def error_rate(net: LayerGraph, images, labels) -> float:
    return float(np.mean(predict(net, images) != np.asarray(labels)))


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("AANET_THREADS", "1")))
    except ValueError:
        return 1


def corruption_error_table(net: LayerGraph, images, labels, corruptions=CORRUPTIONS, seed: int = 0,
                           threads: int | None = None) -> ErrorTable:
    """Evaluate every (corruption, severity) cell; each cell's noise seed is derived from its
    coordinates, so the table does not depend on evaluation order or thread count."""
    cells = [(c, s) for c in corruptions for s in SEVERITY_LEVELS]

    threads = threads or worker_count()

    def run(cell):
        c, s = cell
        cell_seed = seed * 1000 + CORRUPTIONS.index(c) * 10 + s if c in CORRUPTIONS else seed
        # layers keep per-call caches, so concurrent cells each get their own copy
        model = copy.deepcopy(net) if threads > 1 else net
        return cell, error_rate(model, corrupt(images, c, s, cell_seed), labels)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = dict(pool.map(run, cells))
    else:
        results = dict(map(run, cells))
    entries = {c: [results[(c, s)] for s in SEVERITY_LEVELS] for c in corruptions}
    return ErrorTable(entries, error_rate(net, images, labels))
