"""Shared numerical helpers and seeded RNG construction."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np
from scipy.special import expit, log_expit

__all__ = [
    "sigmoid",
    "log_sigmoid",
    "bernoulli_loglik",
    "make_rng",
    "spawn_rngs",
    "atomic_write",
]


def sigmoid(x):
    """Numerically stable logistic function."""
    return expit(x)


def log_sigmoid(x):
    """log(sigmoid(x)) without overflow for large |x|."""
    return log_expit(x)


def bernoulli_loglik(y, logits):
    """Sum of Bernoulli log-masses for binary y given logits of P(y=1).

    Uses log-sigmoid on both branches so extreme logits stay finite.
    """
    y = np.asarray(y, dtype=float)
    logits = np.asarray(logits, dtype=float)
    return float(np.sum(y * log_expit(logits) + (1.0 - y) * log_expit(-logits)))


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator (Philox) so streams can be split reproducibly."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_rngs(seed, n: int) -> list[np.random.Generator]:
    """n independent child generators derived from one root seed."""
    if isinstance(seed, np.random.SeedSequence):
        root = seed
    else:
        root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(s)) for s in root.spawn(n)]


def atomic_write(path, write_fn) -> None:
    """Write a file via a same-directory .partial temp file and atomic rename.

    write_fn receives the temporary path. An interrupted run leaves only
    a `.partial` file behind, never a truncated final artifact.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(
        dir=path.parent, prefix=path.name + ".", suffix=".partial"
    )
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
