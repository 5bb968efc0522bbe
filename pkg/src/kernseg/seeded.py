"""Deterministic multi-scale seeded intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SeededIntervalSet:
    """Layered collection of half-open intervals ``(s, e]`` covering ``(0, T]``.

    Layer ``k`` holds ``2**k - 1`` intervals of nominal length ``T / 2**(k-1)``
    shifted by half that length.
    """

    T: int
    depth: int
    layers: np.ndarray
    starts: np.ndarray
    ends: np.ndarray

    def __len__(self):
        return self.starts.shape[0]

    def layer(self, k: int) -> list[tuple[int, int]]:
        mask = self.layers == k
        return list(zip(self.starts[mask].tolist(), self.ends[mask].tolist()))

    def intervals(self) -> list[tuple[int, int, int]]:
        return list(zip(self.layers.tolist(), self.starts.tolist(), self.ends.tolist()))


def max_depth(T: int) -> int:
    """Deepest layer whose nominal length ``T 2^(1-k)`` is still at least 2."""
    return max(1, int(math.floor(math.log2(T))))


def layer_count(T: int, C_frak: float = 1.0) -> int:
    return min(max(1, math.ceil(C_frak * math.log(T))), max_depth(T))


def generate(T: int, C_frak: float = 1.0, depth: int | None = None) -> SeededIntervalSet:
    """Seeded intervals for a sample of size ``T``.

    The number of layers is ``ceil(C_frak * log T)`` capped at
    :func:`max_depth`, unless ``depth`` is given explicitly.  Endpoints are
    computed in exact integer arithmetic and right ends are truncated at T.
    """
    if T < 2:
        raise ValueError(f"T must be at least 2, got {T}")
    if C_frak <= 0:
        raise ValueError(f"C_frak must be positive, got {C_frak}")
    K = layer_count(T, C_frak) if depth is None else int(depth)
    if K < 1:
        raise ValueError("depth must be at least 1")
    layers, starts, ends = [], [], []
    for k in range(1, K + 1):
        d = 2 ** k
        for i in range(1, d):
            s = ((i - 1) * T) // d
            e = -((-(i + 1) * T) // d)
            layers.append(k)
            starts.append(s)
            ends.append(min(e, T))
    return SeededIntervalSet(T, K,
                             np.asarray(layers, dtype=np.int64),
                             np.asarray(starts, dtype=np.int64),
                             np.asarray(ends, dtype=np.int64))


def isolating_interval(sis: SeededIntervalSet, eta: int, zeta: float) -> tuple[int, int] | None:
    """A seeded interval around ``eta`` with both sides in ``[zeta/16, zeta]``.

    Sides are ``eta - s`` and ``e - eta``.  Returns ``None`` when no interval
    qualifies.
    """
    left = eta - sis.starts
    right = sis.ends - eta
    ok = (np.minimum(left, right) >= zeta / 16.0) & (np.maximum(left, right) <= zeta)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return None
    return int(sis.starts[idx[0]]), int(sis.ends[idx[0]])
