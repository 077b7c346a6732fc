"""Directed weighted tie network: contagion and affective homophily."""

from __future__ import annotations

from typing import Sequence

import numpy as np


class TieMatrix:
    """``weights[i, j]`` is the influence of agent ``j`` on agent ``i``; zero diagonal."""

    def __init__(self, weights: np.ndarray):
        w = np.array(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"tie matrix must be square, got shape {w.shape}")
        if np.any(w < 0):
            raise ValueError("tie weights must be nonnegative")
        np.fill_diagonal(w, 0.0)
        self.weights = w

    @classmethod
    def uniform(cls, n: int) -> "TieMatrix":
        if n < 2:
            return cls(np.zeros((n, n)))
        w = np.full((n, n), 1.0 / (n - 1))
        return cls(w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "TieMatrix":
        return TieMatrix(self.weights.copy())


def contagion_input(i: int, ties: TieMatrix, solo: Sequence[float]) -> float:
    if len(solo) != ties.n:
        raise ValueError(f"solo has length {len(solo)}, expected {ties.n}")
    row = ties.weights[i]
    return float(sum(row[j] * solo[j] for j in range(ties.n) if j != i))


def contagion_all(ties: TieMatrix, solo: Sequence[float]) -> list[float]:
    return [contagion_input(i, ties, solo) for i in range(ties.n)]


def homophily_update(ties: TieMatrix, affects: Sequence[float], alpha_hom: float) -> TieMatrix:
    """Reinforce ties by affective similarity, then renormalize each row to 1."""
    a = np.asarray(affects, dtype=float)
    n = ties.n
    if a.shape != (n,):
        raise ValueError(f"affects has shape {a.shape}, expected ({n},)")
    if n < 2:
        return ties.copy()
    raw = ties.weights + alpha_hom * (1.0 - np.abs(a[:, None] - a[None, :]))
    np.fill_diagonal(raw, 0.0)
    raw /= raw.sum(axis=1, keepdims=True)
    return TieMatrix(raw)


def _off_diagonal_rows(ties: TieMatrix) -> np.ndarray:
    n = ties.n
    mask = ~np.eye(n, dtype=bool)
    return ties.weights[mask].reshape(n, n - 1)


def average_tie_strength(ties: TieMatrix) -> float | None:
    if ties.n < 2:
        return None
    return float(_off_diagonal_rows(ties).mean())


def tie_strength_dispersion(ties: TieMatrix) -> float | None:
    """Mean over agents of the (population) std of their outgoing-influence row."""
    if ties.n < 2:
        return None
    return float(_off_diagonal_rows(ties).std(axis=1).mean())
