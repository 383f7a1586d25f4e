"""Steady-state and potential (bias) analysis of finite Markov chains.

Every other service sits on top of the three kernels here:

- :func:`classify_chain` finds the closed communicating classes,
- :func:`stationary_distribution` solves the rank-augmented balance system,
- :func:`solve_poisson` returns the long-run average cost and the potential
  normalized so that ``pi @ g == 0``.

All solves are dense and direct; chains here have at most a few hundred states.
"""

from typing import Optional

import numpy as np
import scipy.linalg as spl
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from team_variance.exceptions import MultichainError, SingularSystemError
from team_variance.models.chain import (
    ChainAnalysis,
    ChainClass,
    Multichain,
    Unichain,
    validate_transition_matrix,
)
from team_variance.settings import Settings, get_settings


def classify_chain(P) -> ChainClass:
    """Unichain (with its recurrent class marked) or Multichain."""
    matrix = np.asarray(P, dtype=float)
    positive = matrix > 0.0
    n_components, labels = connected_components(
        csr_matrix(positive), directed=True, connection="strong"
    )
    rows, cols = np.nonzero(positive)
    leaving = labels[rows] != labels[cols]
    open_components = set(labels[rows[leaving]].tolist())
    closed = [c for c in range(n_components) if c not in open_components]

    if len(closed) == 1:
        return Unichain(recurrent_mask=labels == closed[0])
    return Multichain(
        closed_classes=tuple(
            tuple(int(s) for s in np.flatnonzero(labels == c)) for c in closed
        )
    )


def _require_unichain(matrix: np.ndarray) -> np.ndarray:
    chain_class = classify_chain(matrix)
    if isinstance(chain_class, Multichain):
        raise MultichainError(
            f"chain has {len(chain_class.closed_classes)} closed classes"
        )
    return chain_class.recurrent_mask


def _check_rank(A: np.ndarray, settings: Settings, what: str) -> None:
    singular_values = np.linalg.svd(A, compute_uv=False)
    if singular_values[-1] <= settings.solve_tol * max(singular_values[0], 1.0):
        raise SingularSystemError(
            f"{what} is numerically rank deficient "
            f"(smallest singular value {singular_values[-1]:.3e})"
        )


def _stationary(matrix: np.ndarray, mask: np.ndarray, settings: Settings) -> np.ndarray:
    n = matrix.shape[0]
    # balance equations pi (I - P) = 0 with the last one swapped for sum(pi) = 1
    A = (np.eye(n) - matrix).T
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    _check_rank(A, settings, "stationary system")
    pi = spl.solve(A, b)
    pi = np.where(mask, np.clip(pi, 0.0, None), 0.0)
    return pi / pi.sum()


def stationary_distribution(P, settings: Optional[Settings] = None) -> np.ndarray:
    """Unique stationary distribution of a unichain, zero off the recurrent class."""
    settings = settings or get_settings()
    matrix = validate_transition_matrix(P, tol=settings.row_sum_tol)
    mask = _require_unichain(matrix)
    return _stationary(matrix, mask, settings)


def poisson_residual(P, c, analysis: ChainAnalysis) -> float:
    """Largest elementwise violation of g = c - J 1 + P g."""
    matrix = np.asarray(P, dtype=float)
    cost = np.asarray(c, dtype=float)
    g = analysis.potential
    return float(np.max(np.abs(g - (cost - analysis.avg_cost + matrix @ g))))


def solve_poisson(P, c, settings: Optional[Settings] = None) -> ChainAnalysis:
    """Average cost and potential of the chain ``P`` under cost vector ``c``."""
    settings = settings or get_settings()
    matrix = validate_transition_matrix(P, tol=settings.row_sum_tol)
    cost = np.asarray(c, dtype=float)
    if cost.shape != (matrix.shape[0],):
        raise SingularSystemError(
            f"cost vector has shape {cost.shape}, chain has {matrix.shape[0]} states"
        )
    mask = _require_unichain(matrix)
    pi = _stationary(matrix, mask, settings)
    avg_cost = float(pi @ cost)

    n = matrix.shape[0]
    fundamental = np.eye(n) - matrix + np.outer(np.ones(n), pi)
    _check_rank(fundamental, settings, "Poisson system")
    g = spl.solve(fundamental, cost - avg_cost)

    analysis = ChainAnalysis(
        pi=pi, avg_cost=avg_cost, potential=g, recurrent_mask=mask
    )
    scale = max(1.0, float(np.max(np.abs(cost))))
    residual = poisson_residual(matrix, cost, analysis)
    if residual > settings.residual_tol * scale:
        raise SingularSystemError(
            f"Poisson residual {residual:.3e} exceeds tolerance"
        )
    return analysis
