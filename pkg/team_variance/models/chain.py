from dataclasses import dataclass
from typing import Union

import numpy as np

from team_variance.exceptions import BadParamsError


@dataclass(frozen=True, eq=False)
class ChainAnalysis:
    """Steady-state and potential of one chain under one cost vector."""

    pi: np.ndarray
    avg_cost: float
    potential: np.ndarray
    recurrent_mask: np.ndarray

    @property
    def n_states(self) -> int:
        return self.pi.shape[0]

    def shifted(self, kappa: float) -> "ChainAnalysis":
        """Same analysis with the potential moved by a constant."""
        return ChainAnalysis(
            pi=self.pi,
            avg_cost=self.avg_cost,
            potential=self.potential + kappa,
            recurrent_mask=self.recurrent_mask,
        )


@dataclass(frozen=True, eq=False)
class Unichain:
    recurrent_mask: np.ndarray


@dataclass(frozen=True, eq=False)
class Multichain:
    closed_classes: tuple[tuple[int, ...], ...]


ChainClass = Union[Unichain, Multichain]


def validate_transition_matrix(P, tol: float = 1e-12) -> np.ndarray:
    """Coerce ``P`` to a float matrix and check it is row-stochastic."""
    matrix = np.asarray(P, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise BadParamsError(f"transition matrix must be square, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise BadParamsError("transition matrix has non-finite entries")
    if np.any(matrix < 0.0) or np.any(matrix > 1.0):
        raise BadParamsError("transition matrix entries must lie in [0, 1]")
    sums = matrix.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        row = int(bad[0])
        raise BadParamsError(f"row {row} sums to {sums[row]!r}, expected 1")
    return matrix
