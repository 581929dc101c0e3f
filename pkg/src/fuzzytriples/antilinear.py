"""Antilinear operators stored as ``v -> A @ conj(v)``.

Every rule for composing antilinear maps with each other or with linear maps
lives here, so the rest of the package never conjugates by hand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class AntilinearOp:
    """The antilinear map ``v -> matrix @ conj(v)``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"antilinear operator needs a square matrix, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, v):
        return self.matrix @ np.conj(v)

    def square(self) -> np.ndarray:
        """Linear matrix of ``A∘A``."""
        return self.matrix @ np.conj(self.matrix)

    def compose(self, other: "AntilinearOp") -> np.ndarray:
        """Linear matrix of ``self∘other``."""
        return self.matrix @ np.conj(other.matrix)

    def after(self, linear) -> "AntilinearOp":
        """``self∘M`` for a linear ``M``."""
        return AntilinearOp(self.matrix @ np.conj(np.asarray(linear)))

    def before(self, linear) -> "AntilinearOp":
        """``M∘self`` for a linear ``M``."""
        return AntilinearOp(np.asarray(linear) @ self.matrix)

    def scaled(self, c: complex) -> "AntilinearOp":
        return AntilinearOp(c * self.matrix)

    def inverse(self) -> "AntilinearOp":
        return AntilinearOp(np.conj(np.linalg.inv(self.matrix)))

    def conjugate(self, K) -> np.ndarray:
        """Linear matrix of ``A K A^-1``."""
        return self.matrix @ np.conj(np.asarray(K)) @ np.linalg.inv(self.matrix)

    def kron(self, other: "AntilinearOp") -> "AntilinearOp":
        return AntilinearOp(np.kron(self.matrix, other.matrix))

    def unitarity_deviation(self) -> float:
        """Max deviation of ``(Av, Aw) = (w, v)``, i.e. of ``A*A = 1``."""
        a = self.matrix
        return float(np.max(np.abs(a.conj().T @ a - np.eye(self.dim)), initial=0.0))
