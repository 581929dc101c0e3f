"""Finite-dimensional real *-algebras given by an explicit real basis.

Each algebra lives inside M(N, C). Quaternions are embedded as 2x2 complex
blocks, so M(n/2, H) is a real subalgebra of M(n, C).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("complex", "real", "quaternionic")

# units 1, i, j, k of H as 2x2 complex matrices
_QUAT = (
    np.eye(2, dtype=complex),
    np.array([[1j, 0], [0, -1j]]),
    np.array([[0, 1], [-1, 0]], dtype=complex),
    np.array([[0, 1j], [1j, 0]]),
)


def unit(n: int, k: int, l: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[k, l] = 1
    return e


@dataclass(frozen=True)
class Summand:
    kind: str
    size: int  # complex matrix size n of the block

    @property
    def weight(self) -> float:
        """Factor w with phi_0(a) = w Re tr_C(a) on this block.

        n_i dim(D_i) Re tr_D; for quaternions the D-trace is half the
        complex trace of the embedded block.
        """
        if self.kind == "complex":
            return 2.0 * self.size
        if self.kind == "real":
            return 1.0 * self.size
        return 4.0 * (self.size // 2) / 2.0


def _simple_basis(kind: str, n: int):
    """(basis, generators) of a simple algebra inside M(n, C)."""
    if kind == "complex":
        basis = [unit(n, k, l) for k in range(n) for l in range(n)]
        basis += [1j * unit(n, k, l) for k in range(n) for l in range(n)]
        gens = [unit(n, 0, 0), 1j * np.eye(n)]
        gens += [unit(n, k, k + 1) for k in range(n - 1)]
        gens += [unit(n, k + 1, k) for k in range(n - 1)]
    elif kind == "real":
        basis = [unit(n, k, l) for k in range(n) for l in range(n)]
        gens = [unit(n, 0, 0)]
        gens += [unit(n, k, k + 1) for k in range(n - 1)]
        gens += [unit(n, k + 1, k) for k in range(n - 1)]
    elif kind == "quaternionic":
        if n % 2:
            raise ValueError("quaternionic matrices need an even complex size")
        h = n // 2
        basis = [np.kron(unit(h, k, l), u) for k in range(h) for l in range(h) for u in _QUAT]
        gens = [np.kron(unit(h, 0, 0), _QUAT[0])]
        gens += [np.kron(np.eye(h), _QUAT[1]), np.kron(np.eye(h), _QUAT[2])]
        gens += [np.kron(unit(h, k, k + 1), _QUAT[0]) for k in range(h - 1)]
        gens += [np.kron(unit(h, k + 1, k), _QUAT[0]) for k in range(h - 1)]
    else:
        raise ValueError(f"unknown algebra kind {kind!r}; expected one of {KINDS}")
    return basis, gens


def _embed(block: np.ndarray, offset: int, N: int) -> np.ndarray:
    out = np.zeros((N, N), dtype=complex)
    n = block.shape[0]
    out[offset:offset + n, offset:offset + n] = block
    return out


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """Block-diagonal direct sum of simple matrix algebras inside M(N, C).

    ``basis`` spans the algebra over R; ``generators`` generate it as a real
    algebra and are what the commutation axioms quantify over by default.
    """

    summands: tuple
    basis: np.ndarray
    generators: np.ndarray

    @classmethod
    def simple(cls, kind: str, n: int) -> "AlgebraSpec":
        return cls.direct_sum([(kind, n)])

    @classmethod
    def direct_sum(cls, parts) -> "AlgebraSpec":
        summands = tuple(Summand(k, int(n)) for k, n in parts)
        N = sum(s.size for s in summands)
        basis, gens = [], []
        offset = 0
        for s in summands:
            b, g = _simple_basis(s.kind, s.size)
            basis += [_embed(x, offset, N) for x in b]
            gens += [_embed(x, offset, N) for x in g]
            offset += s.size
        return cls(summands, np.array(basis), np.array(gens))

    @property
    def kind(self) -> str:
        if len(self.summands) == 1:
            return self.summands[0].kind
        return "direct-sum"

    @property
    def sizes(self) -> tuple:
        return tuple(s.size for s in self.summands)

    @property
    def N(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        """Real dimension."""
        return self.basis.shape[0]

    def blocks(self, a: np.ndarray):
        offset = 0
        for s in self.summands:
            yield s, a[offset:offset + s.size, offset:offset + s.size]
            offset += s.size

    def real_coords(self, a: np.ndarray) -> np.ndarray:
        """Least-squares real coordinates of ``a`` in the basis."""
        coords, *_ = np.linalg.lstsq(self._real_basis_matrix(), _realify(a), rcond=None)
        return coords

    def element(self, coords) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=float), self.basis, axes=1)

    def _real_basis_matrix(self) -> np.ndarray:
        return np.stack([_realify(b) for b in self.basis], axis=1)

    def span_residual(self, mats) -> float:
        """Max distance of the given matrices from the real span of the basis."""
        B = self._real_basis_matrix()
        Q, _ = np.linalg.qr(B)
        X = np.stack([_realify(m) for m in mats], axis=1)
        return float(np.max(np.abs(X - Q @ (Q.T @ X)), initial=0.0))

    def closure_deviation(self) -> float:
        """Residual of products, adjoints and the unit against the span."""
        b = self.basis
        prods = np.einsum("aij,bjk->abik", b, b).reshape(-1, self.N, self.N)
        adj = np.conj(np.transpose(b, (0, 2, 1)))
        return max(
            self.span_residual(prods),
            self.span_residual(adj),
            self.span_residual([np.eye(self.N)]),
        )

    def random_element(self, rng) -> np.ndarray:
        return self.element(rng.standard_normal(self.dim))

    def random_unitary(self, rng) -> np.ndarray:
        """exp of a random anti-Hermitian element; stays inside the algebra."""
        from scipy.linalg import expm

        a = self.random_element(rng)
        return expm((a - a.conj().T) / 2)


def _realify(m) -> np.ndarray:
    m = np.asarray(m)
    return np.concatenate([m.real.ravel(), m.imag.ravel()])
