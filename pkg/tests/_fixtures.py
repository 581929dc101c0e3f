"""Shared fixtures: random geometries and the targeted axiom mutations."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from fuzzytriples.antilinear import AntilinearOp
from fuzzytriples.clifford import build_module
from fuzzytriples.fuzzy import fuzzy_fermion_space, geometry_basis
from fuzzytriples.sphere import fuzzy_sphere_dirac
from fuzzytriples.triple import mutated

RANDOM_TYPES = ((0, 1), (1, 1), (0, 2), (0, 3), (0, 4))


def random_geometry(p: int, q: int, n: int, seed: int):
    """(fs, D) with D a standard-normal combination of the geometry basis."""
    fs = fuzzy_fermion_space(build_module(p, q), n)
    basis = geometry_basis(fs)
    rng = np.random.default_rng(seed)
    return fs, basis.combine(rng.standard_normal(basis.dim_g)).matrix


def _left(fs, a):
    return fs.rho(a).toarray() if hasattr(fs.rho(a), "toarray") else np.asarray(fs.rho(a))


def _sym(fs, Y, sign=1):
    """Y + sign * eps' J Y J^-1."""
    return Y + sign * fs.signs.epsilon_prime * fs.right(Y)


def mutations():
    """(axiom id, label, fermion space, D); each should fail exactly that axiom.

    Built on the n = 2 fuzzy sphere (s = 2, spinor dim 4, Hilbert dim 16).
    """
    fs, d = fuzzy_sphere_dirac(2)
    D = d.matrix
    Z = np.zeros_like(D)
    dim = fs.hilbert_dim
    cm = fs.clifford
    A = fs.J.matrix
    g0 = np.kron(cm.gammas[0], np.eye(4))
    E11 = np.diag([1.0, 0.0]).astype(complex)
    out = []

    out.append((1, "s outside 0..7", mutated(fs, s=10), D))
    out.append((2, "hilbert_dim off by one", mutated(fs, hilbert_dim=dim + 1), D))

    iE11 = 1j * E11
    keep = [b for b in fs.algebra.basis if not np.allclose(b, iE11)]
    alg = replace(fs.algebra, basis=np.array(keep))
    out.append((3, "basis not closed (iE11 dropped)", mutated(fs, algebra=alg), D))

    out.append((4, "rho(a) replaced by rho(a^T)",
                mutated(fs, rho=lambda a, r=fs.rho: r(np.ascontiguousarray(a.T))), D))
    out.append((5, "Gamma doubled", mutated(fs, Gamma=2 * fs.Gamma), Z))

    u = np.diag([1.0, -1.0])
    G6 = np.kron(cm.chirality, np.kron(u, u.conj()))
    out.append((6, "Gamma not commuting with rho", mutated(fs, Gamma=G6), Z))

    S = np.kron(np.diag([2.0, 2.0, 1.0, 1.0]), np.eye(4))
    out.append((7, "J not unitary", mutated(fs, J=AntilinearOp(S @ A @ np.linalg.inv(S))), Z))
    out.append((8, "J composed with Gamma", mutated(fs, J=AntilinearOp(A @ np.conj(fs.Gamma))), Z))
    out.append((9, "J without transpose", mutated(fs, J=AntilinearOp(np.kron(cm.real_structure.matrix, np.eye(4)))), Z))

    Y = g0 @ _left(fs, iE11)
    out.append((10, "non-Hermitian term", fs, D + _sym(fs, Y)))
    Y = np.kron(cm.gammas[0] @ cm.gammas[1], np.eye(4)) @ _left(fs, E11)
    Y = (Y + Y.conj().T) / 2
    out.append((11, "even word commutes with Gamma", fs, D + _sym(fs, Y)))
    Y = g0 @ _left(fs, E11)
    out.append((12, "J-odd combination", fs, D + _sym(fs, Y, -1)))
    H = np.array([[1.0, 1.0], [1.0, 0.0]])
    Y = np.kron(cm.gammas[0], np.kron(H, H.T))
    out.append((13, "two-sided term breaks first order", fs, D + _sym(fs, Y)))
    return out
