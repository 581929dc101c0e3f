"""Fermion spaces, the thirteen axioms of a finite real spectral triple, and
the Frobenius-form machinery that splits a Dirac operator into left and right
parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .algebra import AlgebraSpec
from .antilinear import AntilinearOp
from .clifford import CliffordModule, sign_table
from .report import Report

DEFAULT_TOL = 1e-12
KERNEL_TOL = 1e-8

AXIOMS = {
    1: "KO-dimension s is an integer mod 8",
    2: "finite-dimensional Hilbert space with consistent operator sizes",
    3: "algebra closed under products and *, with unit",
    4: "faithful *-representation rho",
    5: "Gamma* = Gamma, Gamma^2 = 1",
    6: "[Gamma, rho(a)] = 0",
    7: "J antilinear unitary",
    8: "J^2 = epsilon, J Gamma = epsilon'' Gamma J",
    9: "[rho(a), J rho(b) J^-1] = 0",
    10: "D = D*",
    11: "D Gamma = -Gamma D (s even), D Gamma = Gamma D (s odd)",
    12: "J D = epsilon' D J",
    13: "[[D, rho(a)], J rho(b) J^-1] = 0",
}


def _dev(x) -> float:
    if sp.issparse(x):
        return float(abs(x).max()) if x.nnz else 0.0
    return float(np.max(np.abs(x), initial=0.0))


@dataclass(frozen=True)
class Layout:
    """Coordinates of H inside V (x) M(N, C), spinor index outermost.

    ``sel`` lists the kept coordinates of the full space in H order, or is
    None when H is the whole of V (x) M(N, C).
    """

    spinor_dim: int
    N: int
    sel: np.ndarray | None = None

    @property
    def full_dim(self) -> int:
        return self.spinor_dim * self.N * self.N

    def restrict(self, op):
        op = sp.csr_array(op)
        if self.sel is None:
            return op
        return op[self.sel][:, self.sel]

    def restrict_dense(self, op: np.ndarray) -> np.ndarray:
        if self.sel is None:
            return op
        return op[np.ix_(self.sel, self.sel)]


@dataclass(frozen=True, eq=False)
class FermionSpace:
    """The data (s, H, A, Gamma, J) with rho given as a map on N x N algebra matrices."""

    s: int
    algebra: AlgebraSpec
    rho: Callable
    Gamma: np.ndarray
    J: AntilinearOp
    hilbert_dim: int
    clifford: CliffordModule | None = None
    layout: Layout | None = None
    # which convention for Gamma at odd s this space follows
    gamma_convention: str = "general"

    @property
    def signs(self):
        return sign_table(self.s)

    @cached_property
    def rho_basis(self) -> list:
        return [sp.csr_array(self.rho(b)) for b in self.algebra.basis]

    @cached_property
    def rho_generators(self) -> list:
        return [sp.csr_array(self.rho(b)) for b in self.algebra.generators]

    @cached_property
    def _J_sparse(self):
        A = sp.csr_array(self.J.matrix)
        Ainv = sp.csr_array(np.linalg.inv(self.J.matrix))
        return A, Ainv

    def right(self, op):
        """J op J^-1 for a sparse or dense linear operator."""
        A, Ainv = self._J_sparse
        if sp.issparse(op):
            return sp.csr_array(A @ op.conj() @ Ainv)
        return A @ np.conj(op) @ Ainv

    @cached_property
    def right_basis(self) -> list:
        return [self.right(r) for r in self.rho_basis]

    @cached_property
    def right_generators(self) -> list:
        return [self.right(r) for r in self.rho_generators]


@dataclass(frozen=True, eq=False)
class DiracOperator:
    matrix: np.ndarray
    terms: tuple = field(default=())

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_matrix(d) -> np.ndarray:
    return d.matrix if isinstance(d, DiracOperator) else np.asarray(d, dtype=complex)


def scalar_fermion_space(dim: int, s: int = 0) -> FermionSpace:
    """C acting by scalars on C^dim with Gamma = 1 and J complex conjugation."""
    alg = AlgebraSpec.simple("complex", 1)
    return FermionSpace(
        s=s,
        algebra=alg,
        rho=lambda a: sp.identity(dim, dtype=complex, format="csr") * a[0, 0],
        Gamma=np.eye(dim, dtype=complex),
        J=AntilinearOp(np.eye(dim)),
        hilbert_dim=dim,
        gamma_convention="Gamma=1",
    )


# ---------------------------------------------------------------------------
# axioms


def check_axioms(fs: FermionSpace, d, tol: float = DEFAULT_TOL,
                 quantifier: str = "generators") -> Report:
    """Check axioms 1-13 for the fermion space ``fs`` and Dirac operator ``d``.

    ``quantifier`` selects whether the commutation axioms 9 and 13 run over
    the algebra generators (enough, since the commutant of a set equals the
    commutant of the algebra it generates) or over the full real basis.
    """
    D = _as_matrix(d)
    dim = fs.Gamma.shape[0]
    if D.shape != (dim, dim):
        raise ValueError(f"Dirac operator has shape {D.shape}, Hilbert space has dim {dim}")
    if quantifier not in ("generators", "basis"):
        raise ValueError("quantifier must be 'generators' or 'basis'")
    eps, eps_p, eps_pp = sign_table(fs.s)
    s_even = fs.s % 2 == 0
    eye = np.eye(dim)
    rep = Report()

    def add(i, dev, passed=None):
        rep.add(f"axiom_{i}", dev, tol, AXIOMS[i], id=i, passed=passed)

    ok = isinstance(fs.s, (int, np.integer)) and 0 <= fs.s < 8
    add(1, 0.0 if ok else 1.0, passed=ok)

    shapes = {fs.Gamma.shape, fs.J.matrix.shape, tuple(fs.rho(np.eye(fs.algebra.N)).shape)}
    ok = shapes == {(fs.hilbert_dim, fs.hilbert_dim)} and fs.hilbert_dim >= 1
    add(2, 0.0 if ok else abs(fs.hilbert_dim - dim) or 1.0, passed=ok)

    add(3, fs.algebra.closure_deviation())

    rb = fs.rho_basis
    dev = 0.0
    for b, r in zip(fs.algebra.basis, rb):
        dev = max(dev, _dev(sp.csr_array(fs.rho(b.conj().T)) - r.conj().T))
    gens, rg = fs.algebra.generators, fs.rho_generators
    for a, ra in zip(gens, rg):
        for b, rb_ in zip(gens, rg):
            dev = max(dev, _dev(sp.csr_array(fs.rho(a @ b)) - ra @ rb_))
    add(4, dev, passed=dev <= tol and _faithful(fs))

    G = fs.Gamma
    add(5, max(_dev(G.conj().T - G), _dev(G @ G - eye)))

    add(6, max((_dev(G @ r - r @ G) for r in rb), default=0.0))

    add(7, fs.J.unitarity_deviation())

    A = fs.J.matrix
    add(8, max(_dev(fs.J.square() - eps * eye), _dev(A @ np.conj(G) - eps_pp * G @ A)))

    if quantifier == "basis":
        left, right = rb, fs.right_basis
    else:
        left, right = rg, fs.right_generators
    dev = 0.0
    for ra in left:
        for rr in right:
            dev = max(dev, _dev(ra @ rr - rr @ ra))
    add(9, dev)

    add(10, _dev(D - D.conj().T))

    sign = -1 if s_even else 1
    add(11, _dev(D @ G - sign * G @ D))

    add(12, _dev(A @ np.conj(D) - eps_p * D @ A))

    dev = 0.0
    for ra in left:
        X = D @ ra - ra @ D
        for rr in right:
            dev = max(dev, _dev(X @ rr - rr @ X))
    add(13, dev)
    rep.notes["gamma_convention"] = fs.gamma_convention
    return rep


def _faithful(fs: FermionSpace, trials: int = 3) -> bool:
    """Sufficient test: the images rho(e_i) psi of random vectors are independent."""
    rng = np.random.default_rng(1234)
    dim = fs.Gamma.shape[0]
    cols = []
    for r in fs.rho_basis:
        vecs = []
        for _ in range(trials):
            psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            w = r @ psi
            vecs += [w.real, w.imag]
        cols.append(np.concatenate(vecs))
    M = np.stack(cols, axis=1)
    return np.linalg.matrix_rank(M) == fs.algebra.dim


# ---------------------------------------------------------------------------
# index


@dataclass(frozen=True)
class IndexResult:
    value: int
    kernel_dim: int
    ambiguous: bool
    min_abs_eigenvalue: float


def index(fs: FermionSpace) -> int:
    """tr Gamma for even s."""
    if fs.s % 2:
        raise ValueError("the index is defined for even s only")
    return int(round(np.trace(fs.Gamma).real))


def index_dirac(fs: FermionSpace, d, tol: float = KERNEL_TOL) -> IndexResult:
    """Trace of Gamma on the numerical kernel of D (|lambda| < tol)."""
    if fs.s % 2:
        raise ValueError("the index is defined for even s only")
    D = _as_matrix(d)
    w, v = np.linalg.eigh(D)
    absw = np.abs(w)
    ker = v[:, absw < tol]
    val = np.trace(ker.conj().T @ fs.Gamma @ ker).real if ker.shape[1] else 0.0
    ambiguous = bool(np.any((absw >= tol / 10) & (absw <= tol * 10)))
    return IndexResult(int(round(val)), ker.shape[1], ambiguous,
                       float(absw.min()) if absw.size else 0.0)


# ---------------------------------------------------------------------------
# Frobenius forms


@dataclass(frozen=True, eq=False)
class FrobeniusData:
    """A Frobenius form on the algebra and its inverse B = sum c_ij e_i (x) e_j."""

    algebra: AlgebraSpec
    form: np.ndarray  # phi on the real basis
    coeffs: np.ndarray  # c_ij
    x: np.ndarray | None = None

    def phi(self, a: np.ndarray) -> float:
        xa = a if self.x is None else self.x @ a
        return canonical_form(self.algebra, xa)

    @cached_property
    def pairs(self) -> list:
        """Nonzero (c, i, j) entries of B."""
        c = self.coeffs
        scale = np.max(np.abs(c), initial=0.0)
        idx = np.argwhere(np.abs(c) > 1e-14 * max(scale, 1.0))
        return [(float(c[i, j]), int(i), int(j)) for i, j in idx]

    @property
    def inverse_pairs(self) -> list:
        b = self.algebra.basis
        return [(c * b[i], b[j]) for c, i, j in self.pairs]

    def z(self) -> np.ndarray:
        return sum(BL @ BR for BL, BR in self.inverse_pairs)

    def check(self) -> Report:
        alg = self.algebra
        b = alg.basis
        rep = Report()
        dev = 0.0
        for a in b:
            left = sum(self.phi(a @ BL) * BR for BL, BR in self.inverse_pairs)
            right = sum(BL * self.phi(BR @ a) for BL, BR in self.inverse_pairs)
            dev = max(dev, _dev(left - a), _dev(right - a))
        rep.add("inverse", dev, DEFAULT_TOL, "sum phi(a B_L) B_R = a = sum B_L phi(B_R a)")
        rep.add("special", _dev(self.z() - np.eye(alg.N)), DEFAULT_TOL, "sum B_L B_R = 1")
        dev = max(abs(self.phi(e.conj().T) - self.phi(e)) for e in b)
        rep.add("star_invariant", dev, DEFAULT_TOL, "phi(a*) = phi(a)")
        G = _gram(self)
        rep.add("symmetric", _dev(G - G.T), DEFAULT_TOL, "phi(ab) = phi(ba)")
        return rep


def canonical_form(alg: AlgebraSpec, a: np.ndarray) -> float:
    """phi_0(a) = sum_i n_i dim(D_i) Re tr(a_i)."""
    return float(sum(s.weight * np.trace(blk).real for s, blk in alg.blocks(a)))


def _gram(frob: FrobeniusData) -> np.ndarray:
    b = frob.algebra.basis
    return np.array([[frob.phi(x @ y) for y in b] for x in b])


def canonical_frobenius(alg: AlgebraSpec, x: np.ndarray | None = None) -> FrobeniusData:
    """phi(a) = phi_0(x a) (x = 1 by default) with its inverse obtained from
    the Gram matrix G_ij = phi(e_i e_j): B = sum (G^-1)_ij e_i (x) e_j."""
    partial = FrobeniusData(alg, np.zeros(alg.dim), np.zeros((alg.dim, alg.dim)), x)
    form = np.array([partial.phi(e) for e in alg.basis])
    G = _gram(partial)
    coeffs = np.linalg.inv(G)
    return FrobeniusData(alg, form, coeffs, x)


def _require_special(frob: FrobeniusData):
    if _dev(frob.z() - np.eye(frob.algebra.N)) > 1e-10:
        raise ValueError("projectors need a special Frobenius form")


def project_right_commutant(fs: FermionSpace, frob: FrobeniusData, K) -> np.ndarray:
    """pi K = sum rho(B_L) K rho(B_R); commutes with the left action."""
    K = np.asarray(K, dtype=complex)
    rb = fs.rho_basis
    out = np.zeros_like(K)
    for c, i, j in frob.pairs:
        out += c * ((rb[i] @ K) @ rb[j])
    return out


def project_left_commutant(fs: FermionSpace, frob: FrobeniusData, K) -> np.ndarray:
    """pi' K = J pi(J^-1 K J) J^-1; commutes with the right action."""
    K = np.asarray(K, dtype=complex)
    rr = fs.right_basis
    out = np.zeros_like(K)
    for c, i, j in frob.pairs:
        out += c * ((rr[i] @ K) @ rr[j])
    return out


def theta_from_dirac(fs: FermionSpace, frob: FrobeniusData, d, check: bool = True,
                     tol: float = DEFAULT_TOL) -> np.ndarray:
    """theta = pi' D - (1/2) pi pi' D, so that D = theta + eps' J theta J^-1."""
    _require_special(frob)
    D = _as_matrix(d)
    if check:
        rep = check_axioms(fs, D, tol=max(tol, 1e-10))
        if not rep.passed:
            raise ValueError(f"input fails axioms {rep.failed()}")
    pD = project_left_commutant(fs, frob, D)
    return pD - 0.5 * project_right_commutant(fs, frob, pD)


def reconstruct_dirac(fs: FermionSpace, theta: np.ndarray) -> np.ndarray:
    return theta + fs.signs.epsilon_prime * fs.right(theta)


def theta_report(fs: FermionSpace, frob: FrobeniusData, theta: np.ndarray, d=None,
                 tol: float = DEFAULT_TOL) -> Report:
    """The three conditions on theta, the gauge condition, and the round trip."""
    rep = Report()
    G = fs.Gamma
    eps_p = fs.signs.epsilon_prime
    rep.add("hermitian", _dev(theta - theta.conj().T), tol, "theta* = theta")
    rep.add("right_commutant",
            max((_dev(theta @ r - r @ theta) for r in fs.right_generators), default=0.0), tol,
            "[theta, J rho(a) J^-1] = 0")
    sign = -1 if fs.s % 2 == 0 else 1
    rep.add("chirality", _dev(theta @ G - sign * G @ theta), tol,
            "theta Gamma = -+ Gamma theta")
    pt = project_right_commutant(fs, frob, theta)
    rep.add("gauge", _dev(pt - eps_p * fs.right(pt)), tol, "pi theta = eps' J (pi theta) J^-1")
    if d is not None:
        rep.add("round_trip", _dev(reconstruct_dirac(fs, theta) - _as_matrix(d)), tol,
                "D = theta + eps' J theta J^-1")
    return rep


def ambiguity_report(fs: FermionSpace, psi: np.ndarray, tol: float = DEFAULT_TOL) -> Report:
    """The five properties of the difference of two valid thetas."""
    rep = Report()
    G = fs.Gamma
    rep.add("hermitian", _dev(psi - psi.conj().T), tol)
    rep.add("left_commutant",
            max((_dev(psi @ r - r @ psi) for r in fs.rho_generators), default=0.0), tol)
    rep.add("right_commutant",
            max((_dev(psi @ r - r @ psi) for r in fs.right_generators), default=0.0), tol)
    sign = -1 if fs.s % 2 == 0 else 1
    rep.add("chirality", _dev(psi @ G - sign * G @ psi), tol)
    rep.add("antisymmetric", _dev(psi + fs.signs.epsilon_prime * fs.right(psi)), tol,
            "psi + eps' J psi J^-1 = 0")
    return rep


# ---------------------------------------------------------------------------
# transformations


def transformation_operator(fs: FermionSpace, g: np.ndarray, h: np.ndarray,
                            tol: float = 1e-10) -> sp.csr_array:
    """U(v (x) m) = h v (x) g m g*, after validating g and h."""
    if fs.layout is None or fs.clifford is None:
        raise ValueError("transformations need a fuzzy-type fermion space")
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    cm = fs.clifford
    if _dev(h @ cm.chirality - cm.chirality @ h) > tol:
        raise ValueError("h must commute with the chirality operator")
    Cm = cm.real_structure.matrix
    if _dev(h @ Cm - Cm @ np.conj(h)) > tol:
        raise ValueError("h must commute with the real structure")
    if _dev(h.conj().T @ h - np.eye(h.shape[0])) > tol:
        raise ValueError("h must be unitary")
    if _dev(g.conj().T @ g - np.eye(g.shape[0])) > tol:
        raise ValueError("g must be unitary")
    if fs.algebra.span_residual([g]) > tol:
        raise ValueError("g must be an element of the algebra")
    full = sp.kron(sp.csr_array(h), sp.csr_array(np.kron(g, np.conj(g))), format="csr")
    return fs.layout.restrict(full)


def apply_transformation(fs: FermionSpace, d, g, h) -> DiracOperator:
    """U D U^-1; term data maps as omega -> h omega h^-1 and K -> g K g^-1."""
    U = transformation_operator(fs, g, h)
    D = _as_matrix(d)
    Dn = U @ (U @ D.conj().T).conj().T  # U D U*
    terms = ()
    if isinstance(d, DiracOperator) and d.terms:
        from .fuzzy import transform_term

        g = np.asarray(g, dtype=complex)
        h = np.asarray(h, dtype=complex)
        terms = tuple(transform_term(t, fs.clifford, g, h) for t in d.terms)
    return DiracOperator(np.asarray(Dn), terms)


def modified_dirac(fs: FermionSpace, d) -> DiracOperator:
    """-i Gamma D; a Dirac operator only for s = 2, 6."""
    if fs.s not in (2, 6):
        raise ValueError(f"chiral rotation is not a transformation for s={fs.s}")
    return DiracOperator(-1j * fs.Gamma @ _as_matrix(d))


def chiral_rotation(fs: FermionSpace) -> np.ndarray:
    """R = exp(-i pi Gamma / 4)."""
    from scipy.linalg import expm

    if fs.s % 2:
        raise ValueError("chiral rotation needs even s")
    return expm(-0.25j * np.pi * fs.Gamma)


def mutated(fs: FermionSpace, **changes) -> FermionSpace:
    """Copy of ``fs`` with fields replaced (for building defective fixtures)."""
    return replace(fs, **changes)
