"""Fuzzy and generalised fuzzy fermion spaces, Dirac operators built from
(omega, K) term data, and a basis of the space of Dirac operators.

Vectorisation convention: H sits inside V (x) M(N, C) with the spinor index
outermost and matrices flattened row-major, so v (x) m has coordinate
(alpha, i, j). Left multiplication by a is kron(1_V, kron(a, 1)); the map
m -> m* is the transpose permutation composed with conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .algebra import AlgebraSpec, unit
from .antilinear import AntilinearOp
from .clifford import CliffordModule
from .triple import DiracOperator, FermionSpace, Layout, _dev

ORACLE_MAX_DIM = 64
RANK_RTOL = 1e-9


def _irreducible_dim(cm: CliffordModule) -> int:
    return 2 ** (cm.n // 2)


def _transpose_perm(N: int) -> np.ndarray:
    T = np.zeros((N * N, N * N))
    for i in range(N):
        for j in range(N):
            T[i * N + j, j * N + i] = 1
    return T


def _matrix_fermion_space(cm: CliffordModule, alg: AlgebraSpec, layout: Layout) -> FermionSpace:
    if cm.real_structure is None:
        raise ValueError("the Clifford module needs a real structure")
    if cm.dim_v != _irreducible_dim(cm):
        raise ValueError("the Clifford module must be irreducible")
    k, N = layout.spinor_dim, layout.N
    eye_k = sp.identity(k, format="csr")
    eye_N = sp.identity(N, format="csr")

    def rho(a):
        return layout.restrict(sp.kron(eye_k, sp.kron(sp.csr_array(a), eye_N)))

    Gamma = layout.restrict_dense(np.kron(cm.chirality, np.eye(N * N)))
    J = AntilinearOp(layout.restrict_dense(np.kron(cm.real_structure.matrix, _transpose_perm(N))))
    dim = Gamma.shape[0]
    if cm.s % 2:
        sign = "+1" if np.allclose(Gamma, np.eye(dim)) else "-1"
        convention = f"Gamma={sign}"
    else:
        convention = "Gamma=gamma(x)1"
    return FermionSpace(s=cm.s, algebra=alg, rho=rho, Gamma=Gamma, J=J, hilbert_dim=dim,
                        clifford=cm, layout=layout, gamma_convention=convention)


def fuzzy_fermion_space(cm: CliffordModule, n: int, algebra_kind: str = "complex") -> FermionSpace:
    """H = V (x) M(n, C) with A = M(n, C), M(n, R) or M(n/2, H) acting on the left."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    alg = AlgebraSpec.simple(algebra_kind, n)
    return _matrix_fermion_space(cm, alg, Layout(cm.dim_v, n))


def offdiagonal_selection(k: int, n1: int, n2: int) -> np.ndarray:
    """Indices of V (x) (M(n1,n2) + M(n2,n1)) inside V (x) M(n1+n2); block 1 first."""
    N = n1 + n2
    block1 = [a * N * N + i * N + j for a in range(k) for i in range(n1) for j in range(n1, N)]
    block2 = [a * N * N + i * N + j for a in range(k) for i in range(n1, N) for j in range(n1)]
    return np.array(block1 + block2, dtype=int)


def gen_fuzzy_fermion_space(cm: CliffordModule, n1: int, n2: int,
                            kinds=("complex", "complex")) -> FermionSpace:
    """H = V (x) (M(n1,n2,C) + M(n2,n1,C)) with A = A_1 + A_2 block diagonal."""
    if n1 < 1 or n2 < 1:
        raise ValueError("n1 and n2 must be positive integers")
    alg = AlgebraSpec.direct_sum([(kinds[0], n1), (kinds[1], n2)])
    sel = offdiagonal_selection(cm.dim_v, n1, n2)
    return _matrix_fermion_space(cm, alg, Layout(cm.dim_v, n1 + n2, sel))


def is_generalised(fs: FermionSpace) -> bool:
    return fs.layout is not None and fs.layout.sel is not None


# ---------------------------------------------------------------------------
# Dirac operators from term data


def _hermiticity(m: np.ndarray, tol: float = 1e-12) -> int:
    """+1 Hermitian, -1 anti-Hermitian, 0 neither (a zero matrix counts as both)."""
    if _dev(m - m.conj().T) <= tol:
        return 1
    if _dev(m + m.conj().T) <= tol:
        return -1
    return 0


@dataclass(frozen=True, eq=False)
class DiracTerm:
    """One term omega (x) K of theta.

    ``word`` lists gamma indices (0-based) whose ordered product is omega;
    ``omega`` overrides the word with an explicit matrix (for instance after a
    transformation). ``K`` is an N x N matrix, or a pair (K1, K2) of diagonal
    blocks for a generalised fuzzy space.
    """

    word: tuple
    K: object
    omega_matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(i) for i in self.word))

    def omega(self, cm: CliffordModule) -> np.ndarray:
        if self.omega_matrix is not None:
            return np.asarray(self.omega_matrix, dtype=complex)
        return cm.word(self.word)

    def K_matrix(self) -> np.ndarray:
        if isinstance(self.K, (tuple, list)):
            K1, K2 = (np.atleast_2d(np.asarray(x, dtype=complex)) for x in self.K)
            n1, n2 = K1.shape[0], K2.shape[0]
            out = np.zeros((n1 + n2, n1 + n2), dtype=complex)
            out[:n1, :n1] = K1
            out[n1:, n1:] = K2
            return out
        return np.atleast_2d(np.asarray(self.K, dtype=complex))

    def flavor(self, epsilon_prime: int) -> str:
        """'commutator' or 'anticommutator': how K acts on m in D."""
        K = self.K_matrix()
        herm = _hermiticity(K)
        odd = len(self.word) % 2 == 1 if self.omega_matrix is None else True
        sigma = 1 if odd else epsilon_prime
        # K m + sigma m K*: anti-Hermitian K with sigma = 1 gives [K, m]
        if herm == -1:
            return "commutator" if sigma == 1 else "anticommutator"
        return "anticommutator" if sigma == 1 else "commutator"

    def to_dict(self, epsilon_prime: int | None = None) -> dict:
        """{omega: [indices], flavor, K: {re, im}}; K1/K2 for block pairs."""
        d = {"omega": list(self.word)}
        if epsilon_prime is not None:
            d["flavor"] = self.flavor(epsilon_prime)
        if isinstance(self.K, (tuple, list)):
            d["K1"] = _re_im(self.K[0])
            d["K2"] = _re_im(self.K[1])
        else:
            d["K"] = _re_im(self.K_matrix())
        if self.omega_matrix is not None:
            d["omega_matrix"] = _re_im(self.omega_matrix)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DiracTerm":
        if "K1" in d:
            K = (_from_re_im(d["K1"]), _from_re_im(d["K2"]))
        else:
            K = _from_re_im(d["K"])
        omega = _from_re_im(d["omega_matrix"]) if "omega_matrix" in d else None
        return cls(tuple(d.get("omega", ())), K, omega)


def _re_im(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _from_re_im(d) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def transform_term(term: DiracTerm, cm: CliffordModule, g: np.ndarray, h: np.ndarray) -> DiracTerm:
    """omega -> h omega h^-1 and K -> g K g^-1."""
    omega = h @ term.omega(cm) @ np.linalg.inv(h)
    gi = np.linalg.inv(g)
    if isinstance(term.K, (tuple, list)):
        n1 = np.atleast_2d(term.K[0]).shape[0]
        K = g @ term.K_matrix() @ gi
        return DiracTerm(term.word, (K[:n1, :n1], K[n1:, n1:]), omega)
    return DiracTerm(term.word, g @ term.K_matrix() @ gi, omega)


def _validate_term(fs: FermionSpace, term: DiracTerm, omega: np.ndarray, K: np.ndarray):
    N = fs.layout.N
    if K.shape != (N, N):
        raise ValueError(f"K has shape {K.shape}, expected {(N, N)}")
    if is_generalised(fs):
        n1 = fs.algebra.sizes[0]
        if _dev(K[:n1, n1:]) > 0 or _dev(K[n1:, :n1]) > 0:
            raise ValueError("K must be block diagonal on a generalised fuzzy space")
    wh, kh = _hermiticity(omega), _hermiticity(K)
    if wh == 0:
        raise ValueError("omega must be Hermitian or anti-Hermitian")
    if kh == 0 or (kh != wh and _dev(K) > 0):
        raise ValueError("K must be Hermitian exactly when omega is")
    gamma = fs.clifford.chirality
    if fs.s % 2 == 0 and _dev(omega @ gamma + gamma @ omega) > 1e-12:
        raise ValueError("for even s, omega must be an odd product of gamma matrices")


def assemble_dirac(fs: FermionSpace, terms) -> DiracOperator:
    """D = theta + eps' J theta J^-1 with theta = sum omega (x) K acting on the left.

    On v (x) m this is omega v (x) (K m + sigma m K*), where sigma = eps' for
    even omega and sigma = 1 for odd omega.
    """
    if fs.layout is None or fs.clifford is None:
        raise ValueError("assemble_dirac needs a fuzzy or generalised fuzzy space")
    terms = tuple(terms)
    cm, layout = fs.clifford, fs.layout
    N = layout.N
    eye_N = sp.identity(N, format="csr")
    theta = sp.csr_array((layout.full_dim, layout.full_dim), dtype=complex)
    for t in terms:
        omega, K = t.omega(cm), t.K_matrix()
        _validate_term(fs, t, omega, K)
        theta = theta + sp.kron(sp.csr_array(omega), sp.kron(sp.csr_array(K), eye_N))
    theta = layout.restrict(theta).toarray()
    D = theta + fs.signs.epsilon_prime * fs.right(theta)
    return DiracOperator(D, terms)


# ---------------------------------------------------------------------------
# the space of geometries


def hermitian_basis(n: int, anti: bool = False, traceless: bool = False) -> list:
    """E_kk, E_kl + E_lk, i(E_kl - E_lk); times i when ``anti``.

    ``traceless`` replaces the diagonal units by E_kk - E_(k+1)(k+1).
    """
    out = []
    if traceless:
        out += [unit(n, k, k) - unit(n, k + 1, k + 1) for k in range(n - 1)]
    else:
        out += [unit(n, k, k) for k in range(n)]
    for k in range(n):
        for l in range(k + 1, n):
            out.append(unit(n, k, l) + unit(n, l, k))
            out.append(1j * (unit(n, k, l) - unit(n, l, k)))
    if anti:
        out = [1j * m for m in out]
    return out


def odd_words(n: int) -> list:
    return [w for r in range(1, n + 1, 2) for w in combinations(range(n), r)]


@dataclass(frozen=True, eq=False)
class GeometryBasis:
    fermion_space: FermionSpace
    basis: list = field(default_factory=list)

    @property
    def dim_g(self) -> int:
        return len(self.basis)

    def rank(self, rtol: float = RANK_RTOL) -> int:
        if not self.basis:
            return 0
        M = np.stack([_realify(d.matrix) for d in self.basis], axis=1)
        return _rank(M, rtol)

    def export(self) -> list:
        """Basis matrices flattened row-major as {re, im} lists."""
        return [{"re": b.matrix.real.ravel().tolist(), "im": b.matrix.imag.ravel().tolist()}
                for b in self.basis]

    def combine(self, coeffs) -> DiracOperator:
        d = self.fermion_space.hilbert_dim
        D = np.zeros((d, d), dtype=complex)
        for c, b in zip(coeffs, self.basis):
            D += c * b.matrix
        return DiracOperator(D)


def geometry_terms(fs: FermionSpace) -> list:
    """Term data for a basis of the Dirac operators, gauge fixed.

    Only odd words are used: for even s they are required, and for odd s the
    scalar P turns every even word into an odd one. Odd words give
    K m + m K*, whose kernel is K = i1 (anti-Hermitian K only) on a fuzzy
    space, and i(1 + 1) or (1 - 1) on a generalised one. Those directions
    are removed by making the diagonal part of K (or of its second block)
    traceless.
    """
    cm = fs.clifford
    if cm is None or fs.layout is None:
        raise ValueError("geometry_basis needs a fuzzy or generalised fuzzy space")
    terms = []
    for w in odd_words(cm.n):
        anti = _hermiticity(cm.word(w)) == -1
        if is_generalised(fs):
            n1, n2 = fs.algebra.sizes
            for K1 in hermitian_basis(n1, anti):
                terms.append(DiracTerm(w, (K1, np.zeros((n2, n2), dtype=complex))))
            for K2 in hermitian_basis(n2, anti, traceless=True):
                terms.append(DiracTerm(w, (np.zeros((n1, n1), dtype=complex), K2)))
        else:
            for K in hermitian_basis(fs.layout.N, anti, traceless=anti):
                terms.append(DiracTerm(w, K))
    return terms


def geometry_basis(fs: FermionSpace) -> GeometryBasis:
    return GeometryBasis(fs, [assemble_dirac(fs, [t]) for t in geometry_terms(fs)])


# ---------------------------------------------------------------------------
# independent oracle


def _realify(m) -> np.ndarray:
    m = np.asarray(m)
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def _rank(M: np.ndarray, rtol: float) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0


def _null(M: np.ndarray, rtol: float, atol: float = 1e-10) -> np.ndarray:
    """Null space with a relative cutoff, plus an absolute floor so that a
    constraint that is zero up to rounding does not count as a constraint."""
    rows, cols = M.shape
    if rows == 0:
        return np.eye(cols)
    if rows > cols:
        M = np.linalg.qr(M, mode="r")
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    cut = max(rtol * (s[0] if s.size else 0.0), atol)
    rank = int(np.sum(s > cut))
    return vh[rank:].conj().T


def geometry_null_space(fs: FermionSpace, rtol: float = RANK_RTOL) -> list:
    """All Hermitian D satisfying axioms 11-13, as a list of matrices.

    The search space is the Hermitian matrices with the right Gamma parity;
    the real structure and the first-order condition over every pair of
    algebra generators are imposed one after another as real-linear null
    spaces. Nothing here uses the (omega, K) parametrisation.
    """
    d = fs.hilbert_dim
    if d > ORACLE_MAX_DIM:
        raise ValueError(f"oracle limited to hilbert_dim <= {ORACLE_MAX_DIM}, got {d}")
    w, Q = np.linalg.eigh(fs.Gamma)
    plus = np.where(w > 0)[0]
    minus = np.where(w < 0)[0]
    pairs = []
    if fs.s % 2 == 0:
        pairs = [(i, j) for i in plus for j in minus]
        diag = []
    else:
        blocks = [plus, minus]
        pairs = [(b[x], b[y]) for b in blocks for x in range(len(b)) for y in range(x + 1, len(b))]
        diag = [i for b in blocks for i in b]
    diag = np.asarray(diag, dtype=int)
    pi = np.asarray([i for i, _ in pairs], dtype=int)
    pj = np.asarray([j for _, j in pairs], dtype=int)
    nd, npairs = diag.size, pi.size
    if nd + npairs == 0:
        return []
    herm = np.zeros((nd + 2 * npairs, d, d), dtype=complex)
    herm[np.arange(nd), diag, diag] = 1
    re = nd + 2 * np.arange(npairs)
    c = 1 / np.sqrt(2)
    herm[re, pi, pj] = c
    herm[re, pj, pi] = c
    herm[re + 1, pi, pj] = 1j * c
    herm[re + 1, pj, pi] = -1j * c
    basis = Q @ herm @ Q.conj().T  # orthonormal for Re tr(X* Y)

    def constrain(basis, f):
        out = f(basis).reshape(basis.shape[0], -1)
        cols = np.concatenate([out.real, out.imag], axis=1).T
        ns = _null(cols, rtol)
        return np.tensordot(ns.T, basis, axes=1)

    # J D = eps' D J says D is fixed by T(D) = eps' A conj(D) A^-1, a real
    # orthogonal involution preserving this space: keep its +1 eigenspace.
    A = fs.J.matrix
    eps_p = fs.signs.epsilon_prime
    TB = eps_p * (A @ np.conj(basis) @ np.linalg.inv(A))
    m = basis.shape[0]
    flat = basis.reshape(m, -1)
    Tm = (flat.conj() @ TB.reshape(m, -1).T).real
    w, v = np.linalg.eigh((Tm + Tm.T) / 2)
    basis = np.tensordot(v[:, w > 0.5].T, basis, axes=1)
    gens = _oracle_generators(fs)
    rights = [fs.right(g) for g in gens]
    for r in gens:
        for R in rights:
            if basis.shape[0] == 0:
                return []
            M = _first_order_map(sp.csr_array(r), sp.csr_array(R))
            live = np.flatnonzero(np.diff(M.indptr))
            if live.size == 0:
                continue
            V = M[live] @ basis.reshape(basis.shape[0], -1).T
            ns = _null(np.concatenate([V.real, V.imag]), rtol)
            if ns.shape[1] < basis.shape[0]:
                basis = np.tensordot(ns.T, basis, axes=1)
    return list(basis)


def _oracle_generators(fs: FermionSpace) -> list:
    """A small set of rho-images whose pairs imply the first-order condition.

    The condition is complex-linear in a and antilinear in b, so it is enough
    that the set generates the algebra over C. For complex summands we use the
    block units together with E_11 and the cyclic shift of each block, whose
    products give every matrix unit; other kinds fall back to the stored
    generators.
    """
    alg = fs.algebra
    if any(s.kind != "complex" for s in alg.summands):
        return list(fs.rho_generators)
    N = alg.N
    shift = np.zeros((N, N), dtype=complex)
    mats = []
    offset = 0
    for s in alg.summands:
        n = s.size
        for k in range(n):
            shift[offset + (k + 1) % n, offset + k] = 1
        mats.append(unit(N, offset, offset))
        if len(alg.summands) > 1:
            block = np.zeros((N, N), dtype=complex)
            block[offset:offset + n, offset:offset + n] = np.eye(n)
            mats.append(block)
        offset += n
    mats.append(shift)
    return [sp.csr_array(fs.rho(m)) for m in mats]


def _first_order_map(r, R):
    """Matrix of D -> [[D, r], R] on row-major vec(D), using vec(A D B) = (A (x) B^T) vec(D)."""
    eye = sp.identity(r.shape[0], format="csr")
    M = sp.csr_array(sp.kron(eye, (r @ R).T) - sp.kron(r, R.T)
                     - sp.kron(R, r.T) + sp.kron(R @ r, eye))
    M.eliminate_zeros()
    return M


def geometry_dim_oracle(fs: FermionSpace, rtol: float = RANK_RTOL) -> int:
    return len(geometry_null_space(fs, rtol))
