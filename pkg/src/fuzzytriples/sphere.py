"""The fuzzy sphere, the generalised fuzzy sphere, their Grosse-Presnajder
blocks, and closed-form spectra for them and their commutative analogues.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np
from scipy.linalg import expm

from .antilinear import AntilinearOp
from .clifford import CliffordModule, base_module, chirality_from_gammas, product_odd
from .fuzzy import DiracTerm, assemble_dirac, fuzzy_fermion_space, gen_fuzzy_fermion_space
from .report import Report
from .triple import DiracOperator, FermionSpace

AGGREGATION_TOL = 1e-7

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
# type (0,3) gamma matrices: i times the Pauli matrices
SIGMA = tuple(1j * p for p in PAULI)
PAIRS = ((0, 1), (0, 2), (1, 2))  # (j, k) with j < k, 0-based


# ---------------------------------------------------------------------------
# so(3)


def spin_matrices(n: int):
    """Standard angular momentum matrices J1, J2, J3 for spin (n-1)/2."""
    l = (n - 1) / 2
    m = l - np.arange(n)  # l, l-1, ..., -l
    Jp = np.zeros((n, n), dtype=complex)
    for a in range(1, n):
        Jp[a - 1, a] = np.sqrt((l - m[a]) * (l + m[a] + 1))
    Jm = Jp.conj().T
    return (Jp + Jm) / 2, (Jp - Jm) / 2j, np.diag(m).astype(complex)


@dataclass(frozen=True, eq=False)
class So3Rep:
    """Anti-Hermitian generators L_jk (j < k) of so(3) on C^n."""

    n: int
    L: dict  # (j, k) -> matrix, 0-based with j < k

    def __getitem__(self, jk) -> np.ndarray:
        j, k = jk
        if j == k:
            return np.zeros((self.n, self.n), dtype=complex)
        if j < k:
            return self.L[(j, k)]
        return -self.L[(k, j)]

    def casimir(self) -> np.ndarray:
        return -sum(self.L[p] @ self.L[p] for p in PAIRS)

    def bracket_deviation(self) -> float:
        dev = 0.0
        idx = range(3)
        d = lambda a, b: 1.0 if a == b else 0.0
        for j in idx:
            for k in idx:
                for l in idx:
                    for m in idx:
                        lhs = self[j, k] @ self[l, m] - self[l, m] @ self[j, k]
                        rhs = (d(k, l) * self[j, m] - d(k, m) * self[j, l]
                               - d(j, l) * self[k, m] + d(j, m) * self[k, l])
                        dev = max(dev, float(np.max(np.abs(lhs - rhs), initial=0.0)))
        return dev

    def group_element(self, t) -> np.ndarray:
        """exp(sum t_jk L_jk) for the three pairs in PAIRS order."""
        return expm(sum(c * self.L[p] for c, p in zip(t, PAIRS)))


def so3_irrep(n: int) -> So3Rep:
    """L_12 = i J3, L_23 = i J1, L_31 = i J2 on the spin (n-1)/2 irreducible."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    J1, J2, J3 = spin_matrices(n)
    return So3Rep(n, {(0, 1): 1j * J3, (1, 2): 1j * J1, (0, 2): -1j * J2})


def spin_generators() -> So3Rep:
    """s_jk = -(1/4)[sigma^j, sigma^k] on C^2."""
    L = {(j, k): -0.25 * (SIGMA[j] @ SIGMA[k] - SIGMA[k] @ SIGMA[j]) for j, k in PAIRS}
    return So3Rep(2, L)


# ---------------------------------------------------------------------------
# Clifford module and operators


def type03_module() -> CliffordModule:
    """Type (0,3) with gammas i*Pauli and C v = [[0,1],[-1,0]] conj(v)."""
    chir = chirality_from_gammas(SIGMA, 3, 2)
    C = AntilinearOp(np.array([[0, 1], [-1, 0]], dtype=complex))
    return CliffordModule(0, 3, SIGMA, chir, C)


def sphere_module() -> CliffordModule:
    """Type (1,3) module (1,0) . (0,3); gammas[0] is gamma^0, gammas[a] is gamma^a."""
    return product_odd(base_module(1, 0), type03_module())


def _adjoint(L: np.ndarray) -> np.ndarray:
    """m -> [L, m] on row-major vectorised n x n matrices."""
    n = L.shape[0]
    return np.kron(L, np.eye(n)) - np.kron(np.eye(n), L.T)


def _bimodule(L1: np.ndarray, L2: np.ndarray) -> np.ndarray:
    """m -> L1 m - m L2 on row-major n1 x n2 matrices."""
    n1, n2 = L1.shape[0], L2.shape[0]
    return np.kron(L1, np.eye(n2)) - np.kron(np.eye(n1), L2.T)


def _gp_from_lambda(lam: dict, size: int) -> np.ndarray:
    out = np.eye(2 * size, dtype=complex)
    for j, k in PAIRS:
        out += np.kron(SIGMA[j] @ SIGMA[k], lam[(j, k)])
    return out


def grosse_presnajder(n: int) -> np.ndarray:
    """d = 1 + sum_{j<k} sigma^j sigma^k (x) [L_jk, .] on C^2 (x) M(n, C)."""
    rep = so3_irrep(n)
    return _gp_from_lambda({p: _adjoint(rep.L[p]) for p in PAIRS}, n * n)


def gen_grosse_presnajder(n1: int, n2: int) -> np.ndarray:
    """d_1 on C^2 (x) M(n1, n2, C), with m -> L_(1) m - m L_(2)."""
    r1, r2 = so3_irrep(n1), so3_irrep(n2)
    return _gp_from_lambda({p: _bimodule(r1.L[p], r2.L[p]) for p in PAIRS}, n1 * n2)


def gp_real_structure(n1: int, n2: int | None = None) -> AntilinearOp:
    """J' = C' (x) * mapping C^2 (x) M(n1, n2) to C^2 (x) M(n2, n1)."""
    n2 = n1 if n2 is None else n2
    T = np.zeros((n1 * n2, n1 * n2))
    for i in range(n1):
        for j in range(n2):
            T[j * n1 + i, i * n2 + j] = 1
    return AntilinearOp(np.kron(type03_module().real_structure.matrix, T))


def sphere_terms(rep1: So3Rep, rep2: So3Rep | None = None) -> list:
    """gamma^0 (x) {1/2, .} and gamma^0 gamma^j gamma^k (x) [L_jk, .]."""
    if rep2 is None:
        terms = [DiracTerm((0,), 0.5 * np.eye(rep1.n))]
        terms += [DiracTerm((0, j + 1, k + 1), rep1.L[(j, k)]) for j, k in PAIRS]
    else:
        terms = [DiracTerm((0,), (0.5 * np.eye(rep1.n), 0.5 * np.eye(rep2.n)))]
        terms += [DiracTerm((0, j + 1, k + 1), (rep1.L[(j, k)], rep2.L[(j, k)]))
                  for j, k in PAIRS]
    return terms


def fuzzy_sphere_dirac(n: int, algebra_kind: str = "complex"):
    """(fermion space, D) for the type (1,3) fuzzy sphere on C^4 (x) M(n, C)."""
    fs = fuzzy_fermion_space(sphere_module(), n, algebra_kind)
    return fs, assemble_dirac(fs, sphere_terms(so3_irrep(n)))


def gen_fuzzy_sphere_dirac(n1: int, n2: int):
    """(fermion space, D) for the generalised fuzzy sphere; D = diag(D1, D2)."""
    fs = gen_fuzzy_fermion_space(sphere_module(), n1, n2)
    return fs, assemble_dirac(fs, sphere_terms(so3_irrep(n1), so3_irrep(n2)))


def dirac_blocks(d: DiracOperator, n1: int, n2: int):
    """(D1, D2) of a generalised fuzzy sphere operator."""
    h = 4 * n1 * n2
    D = d.matrix
    return D[:h, :h], D[h:, h:]


def spinor_rotation(t) -> np.ndarray:
    """h = exp(sum t_jk S_jk) on C^4 with S_jk = diag(s_jk, s_jk)."""
    s = spin_generators()
    return expm(sum(c * np.kron(np.eye(2), s.L[p]) for c, p in zip(t, PAIRS)))


def w_matrix(size: int) -> np.ndarray:
    """W = (1/sqrt 2) [[1, 1], [-1, 1]] with blocks of the given size."""
    return np.kron(np.array([[1, 1], [-1, 1]]) / np.sqrt(2), np.eye(size))


def w_block_report(D: np.ndarray, Gamma: np.ndarray, gamma0: np.ndarray,
                   dtilde: np.ndarray, tol: float = 1e-12) -> Report:
    """W D W^-1 = diag(d, -d), W gamma^0 W^-1 = diag(1, -1), and the compression of
    W Gamma W^-1 to the gamma^0 = +1 block vanishes. Matrices act on C^4 (x) X
    with the spinor index outermost."""
    size = dtilde.shape[0]
    W = w_matrix(size)
    X = W @ D @ W.T
    G = W @ Gamma @ W.T
    g0 = W @ gamma0 @ W.T
    rep = Report()
    rep.add("top_block", np.max(np.abs(X[:size, :size] - dtilde)), tol, "top-left block is d")
    rep.add("bottom_block", np.max(np.abs(X[size:, size:] + dtilde)), tol, "bottom-right is -d")
    off = max(np.max(np.abs(X[:size, size:])), np.max(np.abs(X[size:, :size])))
    rep.add("off_diagonal", off, tol, "off-diagonal blocks vanish")
    rep.add("gamma0_diagonal", np.max(np.abs(g0 - np.diag(np.repeat([1.0, -1.0], size)))), tol,
            "W gamma^0 W^-1 = diag(1, -1)")
    rep.add("chirality_compression", np.max(np.abs(G[:size, :size])), tol,
            "Gamma compressed to gamma^0 = +1 vanishes")
    return rep


def fuzzy_w_report(n: int, tol: float = 1e-12) -> Report:
    fs, d = fuzzy_sphere_dirac(n)
    g0 = np.kron(fs.clifford.gammas[0], np.eye(n * n))
    return w_block_report(d.matrix, fs.Gamma, g0, grosse_presnajder(n), tol)


def gen_w_report(n1: int, n2: int, tol: float = 1e-12) -> Report:
    """The same identities on the first matrix block D1."""
    fs, d = gen_fuzzy_sphere_dirac(n1, n2)
    h = 4 * n1 * n2
    g0 = np.kron(fs.clifford.gammas[0], np.eye(n1 * n2))
    return w_block_report(d.matrix[:h, :h], fs.Gamma[:h, :h], g0,
                          gen_grosse_presnajder(n1, n2), tol)


# ---------------------------------------------------------------------------
# Casimir identity


def casimir_check(n1: int, n2: int | None = None, tol: float = 1e-12) -> Report:
    """d = c - c1 - c2 + 1 for the Grosse-Presnajder operator (or its
    generalised block when n2 is given)."""
    spin = spin_generators()
    r1 = so3_irrep(n1)
    if n2 is None:
        lam = {p: _adjoint(r1.L[p]) for p in PAIRS}
        size = n1 * n1
        d = grosse_presnajder(n1)
    else:
        r2 = so3_irrep(n2)
        lam = {p: _bimodule(r1.L[p], r2.L[p]) for p in PAIRS}
        size = n1 * n2
        d = gen_grosse_presnajder(n1, n2)
    one_s, one_m = np.eye(2), np.eye(size)
    S = {p: np.kron(spin.L[p], one_m) for p in PAIRS}
    Lm = {p: np.kron(one_s, lam[p]) for p in PAIRS}
    c1 = -sum(S[p] @ S[p] for p in PAIRS)
    c2 = -sum(Lm[p] @ Lm[p] for p in PAIRS)
    c = -sum((S[p] + Lm[p]) @ (S[p] + Lm[p]) for p in PAIRS)
    dot = sum(S[p] @ Lm[p] for p in PAIRS)
    eye = np.eye(2 * size)
    rep = Report()
    rep.add("casimir_identity", np.max(np.abs(d - (c - c1 - c2 + eye))), tol,
            "d = c - c1 - c2 + 1")
    rep.add("spin_dot_form", np.max(np.abs(d - (-2 * dot + eye))), tol, "d = -2 s.Lambda + 1")
    rep.add("c1_value", np.max(np.abs(c1 - 0.75 * eye)), tol, "c1 = 3/4")
    rep.notes["c1"] = 0.75
    return rep


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class Spectrum:
    """Sorted (value, multiplicity) pairs."""

    entries: tuple
    aggregation_tol: float = AGGREGATION_TOL
    kind: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_eigenvalues(cls, eig, tol: float = AGGREGATION_TOL, **kw) -> "Spectrum":
        eig = np.sort(np.asarray(eig, dtype=float))
        entries = []
        group = []
        for x in eig:
            if group and x - group[-1] > tol:
                entries.append((float(np.mean(group)), len(group)))
                group = []
            group.append(x)
        if group:
            entries.append((float(np.mean(group)), len(group)))
        return cls(tuple(entries), tol, **kw)

    @classmethod
    def from_pairs(cls, pairs, **kw) -> "Spectrum":
        """Exact (value, multiplicity) pairs; equal values are merged."""
        acc = {}
        for v, m in pairs:
            if m > 0:
                acc[v] = acc.get(v, 0) + m
        return cls(tuple((v, acc[v]) for v in sorted(acc)), **kw)

    @classmethod
    def of(cls, matrix, tol: float = AGGREGATION_TOL, **kw) -> "Spectrum":
        return cls.from_eigenvalues(np.linalg.eigvalsh(matrix), tol, **kw)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def values(self) -> list:
        return [float(v) for v, _ in self.entries]

    def negated(self) -> "Spectrum":
        return Spectrum.from_pairs([(-v, m) for v, m in self.entries], kind=self.kind)

    def union(self, other: "Spectrum") -> "Spectrum":
        return Spectrum.from_pairs(list(self.entries) + list(other.entries), kind=self.kind)

    def times(self, k: int) -> "Spectrum":
        return Spectrum.from_pairs([(v, k * m) for v, m in self.entries], kind=self.kind)

    def is_symmetric(self, tol: float = 1e-9) -> bool:
        return self.matches(self.negated(), tol)

    def matches(self, other: "Spectrum", tol: float = 1e-9) -> bool:
        if len(self.entries) != len(other.entries):
            return False
        return all(abs(float(a) - float(b)) <= tol and m == k
                   for (a, m), (b, k) in zip(self.entries, other.entries))

    def max_value_deviation(self, other: "Spectrum") -> float:
        if len(self.entries) != len(other.entries):
            return float("inf")
        return max((abs(float(a) - float(b)) for (a, _), (b, _) in
                    zip(self.entries, other.entries)), default=0.0)

    def to_dict(self) -> dict:
        d = {"kind": self.kind,
             "entries": [{"value": _num(v), "multiplicity": int(m)} for v, m in self.entries],
             "total_dim": self.total}
        d.update(self.meta)
        return d

    def to_csv(self) -> str:
        """Rows ``value,multiplicity`` (exact values written as fractions)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "multiplicity"])
        for v, m in self.entries:
            w.writerow([str(v), int(m)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, **kw) -> "Spectrum":
        rows = list(csv.DictReader(io.StringIO(text)))
        pairs = []
        for r in rows:
            raw = r["value"]
            v = float(raw) if any(c in raw for c in ".en") else Fraction(raw)
            pairs.append((v, int(r["multiplicity"])))
        return cls.from_pairs(pairs, **kw)


def _num(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    return float(v)


def predicted_gp_spectrum(n: int) -> Spectrum:
    """d: +k (mult 2k) for k = 1..n and -k (mult 2k) for k = 1..n-1."""
    pairs = [(Fraction(k), 2 * k) for k in range(1, n + 1)]
    pairs += [(Fraction(-k), 2 * k) for k in range(1, n)]
    return Spectrum.from_pairs(pairs, kind="fuzzy")


def predicted_fuzzy_spectrum(n: int) -> Spectrum:
    """D: +-k with multiplicity 4k for k < n and 2n for k = n."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    pairs = []
    for k in range(1, n + 1):
        mult = 4 * k if k < n else 2 * n
        pairs += [(Fraction(k), mult), (Fraction(-k), mult)]
    return Spectrum.from_pairs(pairs, kind="fuzzy", meta={"type": [1, 3], "n": n})


def _gen_block_pairs(m: Fraction, top: Fraction) -> list:
    """d_1 for half-difference m and half-sum top: -m and -+v up to v = top - 1, then +top."""
    pairs = []
    v = m
    while v <= top:
        mult = int(2 * v)
        if v > m:
            pairs.append((v, mult))
        if v < top and v > 0:
            pairs.append((-v, mult))
        v += 1
    return pairs


def predicted_gen_gp_spectrum(n1: int, n2: int) -> Spectrum:
    m = Fraction(abs(n1 - n2), 2)
    top = Fraction(n1 + n2, 2)
    return Spectrum.from_pairs(_gen_block_pairs(m, top), kind="generalised")


def predicted_gen_spectrum(n1: int, n2: int, block: bool = False) -> Spectrum:
    """Spectrum of D (or of D1 when ``block``) for the generalised fuzzy sphere.

    D1 carries -+m (mult 2m), -+v (mult 4v) for m < v < (n1+n2)/2 and
    -+(n1+n2)/2 (mult n1+n2); D = D1 + D2 doubles every multiplicity.
    """
    d1 = predicted_gen_gp_spectrum(n1, n2)
    s = d1.union(d1.negated())
    s = s if block else s.times(2)
    return Spectrum(s.entries, kind="generalised", meta={"type": [1, 3], "n": [n1, n2]})


def commutative_sphere_spectrum(r_max: int) -> Spectrum:
    """+-(r+1) with multiplicity 2(r+1) for r = 0..r_max."""
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    pairs = []
    for r in range(r_max + 1):
        pairs += [(Fraction(r + 1), 2 * (r + 1)), (Fraction(-(r + 1)), 2 * (r + 1))]
    return Spectrum.from_pairs(pairs, kind="commutative", meta={"r_max": r_max})


def monopole_spectrum(kappa: int, r_max: int) -> Spectrum:
    """0 (mult |kappa|) and +-sqrt(r(r+|kappa|)) (mult |kappa| + 2r), r = 1..r_max."""
    if kappa == 0:
        raise ValueError("kappa must be nonzero; use commutative_sphere_spectrum")
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    a = abs(kappa)
    pairs = [(0.0, a)]
    exact = [{"r": 0, "lambda_squared": 0, "multiplicity": a}]
    for r in range(1, r_max + 1):
        lam2 = r * (r + a)
        pairs += [(float(np.sqrt(lam2)), a + 2 * r), (-float(np.sqrt(lam2)), a + 2 * r)]
        exact.append({"r": r, "lambda_squared": lam2, "multiplicity": a + 2 * r})
    return Spectrum.from_pairs(pairs, kind="monopole",
                               meta={"kappa": kappa, "index": -kappa, "exact": exact})


def monopole_relation(kappa: int, r: int) -> bool:
    """lambda^2 + kappa^2/4 = (j + 1/2)^2 with j = |kappa|/2 - 1/2 + r, exactly."""
    lam2 = Fraction(r * (r + abs(kappa)))
    j = Fraction(abs(kappa), 2) - Fraction(1, 2) + r
    return lam2 + Fraction(kappa * kappa, 4) == (j + Fraction(1, 2)) ** 2


def mass_mixed_spectrum(kappa: int, top: Fraction) -> Spectrum:
    """Doubled monopole with mass term kappa/2: +-(j + 1/2) on spin j.

    The zero modes of the two copies pair into a single spin |kappa|/2 - 1/2
    multiplet for each sign. Above that every spin appears twice per sign,
    except at the cut-off j + 1/2 = top, where only one copy survives.
    """
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    top = Fraction(top)
    a = Fraction(abs(kappa), 2)
    pairs = []
    v = a
    while v <= top:
        copies = 1 if v in (a, top) else 2
        mult = copies * int(2 * v)  # each copy is spin j = v - 1/2
        pairs += [(v, mult), (-v, mult)]
        v += 1
    return Spectrum.from_pairs(pairs, kind="mass-mixed", meta={"kappa": kappa})


def identify_kappa_m(kappa: int, top: Fraction) -> dict:
    """Which of m = |kappa|/2 and m = |kappa| makes the mass-mixed spectrum
    equal the D1 block of the generalised fuzzy sphere."""
    mixed = mass_mixed_spectrum(kappa, top)
    out = {}
    for label, m in (("|kappa|/2", Fraction(abs(kappa), 2)), ("|kappa|", Fraction(abs(kappa)))):
        if m >= top:
            out[label] = False
            continue
        d1 = Spectrum.from_pairs(_gen_block_pairs(m, Fraction(top)))
        out[label] = mixed.matches(d1.union(d1.negated()))
    return out


def integer_check(spec: Spectrum, tol: float = 1e-9) -> float:
    """Largest distance of an eigenvalue from the nearest half-integer multiple."""
    return max((abs(2 * v - round(2 * v)) / 2 for v in spec.values), default=0.0)


def exact_square(x: int) -> bool:
    return x >= 0 and isqrt(x) ** 2 == x
