"""Irreducible Clifford modules of type (p, q) and their products.

A module carries its gamma matrices, the chirality operator and an antilinear
real structure. Larger modules are assembled from the n <= 2 base modules with
the two product operations ``product_even`` (left factor with even s) and
``product_odd`` (both factors with odd s).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

import numpy as np

from .antilinear import AntilinearOp
from .report import Report

I = 1j


class SignTriple(NamedTuple):
    epsilon: int
    epsilon_prime: int
    epsilon_double_prime: int


_SIGNS = {
    0: SignTriple(1, 1, 1),
    1: SignTriple(1, -1, 1),
    2: SignTriple(-1, 1, -1),
    3: SignTriple(-1, 1, 1),
    4: SignTriple(-1, 1, 1),
    5: SignTriple(-1, -1, 1),
    6: SignTriple(1, 1, -1),
    7: SignTriple(1, 1, 1),
}

DIVISION_ALGEBRA = {0: "R", 1: "C", 2: "H", 3: "H", 4: "H", 5: "C", 6: "R", 7: "R"}


def sign_table(s: int) -> SignTriple:
    """(epsilon, epsilon', epsilon'') for KO-dimension ``s`` (reduced mod 8)."""
    return _SIGNS[int(s) % 8]


def i_power(k: int) -> complex:
    """Exact ``i**k``."""
    return (1, I, -1, -I)[k % 4]


def ordered_product(mats, dim: int) -> np.ndarray:
    return reduce(np.matmul, mats, np.eye(dim, dtype=complex))


@dataclass(frozen=True, eq=False)
class CliffordModule:
    p: int
    q: int
    gammas: tuple
    chirality: np.ndarray
    real_structure: AntilinearOp

    def __post_init__(self):
        object.__setattr__(
            self, "gammas", tuple(np.asarray(g, dtype=complex) for g in self.gammas)
        )
        object.__setattr__(self, "chirality", np.asarray(self.chirality, dtype=complex))
        if len(self.gammas) != self.p + self.q:
            raise ValueError("number of gamma matrices must equal p + q")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def s(self) -> int:
        return (self.q - self.p) % 8

    @property
    def dim_v(self) -> int:
        return self.chirality.shape[0]

    @property
    def signs(self) -> SignTriple:
        return sign_table(self.s)

    @property
    def eta(self) -> np.ndarray:
        """Diagonal of the metric, read off from the squares of the generators."""
        return np.array([np.real(g @ g)[0, 0] for g in self.gammas])

    def P(self) -> np.ndarray:
        """Ordered product of all generators."""
        return ordered_product(self.gammas, self.dim_v)

    def word(self, indices) -> np.ndarray:
        """Product of generators in the given order (0-based indices)."""
        return ordered_product([self.gammas[i] for i in indices], self.dim_v)

    def measured_signs(self) -> SignTriple:
        """Signs read off from the matrices: C^2, C gamma^a C^-1 (gamma^a)^-1, C gamma C^-1 gamma."""
        C = self.real_structure
        eps = C.square()[0, 0].real
        if self.gammas:
            g = self.gammas[0]
            eps_p = (C.conjugate(g) @ np.linalg.inv(g))[0, 0].real
        else:
            eps_p = self.signs.epsilon_prime
        eps_pp = (C.conjugate(self.chirality) @ self.chirality)[0, 0].real
        return SignTriple(int(round(eps)), int(round(eps_p)), int(round(eps_pp)))

    @property
    def chirality_scalar(self) -> int | None:
        """+-1 when the chirality operator is a scalar (n odd, irreducible), else None."""
        c = self.chirality
        if np.array_equal(c, c[0, 0] * np.eye(self.dim_v)):
            return int(round(c[0, 0].real))
        return None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "s": self.s,
            "dim_v": self.dim_v,
            "gammas": [encode_matrix(g) for g in self.gammas],
            "chirality": encode_matrix(self.chirality),
            "real_structure": encode_matrix(self.real_structure.matrix),
            "signs": list(self.signs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CliffordModule":
        return cls(
            p=d["p"],
            q=d["q"],
            gammas=tuple(decode_matrix(g) for g in d["gammas"]),
            chirality=decode_matrix(d["chirality"]),
            real_structure=AntilinearOp(decode_matrix(d["real_structure"])),
        )


def _num(x: float):
    r = round(x)
    return int(r) if x == r else float(x)


def encode_matrix(m) -> list:
    """Row-major list of [re, im] pairs; integral entries become ints."""
    m = np.asarray(m, dtype=complex)
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    if len(rows) == 0:
        return np.zeros((0, 0), dtype=complex)
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def chirality_from_gammas(gammas, s: int, dim: int) -> np.ndarray:
    """gamma = i^{s(s+1)/2} P."""
    return i_power(s * (s + 1) // 2) * ordered_product(gammas, dim)


_BASE = {
    (0, 0): ([], [[1]], [[1]]),
    (1, 0): ([[[1]]], [[1]], [[1]]),
    (0, 1): ([[[-I]]], [[1]], [[1]]),
    (2, 0): ([[[1, 0], [0, -1]], [[0, 1], [1, 0]]], [[0, I], [-I, 0]], [[1, 0], [0, 1]]),
    (1, 1): ([[[1, 0], [0, -1]], [[0, 1], [-1, 0]]], [[0, 1], [1, 0]], [[1, 0], [0, 1]]),
    (0, 2): ([[[I, 0], [0, -I]], [[0, 1], [-1, 0]]], [[0, 1], [1, 0]], [[0, 1], [-1, 0]]),
}


def base_module(p: int, q: int) -> CliffordModule:
    """The explicit modules for n = p + q <= 2."""
    try:
        gammas, chir, c = _BASE[(p, q)]
    except KeyError:
        raise ValueError(f"no base module of type ({p},{q}); need p + q <= 2") from None
    return CliffordModule(p, q, tuple(np.array(g, dtype=complex) for g in gammas),
                          np.array(chir, dtype=complex), AntilinearOp(np.array(c)))


def product_even(m1: CliffordModule, m2: CliffordModule) -> CliffordModule:
    """The product ``m1 ∘ m2``; requires ``m1.s`` even."""
    if m1.s % 2:
        raise ValueError(f"left factor must have even s, got s={m1.s}")
    k1, k2 = m1.dim_v, m2.dim_v
    g1 = m1.chirality
    gammas = [np.kron(g, np.eye(k2)) for g in m1.gammas]
    gammas += [np.kron(g1, g) for g in m2.gammas]
    p, q = m1.p + m2.p, m1.q + m2.q
    s = (q - p) % 8
    chir = chirality_from_gammas(gammas, s, k1 * k2)

    C1, C2 = m1.real_structure, m2.real_structure
    if m2.s % 2 == 0:
        C = C1.kron(C2) if m1.signs.epsilon_double_prime == 1 else C1.kron(C2.after(m2.chirality))
    else:
        C = C1.kron(C2) if sign_table(s).epsilon_prime == 1 else C1.after(g1).kron(C2)
    return CliffordModule(p, q, tuple(gammas), chir, C)


def bullet_extension(m1: CliffordModule) -> CliffordModule:
    """Module of type (p1+1, q1) whose generators after the first realise ``m1``.

    Only the n = 1 modules have a canonical extension: (0,1) sits inside (1,1)
    and (1,0) inside (2,0).
    """
    if (m1.p, m1.q) == (0, 1):
        return base_module(1, 1)
    if (m1.p, m1.q) == (1, 0):
        return base_module(2, 0)
    raise ValueError(f"no canonical extension for type ({m1.p},{m1.q}); pass one explicitly")


def product_odd(m1: CliffordModule, m2: CliffordModule,
                extension: CliffordModule | None = None) -> CliffordModule:
    """The product ``m1 • m2`` for odd ``s1`` and ``s2``.

    ``extension`` is the larger module of type (p1+1, q1) with the extra
    generator t (t^2 = 1) listed first; defaults to the canonical one for n1 = 1.
    """
    if m1.s % 2 == 0 or m2.s % 2 == 0:
        raise ValueError(f"both factors need odd s, got s1={m1.s}, s2={m2.s}")
    ext = bullet_extension(m1) if extension is None else extension
    if (ext.p, ext.q) != (m1.p + 1, m1.q):
        raise ValueError("extension must have type (p1+1, q1)")
    t = ext.gammas[0]
    if not np.array_equal(t @ t, np.eye(ext.dim_v)):
        raise ValueError("first generator of the extension must square to +1")

    k1, k2 = ext.dim_v, m2.dim_v
    lifted = ext.gammas[1:]
    gammas = [np.kron(g, np.eye(k2)) for g in lifted]
    gammas += [np.kron(ext.chirality, g) for g in m2.gammas]
    p, q = m1.p + m2.p, m1.q + m2.q
    s = (q - p) % 8
    chir = chirality_from_gammas(gammas, s, k1 * k2)

    if sign_table(s).epsilon_double_prime == 1:
        C = ext.real_structure.kron(m2.real_structure)
    else:
        g1 = chirality_from_gammas(lifted, m1.s, k1)
        C = ext.real_structure.after(g1).kron(m2.real_structure.after(m2.chirality))
    return CliffordModule(p, q, tuple(gammas), chir, C)


def build_module(p: int, q: int) -> CliffordModule:
    """Irreducible module of type (p, q) from a fixed fold of base modules.

    Order: min(p, q) copies of (1,1), then (2,0) or (0,2) for the excess pairs,
    then a (1,0) or (0,1) tail when p + q is odd.
    """
    if p < 0 or q < 0:
        raise ValueError("p and q must be non-negative")
    a = min(p, q)
    excess = abs(p - q)
    pair = (2, 0) if p > q else (0, 2)
    factors = [(1, 1)] * a + [pair] * (excess // 2)
    if excess % 2:
        factors.append((1, 0) if p > q else (0, 1))
    m = base_module(0, 0)
    for f in factors:
        m = product_even(m, base_module(*f))
    return m


def _maxabs(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


def verify_module(m: CliffordModule, tol: float = 0.0) -> Report:
    """Itemised check of every Clifford-module invariant.

    ``tol = 0`` asks for exact equality, which holds for the constructed
    modules since all entries stay in {0, +-1, +-i}.
    """
    rep = Report()
    k = m.dim_v
    eye = np.eye(k)
    # the generator order need not list the +1 generators first
    eta = list(np.sign(m.eta)) if m.gammas else []
    if sorted(eta) != sorted([1] * m.p + [-1] * m.q):
        rep.add("signature", 1.0, tol, "generators square to +-1 with p plus and q minus")
    else:
        rep.add("signature", 0.0, tol, "generators square to +-1 with p plus and q minus")

    dev = 0.0
    for a, ga in enumerate(m.gammas):
        for b, gb in enumerate(m.gammas):
            target = 2 * eta[a] * eye if a == b else 0 * eye
            dev = max(dev, _maxabs(ga @ gb + gb @ ga - target))
    rep.add("anticommutation", dev, tol, "gamma^a gamma^b + gamma^b gamma^a = 2 eta^ab")

    dev = max((_maxabs(g.conj().T @ g - eye) for g in m.gammas), default=0.0)
    rep.add("unitarity", dev, tol, "each gamma^a unitary")

    dev = max((_maxabs(g.conj().T - e * g) for g, e in zip(m.gammas, eta)), default=0.0)
    rep.add("hermiticity", dev, tol, "Hermitian if square +1, anti-Hermitian if -1")

    P = m.P()
    sign = (-1) ** ((m.s * (m.s + 1) // 2) % 2)
    rep.add("P_square", _maxabs(P @ P - sign * eye), tol, "P^2 = (-1)^{s(s+1)/2}")

    gam = m.chirality
    rep.add("chirality_definition", _maxabs(gam - chirality_from_gammas(m.gammas, m.s, k)), tol,
            "gamma = i^{s(s+1)/2} P")
    rep.add("chirality_involution",
            max(_maxabs(gam @ gam - eye), _maxabs(gam.conj().T - gam)), tol,
            "gamma^2 = 1 and gamma* = gamma")
    grade = -1 if m.n % 2 == 0 else 1
    dev = max((_maxabs(gam @ g - grade * g @ gam) for g in m.gammas), default=0.0)
    rep.add("chirality_grading", dev, tol,
            "gamma anticommutes with generators (n even), commutes (n odd)")

    C = m.real_structure
    eps, eps_p, eps_pp = m.signs
    rep.add("C_square", _maxabs(C.square() - eps * eye), tol, "C^2 = epsilon")
    dev = max((_maxabs(C.matrix @ np.conj(g) - eps_p * g @ C.matrix) for g in m.gammas),
              default=0.0)
    rep.add("C_gamma", dev, tol, "C gamma^a = epsilon' gamma^a C")
    rep.add("C_chirality", _maxabs(C.matrix @ np.conj(gam) - eps_pp * gam @ C.matrix), tol,
            "C gamma = epsilon'' gamma C")
    rep.add("C_unitary", C.unitarity_deviation(), tol, "(Cv, Cw) = (w, v)")

    expected = 2 ** (m.n // 2)
    rep.add("dimension", abs(k - expected), 0, f"irreducible dimension {expected}")
    return rep
