"""Acceptance suite: twelve criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py`` (lines are repeated in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import time
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from fuzzytriples.clifford import build_module, sign_table, verify_module
from fuzzytriples.fuzzy import fuzzy_fermion_space, geometry_basis, geometry_dim_oracle
from fuzzytriples.montecarlo import ActionConfig, run_chains, sample_euclidean
from fuzzytriples.sphere import (
    Spectrum, casimir_check, commutative_sphere_spectrum, dirac_blocks, fuzzy_sphere_dirac,
    fuzzy_w_report, gen_fuzzy_sphere_dirac, grosse_presnajder, identify_kappa_m,
    monopole_relation, predicted_fuzzy_spectrum, predicted_gen_spectrum, predicted_gp_spectrum,
    so3_irrep, spinor_rotation)
from fuzzytriples.triple import (apply_transformation, canonical_frobenius, check_axioms,
                                 theta_from_dirac, theta_report)

from _fixtures import RANDOM_TYPES, mutations, random_geometry

RESULTS: list[str] = []

FIGURE_SIGNS = {
    0: (1, 1, 1), 1: (1, -1, 1), 2: (-1, 1, -1), 3: (-1, 1, 1),
    4: (-1, 1, 1), 5: (-1, -1, 1), 6: (1, 1, -1), 7: (1, 1, 1),
}
SMALL_TYPES = [(p, q) for p in range(7) for q in range(7) if p + q <= 6]


@lru_cache(maxsize=None)
def sphere_fixtures():
    """(label, fs, D) for the fuzzy sphere n = 1..8 and generalised n1 + n2 <= 10."""
    out = []
    for n in range(1, 9):
        fs, d = fuzzy_sphere_dirac(n)
        out.append((f"sphere n={n}", fs, d.matrix))
    for n1 in range(1, 10):
        for n2 in range(1, 11 - n1):
            fs, d = gen_fuzzy_sphere_dirac(n1, n2)
            out.append((f"gen ({n1},{n2})", fs, d.matrix))
    return tuple(out)


@lru_cache(maxsize=None)
def random_fixtures():
    out = []
    for i, (p, q) in enumerate(RANDOM_TYPES):
        for n in (2, 3):
            fs, D = random_geometry(p, q, n, seed=100 + 10 * i + n)
            out.append((f"random ({p},{q}) n={n}", fs, D))
    return tuple(out)


def all_fixtures():
    return sphere_fixtures() + random_fixtures()


def record(num: int, ok: bool, detail: str) -> bool:
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


# ---------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    bad = [pq for pq in SMALL_TYPES
           if tuple(build_module(*pq).measured_signs()) != FIGURE_SIGNS[(pq[1] - pq[0]) % 8]]
    bad += [s for s in range(8) if tuple(sign_table(s)) != FIGURE_SIGNS[s]]
    dt = time.perf_counter() - t0
    return record(1, not bad and dt < 5, f"sign table for {len(SMALL_TYPES)} types, "
                  f"mismatches {bad}, {dt:.2f} s (< 5 s)")


def criterion_2():
    worst, failed = 0.0, []
    for pq in SMALL_TYPES:
        rep = verify_module(build_module(*pq), tol=0.0)
        worst = max(worst, max(c.max_deviation for c in rep.checks))
        if not rep.passed:
            failed.append((pq, rep.failed()))
    return record(2, not failed, f"Clifford identities exact on {len(SMALL_TYPES)} modules, "
                  f"max deviation {worst:g}, failures {failed}")


def criterion_3():
    t0 = time.perf_counter()
    fixtures = all_fixtures()
    failed = [label for label, fs, D in fixtures if not check_axioms(fs, D, tol=1e-12).passed]
    wrong = []
    muts = mutations()
    for axiom, label, fs, D in muts:
        got = [c.id for c in check_axioms(fs, D).checks if not c.passed]
        if got != [axiom]:
            wrong.append((axiom, got))
    dt = time.perf_counter() - t0
    ok = not failed and not wrong and len(muts) == 13 and dt < 60
    return record(3, ok, f"{len(fixtures)} fixtures pass 13 axioms (failures {failed}); "
                  f"{len(muts)} mutations each fail exactly their axiom (wrong {wrong}); "
                  f"{dt:.1f} s (< 60 s)")


def criterion_4():
    bad = []
    for n in range(1, 13):
        got = Spectrum.of(grosse_presnajder(n))
        want = predicted_gp_spectrum(n)
        asym = all(abs(v + n) > 1e-9 for v in got.values)
        if not (got.matches(want, 1e-9) and asym):
            bad.append(n)
    return record(4, not bad, f"spec(d) for n=1..12 matches closed form with -n absent; "
                  f"failures {bad}")


def criterion_5():
    bad, worst_w = [], 0.0
    for n in range(1, 13):
        _, d = fuzzy_sphere_dirac(n)
        got = Spectrum.of(d.matrix)
        w = fuzzy_w_report(n, tol=1e-12)
        worst_w = max(worst_w, max(c.max_deviation for c in w.checks))
        if not (got.matches(predicted_fuzzy_spectrum(n), 1e-9) and got.total == 4 * n * n
                and got.is_symmetric() and w.passed):
            bad.append(n)
    return record(5, not bad, f"spec(D) for n=1..12 matches, symmetric, total 4n^2; "
                  f"W-block deviation {worst_w:.1e}; failures {bad}")


def criterion_6():
    bad, count = [], 0
    for n1 in range(1, 12):
        for n2 in range(1, 13 - n1):
            count += 1
            _, d = gen_fuzzy_sphere_dirac(n1, n2)
            D1, D2 = dirac_blocks(d, n1, n2)
            e1, e2 = np.linalg.eigvalsh(D1), np.linalg.eigvalsh(D2)
            s1 = Spectrum.from_eigenvalues(e1)
            same = np.max(np.abs(e1 - e2)) <= 1e-9 and Spectrum.from_eigenvalues(e2).matches(s1)
            if not (s1.matches(predicted_gen_spectrum(n1, n2, block=True), 1e-9) and same):
                bad.append((n1, n2))
    return record(6, not bad, f"spec(D1) matches table and spec(D2) = spec(D1) for {count} "
                  f"pairs n1+n2 <= 12; failures {bad}")


def criterion_7():
    cases = [(n,) for n in range(1, 13)]
    cases += [(a, b) for a in range(1, 12) for b in range(1, 13 - a)]
    worst, bad = 0.0, []
    for c in cases:
        rep = casimir_check(*c, tol=1e-12)
        dev = rep["casimir_identity"].max_deviation
        worst = max(worst, dev)
        if not rep.passed:
            bad.append(c)
    return record(7, not bad, f"d = c - c1 - c2 + 1 on {len(cases)} sphere fixtures, "
                  f"max deviation {worst:.1e}; failures {bad}")


def criterion_8():
    bad, worst = [], 0.0
    for label, fs, D in all_fixtures():
        frob = canonical_frobenius(fs.algebra)
        theta = theta_from_dirac(fs, frob, D, check=False)
        rep = theta_report(fs, frob, theta, D, tol=1e-12)
        worst = max(worst, rep["round_trip"].max_deviation)
        if not rep.passed:
            bad.append(label)
    return record(8, not bad, f"theta round trip, conditions and gauge on "
                  f"{len(all_fixtures())} fixtures, max round-trip {worst:.1e}; failures {bad}")


def criterion_9():
    bad, count = [], 0
    for label, fs, _ in all_fixtures():
        if fs.hilbert_dim > 64:
            continue
        count += 1
        g, o = geometry_basis(fs).dim_g, geometry_dim_oracle(fs)
        if g != o:
            bad.append((label, g, o))
    return record(9, not bad, f"dim_g equals oracle on {count} fixtures with hilbert_dim <= 64; "
                  f"mismatches {bad}")


def criterion_10():
    bad = []
    for n in range(1, 13):
        one = commutative_sphere_spectrum(n - 1)
        other = commutative_sphere_spectrum(n - 2) if n > 1 else Spectrum(())
        if not one.union(other).matches(predicted_fuzzy_spectrum(n)):
            bad.append(("doubling", n))
    bad += [("monopole", k, r) for k in range(1, 7) for r in range(21)
            if not monopole_relation(k, r)]
    for k in range(1, 7):
        ident = identify_kappa_m(k, Fraction(k, 2) + 4)
        if not (ident["|kappa|/2"] and not ident["|kappa|"]):
            bad.append(("identify", k))
    return record(10, not bad, f"doubling n=1..12, monopole relation kappa 1..6 r<=20, "
                  f"m = |kappa|/2 selected; failures {bad}")


def criterion_11(tmp_dir):
    basis = geometry_basis(fuzzy_fermion_space(build_module(1, 0), 1))
    B = basis.basis[0].matrix
    t = float(np.trace(B @ B).real)
    g2 = 1.0
    want = 1 / (2 * g2 * t)
    t0 = time.perf_counter()
    rep = sample_euclidean(basis, ActionConfig(g2=g2), 100_000, 10_000, seed=42)
    dt = time.perf_counter() - t0
    e = rep.estimates["x2"]
    close = abs(e.mean - want) < 3 * e.stderr
    paths = [tmp_dir / f"trace{i}.csv" for i in range(2)]
    for p in paths:
        sample_euclidean(basis, ActionConfig(g2=g2, g4=0.1), 5000, 500, seed=7, trace_path=p)
    same = paths[0].read_bytes() == paths[1].read_bytes()
    multi = run_chains(basis, ActionConfig(g2=g2), 25_000, 2500, seed=11, chain_count=4)
    ratio = max(multi.variance_ratio.values())
    ok = close and dt < 30 and same and ratio < 1.1
    return record(11, ok, f"<x^2> = {e.mean:.5f} +- {e.stderr:.5f} vs {want:.5f} "
                  f"({abs(e.mean - want) / e.stderr:.2f} se) in {dt:.1f} s; "
                  f"traces identical {same}; 4-chain R-hat max {ratio:.4f}")


def criterion_12():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for n in range(1, 7):
        fs, d = fuzzy_sphere_dirac(n)
        rep = so3_irrep(n)
        for _ in range(20):
            t = rng.uniform(-np.pi, np.pi, 3)
            out = apply_transformation(fs, d, rep.group_element(t), spinor_rotation(t))
            worst = max(worst, float(np.max(np.abs(out.matrix - d.matrix))))
    return record(12, worst < 1e-9, f"20 rotations per n=1..6 leave D invariant, "
                  f"max entry deviation {worst:.1e} (< 1e-9)")


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("num", range(1, 13))
def test_criterion(num, tmp_path):
    fn = globals()[f"criterion_{num}"]
    ok = fn(tmp_path) if num == 11 else fn()
    assert ok, RESULTS[-1]


if __name__ == "__main__":
    import pathlib
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        for num in range(1, 13):
            fn = globals()[f"criterion_{num}"]
            fn(pathlib.Path(d)) if num == 11 else fn()
