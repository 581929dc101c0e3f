from fractions import Fraction

import numpy as np
import pytest

from fuzzytriples.sphere import (
    PAIRS, Spectrum, casimir_check, commutative_sphere_spectrum, dirac_blocks, exact_square,
    fuzzy_sphere_dirac, fuzzy_w_report, gen_fuzzy_sphere_dirac, gen_grosse_presnajder,
    gen_w_report, grosse_presnajder, identify_kappa_m, integer_check, mass_mixed_spectrum,
    monopole_relation, monopole_spectrum, predicted_fuzzy_spectrum, predicted_gen_gp_spectrum,
    predicted_gen_spectrum, predicted_gp_spectrum, so3_irrep, spin_generators, spinor_rotation)
from fuzzytriples.triple import apply_transformation


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_so3_brackets_and_casimir(n):
    rep = so3_irrep(n)
    assert rep.bracket_deviation() < 1e-12
    l = (n - 1) / 2
    np.testing.assert_allclose(rep.casimir(), l * (l + 1) * np.eye(n), atol=1e-12)
    for p in PAIRS:
        np.testing.assert_allclose(rep.L[p].conj().T, -rep.L[p], atol=1e-14)


def test_spin_generators():
    s = spin_generators()
    assert s.bracket_deviation() < 1e-14
    np.testing.assert_allclose(s.casimir(), 0.75 * np.eye(2), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_gp_spectrum(n):
    got = Spectrum.of(grosse_presnajder(n))
    want = predicted_gp_spectrum(n)
    assert got.matches(want)
    assert -n not in got.values


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fuzzy_dirac_spectrum(n):
    _, d = fuzzy_sphere_dirac(n)
    got = Spectrum.of(d.matrix)
    assert got.matches(predicted_fuzzy_spectrum(n))
    assert got.total == 4 * n * n and got.is_symmetric()


def test_predicted_fuzzy_literal():
    s = predicted_fuzzy_spectrum(3)
    assert dict(s.entries) == {-3: 6, -2: 8, -1: 4, 1: 4, 2: 8, 3: 6}
    with pytest.raises(ValueError):
        predicted_fuzzy_spectrum(0)


@pytest.mark.parametrize("n1,n2", [(3, 1), (1, 3), (2, 2), (4, 2), (1, 1)])
def test_generalised_spectrum(n1, n2):
    _, d = gen_fuzzy_sphere_dirac(n1, n2)
    D1, D2 = dirac_blocks(d, n1, n2)
    s1 = Spectrum.of(D1)
    assert s1.matches(predicted_gen_spectrum(n1, n2, block=True))
    assert Spectrum.of(D2).matches(s1)
    assert Spectrum.of(d.matrix).matches(predicted_gen_spectrum(n1, n2))
    assert Spectrum.of(gen_grosse_presnajder(n1, n2)).matches(predicted_gen_gp_spectrum(n1, n2))


def test_generalised_literal():
    # m = 1, top = 2: +-1 (mult 2) and +-2 (mult 4)
    assert dict(predicted_gen_spectrum(3, 1, block=True).entries) == {-2: 4, -1: 2, 1: 2, 2: 4}


@pytest.mark.parametrize("n", [1, 2, 4])
def test_w_report(n):
    rep = fuzzy_w_report(n)
    assert rep.passed, rep.table()


@pytest.mark.parametrize("n1,n2", [(2, 1), (3, 3)])
def test_gen_w_report(n1, n2):
    rep = gen_w_report(n1, n2)
    assert rep.passed, rep.table()


@pytest.mark.parametrize("args", [(1,), (3,), (2, 1), (4, 2)])
def test_casimir(args):
    rep = casimir_check(*args)
    assert rep.passed, rep.table()


def test_commutative_doubling():
    for n in range(1, 8):
        one = commutative_sphere_spectrum(n - 1)
        other = commutative_sphere_spectrum(n - 2) if n > 1 else Spectrum(())
        assert one.union(other).matches(predicted_fuzzy_spectrum(n))
    with pytest.raises(ValueError):
        commutative_sphere_spectrum(-1)


@pytest.mark.parametrize("kappa", range(1, 7))
def test_monopole(kappa):
    assert all(monopole_relation(kappa, r) for r in range(21))
    s = monopole_spectrum(kappa, 5)
    assert s.meta["index"] == -kappa
    assert dict(s.entries)[0.0] == kappa
    assert all(exact_square(4 * e["lambda_squared"] + kappa * kappa) for e in s.meta["exact"])
    with pytest.raises(ValueError):
        monopole_spectrum(0, 3)


@pytest.mark.parametrize("kappa", range(1, 7))
def test_kappa_m_identification(kappa):
    top = Fraction(kappa, 2) + 3
    ident = identify_kappa_m(kappa, top)
    assert ident["|kappa|/2"] and not ident["|kappa|"]
    assert mass_mixed_spectrum(kappa, top).is_symmetric()


def test_integer_check():
    _, d = fuzzy_sphere_dirac(3)
    assert integer_check(Spectrum.of(d.matrix)) < 1e-9
    assert integer_check(Spectrum.from_pairs([(0.3, 1)])) > 0.1


@pytest.mark.parametrize("n", [2, 3, 5])
def test_su2_invariance(n):
    fs, d = fuzzy_sphere_dirac(n)
    rng = np.random.default_rng(n)
    for _ in range(3):
        t = rng.standard_normal(3) * 2
        out = apply_transformation(fs, d, so3_irrep(n).group_element(t), spinor_rotation(t))
        assert np.max(np.abs(out.matrix - d.matrix)) < 1e-9


def test_spectrum_csv_round_trip():
    s = predicted_fuzzy_spectrum(3)
    assert Spectrum.from_csv(s.to_csv()).entries == s.entries
    m = monopole_spectrum(2, 2)
    assert Spectrum.from_csv(m.to_csv()).matches(m)
    d = predicted_gen_spectrum(3, 1).to_dict()
    assert d["n"] == [3, 1] and d["total_dim"] == 24
