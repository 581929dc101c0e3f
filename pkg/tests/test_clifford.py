import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fuzzytriples.clifford import (CliffordModule, SignTriple, base_module, build_module,
                                   bullet_extension, product_even, product_odd, sign_table,
                                   verify_module)

FIGURE_SIGNS = {
    0: (1, 1, 1), 1: (1, -1, 1), 2: (-1, 1, -1), 3: (-1, 1, 1),
    4: (-1, 1, 1), 5: (-1, -1, 1), 6: (1, 1, -1), 7: (1, 1, 1),
}

small_types = st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda t: sum(t) <= 6)


def test_sign_table_literal():
    for s, signs in FIGURE_SIGNS.items():
        assert tuple(sign_table(s)) == signs
    assert sign_table(10) == sign_table(2)
    assert isinstance(sign_table(0), SignTriple)


@pytest.mark.parametrize("p,q", [(p, q) for p in range(3) for q in range(3) if p + q <= 2])
def test_base_modules(p, q):
    m = base_module(p, q)
    assert (m.p, m.q) == (p, q)
    assert verify_module(m).passed


def test_type02_example():
    m = base_module(0, 2)
    assert m.s == 2
    np.testing.assert_array_equal(m.gammas[0], np.diag([1j, -1j]))
    np.testing.assert_array_equal(m.gammas[1], [[0, 1], [-1, 0]])
    np.testing.assert_array_equal(m.chirality, [[0, 1], [1, 0]])
    v = np.array([2 + 1j, 3 - 2j])
    np.testing.assert_array_equal(m.real_structure(v), [np.conj(v[1]), -np.conj(v[0])])


def test_trivial_module():
    m = build_module(0, 0)
    assert m.gammas == [] or len(m.gammas) == 0
    np.testing.assert_array_equal(m.chirality, [[1]])


@given(small_types)
@settings(max_examples=30, deadline=None)
def test_build_module_exact(pq):
    m = build_module(*pq)
    rep = verify_module(m, tol=0.0)
    assert rep.passed, rep.failed()
    assert m.dim_v == 2 ** (m.n // 2)
    assert tuple(m.measured_signs()) == FIGURE_SIGNS[m.s]


@pytest.mark.parametrize("p,q", [(1, 3), (0, 3), (4, 1), (2, 5)])
def test_products(p, q):
    m = build_module(p, q)
    assert m.s == (q - p) % 8


def test_product_even_and_odd():
    a, b = base_module(0, 2), base_module(1, 0)
    m = product_even(a, b)
    assert (m.p, m.q) == (1, 2) and verify_module(m).passed
    c = product_odd(base_module(0, 1), base_module(0, 1))
    assert (c.p, c.q) == (0, 2) and verify_module(c).passed
    e = bullet_extension(base_module(0, 1))
    assert verify_module(e).passed


def test_json_round_trip():
    m = build_module(1, 3)
    d = json.loads(json.dumps(m.to_dict()))
    back = CliffordModule.from_dict(d)
    for g, h in zip(m.gammas, back.gammas):
        np.testing.assert_array_equal(g, h)
    np.testing.assert_array_equal(m.real_structure.matrix, back.real_structure.matrix)
    assert d["signs"] == list(FIGURE_SIGNS[2])


def test_verify_detects_broken_module():
    m = build_module(0, 2)
    bad = CliffordModule(m.p, m.q, [m.gammas[0], m.gammas[0]], m.chirality, m.real_structure)
    rep = verify_module(bad)
    assert not rep.passed
    assert not rep["anticommutation"].passed
