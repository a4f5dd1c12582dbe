"""Operations on Chern and Thom classes."""

import itertools
import random

import pytest

from msteen.chern import (
    ChernPoly,
    SymPoly,
    chern_action,
    chern_polynomial,
    decompose_symmetric,
    monomial_symmetric,
    q_index,
    sample_partitions,
    stable_rank,
    thom_action,
)


def cp(d, terms, p=2):
    return ChernPoly(d, terms, p)


# decomposition --------------------------------------------------------------


def test_decompose_examples():
    assert decompose_symmetric(SymPoly(2, {(1, 1): 1})) == cp(2, {(0, 1): 1})
    assert decompose_symmetric(SymPoly(2, {(2, 0): 1, (0, 2): 1})) == cp(2, {(2, 0): 1})
    assert decompose_symmetric(SymPoly(3, {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1})) == cp(3, {(1, 0, 0): 1})


def test_newton_identity_at_three():
    # p_2 = e_1^2 - 2 e_2
    got = decompose_symmetric(SymPoly.power_sum(2, 2, 3))
    assert got == cp(2, {(2, 0): 1, (0, 1): 1}, 3)


def test_non_symmetric_rejected():
    with pytest.raises(ValueError):
        SymPoly(2, {(1, 0): 1})
    with pytest.raises(ValueError):
        decompose_symmetric(SymPoly(2, {(1, 0): 1}, check=False))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_round_trip(p):
    rng = random.Random(p)
    for d in range(1, 6):
        for _ in range(12):
            terms = {}
            for _ in range(rng.randint(1, 4)):
                deg = rng.randint(0, 12)
                parts = list(sample_partitions(deg, d))
                c = rng.randint(1, p - 1)
                for e, v in monomial_symmetric(rng.choice(parts), p).terms.items():
                    terms[e] = (terms.get(e, 0) + c * v) % p
            poly = SymPoly(d, terms, p)
            assert decompose_symmetric(poly).recompose() == poly.terms


def test_rendering():
    assert str(cp(2, {(2, 0): 1, (0, 1): 1})) == "c1^2 + c2"
    assert str(cp(2, {})) == "0"


# actions ----------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_chern_action_examples(p):
    for d in (1, 2, 3):
        assert chern_action((), 1, d, p) == cp(d, {(1,) + (0,) * (d - 1): 1}, p)
    assert chern_action((1,), 1, 1, p) == cp(1, {(p,): 1}, p)


def test_chern_action_first_power_rank_two():
    assert chern_action((1,), 1, 2, 2) == cp(2, {(2, 0): 1})


@pytest.mark.parametrize("p", [2, 3, 5])
def test_thom_action_examples(p):
    for d in (1, 2, 4):
        assert thom_action((), d, p) == ChernPoly.one(d, p)
    assert thom_action((1,), 1, p) == cp(1, {(p - 1,): 1}, p)


def test_thom_action_q1_rank_two():
    assert thom_action((1,), 2, 2) == cp(2, {(1, 0): 1})


@pytest.mark.parametrize("p", [2, 3])
def test_thom_of_q_n_is_a_power_sum(p):
    for n in (1, 2):
        for d in range(1, 7):
            expected = decompose_symmetric(SymPoly.power_sum(p**n - 1, d, p))
            assert thom_action(q_index(n), d, p) == expected


@pytest.mark.parametrize("p,r", [(2, (1,)), (2, (2,)), (2, (0, 1)), (2, (1, 1)), (3, (1,)), (3, (2,))])
def test_thom_action_stabilizes(p, r):
    s = stable_rank(r, p)
    ref = thom_action(r, s, p)
    for d in range(s + 1, s + 3):
        assert thom_action(r, d, p) == ref


# splitting principle ----------------------------------------------------------


def _coaction_line(x_index, d, p, kmax, shift):
    """``sum_k xi_k (x) X_j^(l^k - shift)`` as ``{(xi exps, X exps): 1}``."""
    out = {}
    for k in range(kmax + 1):
        xi = [0] * kmax
        if k:
            xi[k - 1] = 1
        X = [0] * d
        X[x_index] = p**k - shift
        out[(tuple(xi), tuple(X))] = 1
    return out


def _mul(a, b, p):
    out = {}
    for (x1, y1), c1 in a.items():
        for (x2, y2), c2 in b.items():
            key = (tuple(i + j for i, j in zip(x1, x2)), tuple(i + j for i, j in zip(y1, y2)))
            out[key] = (out.get(key, 0) + c1 * c2) % p
    return {k: v for k, v in out.items() if v}


def _xi_coefficient(poly, r, kmax):
    target = tuple(r) + (0,) * (kmax - len(r))
    return {X: c for (xi, X), c in poly.items() if xi == target}


def _chern_by_coaction(i, d, p, kmax):
    total = {}
    for J in itertools.combinations(range(d), i):
        prod = {((0,) * kmax, (0,) * d): 1}
        for j in J:
            prod = _mul(prod, _coaction_line(j, d, p, kmax, 0), p)
        for k, v in prod.items():
            total[k] = (total.get(k, 0) + v) % p
    return {k: v for k, v in total.items() if v}


def _thom_by_coaction(d, p, kmax):
    prod = {((0,) * kmax, (0,) * d): 1}
    for j in range(d):
        prod = _mul(prod, _coaction_line(j, d, p, kmax, 1), p)
    return prod


R_SEQS = [(), (1,), (2,), (0, 1), (1, 1), (3,)]


@pytest.mark.parametrize("p", [2, 3])
def test_chern_action_matches_coaction(p):
    kmax = 2
    for d in range(1, 5):
        for i in range(0, d + 1):
            expanded = _chern_by_coaction(i, d, p, kmax)
            for r in R_SEQS:
                got = chern_action(r, i, d, p).recompose()
                assert got == _xi_coefficient(expanded, r, kmax), (r, i, d)


@pytest.mark.parametrize("p", [2, 3])
def test_thom_action_matches_coaction(p):
    kmax = 2
    for d in range(1, 5):
        expanded = _thom_by_coaction(d, p, kmax)
        for r in R_SEQS:
            got = thom_action(r, d, p).recompose()
            assert got == _xi_coefficient(expanded, r, kmax), (r, d)


def test_output_is_homogeneous():
    for r in R_SEQS:
        for i in range(1, 4):
            poly = chern_action(r, i, 3, 2)
            assert len(poly.bidegrees()) <= 1


def test_bad_chern_index():
    with pytest.raises(ValueError):
        chern_polynomial((1,), 3, 2, 2)
