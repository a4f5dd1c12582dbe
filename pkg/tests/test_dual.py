import random

import pytest

from helpers import dual_monomials_up_to
from msteen.coeff import MotCoeff, specialize
from msteen.dual import (
    DualElement,
    DualTensor,
    _add,
    _twist_into,
    coproduct_flat,
    dual_bidegree,
    dual_coproduct,
    dual_mul,
    dual_parity,
    dual_tensor_mul,
    tau,
    tensor_normalize,
    xi,
)

T = MotCoeff.tau()
R = MotCoeff.rho()


def d(p, index, c=1):
    return DualElement.monomial(p, index, c)


def test_tau_square_relation():
    got = dual_mul(d(2, tau(0)), d(2, tau(0)))
    want = d(2, xi(1), T) + d(2, tau(0) and _times(tau(0), xi(1)), R) + d(2, tau(1), R)
    assert got == want
    assert str(got) == "xi_1 t + tau_0 xi_1 r + tau_1 r"
    assert not dual_mul(d(3, tau(0)), d(3, tau(0)))
    assert dual_mul(d(2, xi(1)), d(2, xi(1))) == d(2, xi(1, 2))


def _times(*indices):
    out = ()
    for ix in indices:
        n = max(len(out), len(ix))
        out = tuple((out[i] if i < len(out) else 0) + (ix[i] if i < len(ix) else 0) for i in range(n))
    return out


def test_stored_tau_exponents_are_reduced():
    with pytest.raises(ValueError):
        DualElement(2, {(2,): 1})
    rng = random.Random(1)
    gens = [tau(0), tau(1), tau(2), xi(1), xi(2)]
    for _ in range(100):
        x = d(2, ())
        for _ in range(rng.randint(1, 6)):
            x = dual_mul(x, d(2, rng.choice(gens)))
        for m in x.terms:
            assert all(e in (0, 1) for e in m[0::2])


def _random_element(rng, p, monos, k=3):
    out = DualElement(p)
    for _ in range(rng.randint(1, k)):
        c = MotCoeff(p, {(rng.randint(0, 1), rng.randint(0, 1)): 1}) if p == 2 else MotCoeff.scalar(p, rng.randint(1, p - 1))
        out = out + d(p, rng.choice(monos), c)
    return out


@pytest.mark.parametrize("p, max_weight", [(2, 20), (3, 12)])
def test_associative_and_graded_commutative(p, max_weight):
    rng = random.Random(p)
    monos = dual_monomials_up_to(p, max_weight // 3)
    for _ in range(150):
        x, y, z = (d(p, rng.choice(monos)) for _ in range(3))
        assert dual_mul(dual_mul(x, y), z) == dual_mul(x, dual_mul(y, z))
        (mx,), (my,) = x.terms, y.terms
        sign = -1 if p != 2 and dual_parity(mx) and dual_parity(my) else 1
        assert dual_mul(x, y) == dual_mul(y, x) * sign
    for _ in range(50):
        x, y = _random_element(rng, p, monos), _random_element(rng, p, monos)
        z = _random_element(rng, p, monos)
        assert dual_mul(x, y + z) == dual_mul(x, y) + dual_mul(x, z)


def test_classical_degeneration():
    # t -> 1, r -> 0 turns tau_k^2 into xi_{k+1}
    for k in range(4):
        sq = dual_mul(d(2, tau(k)), d(2, tau(k)))
        classical = {m: specialize(c, 1, 0) for m, c in sq.terms.items()}
        assert {m: c for m, c in classical.items() if c} == {xi(k + 1): 1}


def test_coproduct_examples():
    assert dual_coproduct(d(2, xi(1))) == DualTensor(2, {((), xi(1)): 1, (xi(1), ()): 1})
    assert dual_coproduct(d(3, tau(0))) == DualTensor(3, {((), tau(0)): 1, (tau(0), ()): 1})
    assert dual_coproduct(d(5, ())) == DualTensor(5, {((), ()): 1})
    want = {((), xi(2)): 1, (xi(1), xi(1, 2)): 1, (xi(2), ()): 1}
    assert dual_coproduct(d(2, xi(2))) == DualTensor(2, want)


def test_tensor_normalize_moves_coefficients_right():
    # (tau_0 t) (x) xi_1 = tau_0 (x) xi_1 t + tau_0 (x) tau_0 xi_1 r
    got = tensor_normalize([(tau(0), (1, 0), xi(1), (0, 0), 1)], 2)
    want = DualTensor(2, {(tau(0), xi(1)): T, (tau(0), _times(tau(0), xi(1))): R})
    assert got == want
    # r is carried by xi_0 alone
    assert tensor_normalize([(xi(1), (0, 1), tau(1), (0, 0), 1)], 2) == DualTensor(2, {(xi(1), tau(1)): R})
    # scalars pass through
    assert tensor_normalize([(tau(0), MotCoeff.scalar(3, 2), xi(1), (0, 0), 1)], 3) == DualTensor(
        3, {(tau(0), xi(1)): 2}
    )
    raw = [(tau(0), (1, 0), xi(1), (0, 0), 1)]
    once = tensor_normalize(raw, 2)
    again = tensor_normalize([(i, (0, 0), j, c, 1) for (i, j), c in once.terms.items()], 2)
    assert again == once


def _coassoc_left(index, p):
    out = {}
    for (i, j, a, b), c in coproduct_flat(index, p).items():
        for (i1, i2, a2, b2), c2 in coproduct_flat(i, p).items():
            tmp = {}
            _twist_into(tmp, p, i2, a2, b2, j, a, b, 1)
            for (k, jj, A, B), c3 in tmp.items():
                _add(out, (i1, k, jj, A, B), c * c2 * c3, p)
    return out


def _coassoc_right(index, p):
    out = {}
    for (i, j, a, b), c in coproduct_flat(index, p).items():
        for (j1, j2, a2, b2), c2 in coproduct_flat(j, p).items():
            _add(out, (i, j1, j2, a + a2, b + b2), c * c2, p)
    return out


@pytest.mark.parametrize("p, max_weight", [(2, 15), (3, 15), (5, 12)])
def test_coproduct_coassociative(p, max_weight):
    for m in dual_monomials_up_to(p, max_weight):
        assert _coassoc_left(m, p) == _coassoc_right(m, p), m


@pytest.mark.parametrize("p, max_weight", [(2, 15), (3, 15)])
def test_coproduct_is_a_ring_morphism(p, max_weight):
    rng = random.Random(p)
    monos = dual_monomials_up_to(p, max_weight)
    checked = 0
    for _ in range(300):
        x = rng.choice(monos)
        rest = [m for m in monos if dual_bidegree(m, p).weight + dual_bidegree(x, p).weight <= max_weight]
        y = rng.choice(rest)
        X, Y = d(p, x), d(p, y)
        assert dual_coproduct(dual_mul(X, Y)) == dual_tensor_mul(dual_coproduct(X), dual_coproduct(Y))
        checked += 1
    assert checked > 100


def test_bidegrees():
    for p in (2, 3):
        assert tuple(dual_bidegree(tau(0), p)) == (1, 0)
        assert tuple(dual_bidegree(xi(1), p)) == (2 * (p - 1), p - 1)
        assert tuple(dual_bidegree(tau(2), p)) == (2 * (p * p - 1) + 1, p * p - 1)
