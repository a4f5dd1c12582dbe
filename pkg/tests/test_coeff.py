import random
from math import comb

import pytest

from msteen.coeff import Bidegree, MotCoeff, Prime, binom_mod, carries, render_coeff_monomial, specialize

T = MotCoeff.tau()
R = MotCoeff.rho()


def test_prime_rejects_composites():
    assert Prime(7) == 7
    for bad in (0, 1, 4, 9, 15):
        with pytest.raises(ValueError):
            Prime(bad)


@pytest.mark.parametrize("x, y, p, want", [(7, 3, 2, 1), (5, 0, 3, 1), (0, 0, 5, 1), (2, 1, 2, 0), (3, 5, 2, 0)])
def test_binom_examples(x, y, p, want):
    assert binom_mod(x, y, p) == want


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_binom_matches_pascal_triangle(p):
    row = [1]
    for x in range(0, 1501):
        assert [binom_mod(x, y, p) for y in range(x + 1)] == row
        row = [1] + [(row[i] + row[i + 1]) % p for i in range(x)] + [1]


def test_binom_matches_factorials_at_large_arguments():
    rng = random.Random(0)
    for _ in range(600):
        p = rng.choice([2, 3, 5, 7, 11])
        x = rng.randint(0, 10**4)
        y = rng.randint(0, x)
        assert binom_mod(x, y, p) == comb(x, y) % p


@pytest.mark.parametrize("a, b, p, want", [(1, 1, 2, 1), (2, 1, 2, 0), (3, 1, 2, 2), (5, 4, 3, 2)])
def test_carries_examples(a, b, p, want):
    assert carries(a, b, p) == want


@pytest.mark.parametrize("p", [2, 3, 5])
def test_carry_free_iff_binomial_nonzero(p):
    for x in range(0, 400):
        for y in range(0, x + 1):
            assert (carries(y, x - y, p) == 0) == (binom_mod(x, y, p) != 0)


def test_coefficient_bidegrees():
    assert T.bidegree() == Bidegree(0, 1)
    assert R.bidegree() == Bidegree(1, 1)
    assert (T**3 * R).bidegree() == Bidegree(1, 4)
    with pytest.raises(ValueError):
        (T + R).bidegree()


def test_odd_prime_coefficients_are_scalars():
    with pytest.raises(ValueError):
        MotCoeff(3, {(1, 0): 1})
    assert MotCoeff.scalar(3, 4) == MotCoeff.scalar(3, 1)
    assert not MotCoeff.scalar(5, 10)


def test_ring_laws():
    rng = random.Random(3)

    def rand():
        return MotCoeff(2, {(rng.randint(0, 3), rng.randint(0, 3)): 1 for _ in range(rng.randint(0, 4))})

    for _ in range(200):
        x, y, z = rand(), rand(), rand()
        assert x * y == y * x
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert not (2 * x)
    for p in (3, 5):
        x = MotCoeff.scalar(p, 2)
        assert not (p * x)


def test_specialize_examples():
    assert specialize(T, 1, 0) == 1
    assert specialize(R, 1, 0) == 0
    assert specialize(T * R + R * R, 1, 0) == 0
    assert specialize(T * T + R, 1, 1) == 0


def test_rendering():
    assert str(MotCoeff.scalar(2, 1)) == "1"
    assert str(T) == "t"
    assert str(T * R) == "t r"
    assert render_coeff_monomial(2, 3, 0) == "2 t^3"
    assert str(MotCoeff.zero(3)) == "0"
