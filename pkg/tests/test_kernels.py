"""The compiled kernels agree with the pure-Python ones."""

import os
import random
import subprocess
import sys
from math import comb

import pytest

from msteen import _kernels_py as pure
from msteen import kernels
from msteen.bmu import BmuClass, module_ring
from msteen.bmu import test_class as product_class
from msteen.coeff import MotCoeff

compiled = pytest.importorskip("msteen._kernels", reason="compiled kernels not built")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


def test_fallback_forced_by_environment():
    env = dict(os.environ, MSTEEN_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from msteen.kernels import BACKEND; print(BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_binomials(p):
    for x in range(0, 200, 3):
        for y in range(0, 60):
            want = comb(x, y) % p
            assert pure.binom_mod(x, y, p) == want
            assert compiled.binom_mod(x, y, p) == want


def test_carries():
    for p in (2, 3, 5):
        for a in range(40):
            for b in range(40):
                assert compiled.carries(a, b, p) == pure.carries(a, b, p)


def test_poly_mul_into():
    rng = random.Random(2)
    for p in (2, 3):
        for _ in range(50):
            left = {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(1, p - 1) for _ in range(4)}
            right = {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(1, p - 1) for _ in range(4)}
            a, b = {}, {}
            pure.poly_mul_into(a, left, right, p)
            compiled.poly_mul_into(b, left, right, p)
            assert a == b


def test_ring_mono_mul():
    rng = random.Random(4)
    for p in (2, 3, 5):
        N = 7
        for _ in range(300):
            x = tuple(v for _ in range(3) for v in (rng.randint(0, 1), rng.randint(0, N - 1)))
            y = tuple(v for _ in range(3) for v in (rng.randint(0, 1), rng.randint(0, N - 1)))
            assert compiled.ring_mono_mul(x, y, p, N) == pure.ring_mono_mul(x, y, p, N)


def _random_packed(rng, ring):
    x = BmuClass(ring)
    for _ in range(rng.randint(1, 4)):
        m = []
        for _ in range(ring.n):
            m += [rng.randint(0, 1), rng.randint(0, ring.N - 1)]
        c = MotCoeff(ring.p, {(rng.randint(0, 2), rng.randint(0, 2)): 1}) if ring.p == 2 else 1
        x = x + BmuClass(ring, {tuple(m): c})
    return ring.pack(x._flat())


@pytest.mark.parametrize("p", [2, 3, 5])
def test_apply_op(p):
    rng = random.Random(p)
    ring = module_ring(p, 3, 9)
    for _ in range(60):
        src = _random_packed(rng, ring)
        n, slot = rng.randint(0, 6), rng.randint(0, 1)
        assert compiled.apply_op(src, n, slot, p, ring.n, ring.N) == pure.apply_op(src, n, slot, p, ring.n, ring.N)


def test_apply_op_on_wide_keys():
    # keys beyond 63 bits take the arbitrary-precision path
    ring = module_ring(2, 9, 14)
    src = ring.pack(product_class(ring, 6)._flat())
    assert ring._shift + 2 * kernels.COEFF_BITS > 63
    for n in range(3):
        for slot in (0, 1):
            assert compiled.apply_op(src, n, slot, 2, ring.n, ring.N) == pure.apply_op(src, n, slot, 2, ring.n, ring.N)
