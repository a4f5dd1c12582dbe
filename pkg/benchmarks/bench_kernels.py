"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Kernel timings import
both implementations side by side; the end-to-end timing runs a module
evaluation in a subprocess with ``MSTEEN_PURE_PYTHON=1`` for the fallback.
"""

import argparse
import os
import subprocess
import sys
import timeit

from msteen import _kernels_py as pure
from msteen.bmu import module_ring, test_class

try:
    from msteen import _kernels as compiled
except ImportError:
    compiled = None

END_TO_END = """
import time
from msteen.algebra import normalize
from msteen.bmu import equal_via_module
from msteen.kernels import BACKEND
word = [("Sq", 5), ("Sq", 7)]
start = time.perf_counter()
assert equal_via_module(word, normalize(word, 2), 2)
print(BACKEND, time.perf_counter() - start)
"""


def packed_class(p, weight):
    ring = module_ring(p, weight + 1, weight + 2)
    return ring, ring.pack(test_class(ring)._flat())


def kernel_cases():
    cases = []
    for p, weight, n, slot in [(2, 4, 2, 1), (2, 6, 3, 0), (3, 4, 1, 1), (5, 4, 1, 0)]:
        ring, src = packed_class(p, weight)
        cases.append((f"apply_op l={p} w={weight} P^{n}{' b' if slot else ''}", (src, n, slot, p, ring.n, ring.N)))
    return cases


def bench(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernels not built; only the fallback is available")
    print(f"{'case':40s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    rows = [(name, "apply_op", a) for name, a in kernel_cases()]
    rows.append(("binom_mod x 10^4", None, None))
    rows.append(("ring_mono_mul x 10^4", None, None))
    for name, fn_name, a in rows:
        if fn_name == "apply_op":
            t_py = bench(pure.apply_op, a, args.repeat)
            t_cy = bench(compiled.apply_op, a, args.repeat) if compiled else float("nan")
        elif name.startswith("binom"):
            def loop(mod):
                for x in range(100):
                    for y in range(100):
                        mod.binom_mod(x * 37, y * 5, 3)
            t_py = bench(loop, (pure,), args.repeat)
            t_cy = bench(loop, (compiled,), args.repeat) if compiled else float("nan")
        else:
            x, y = (1, 3, 1, 2, 0, 1), (1, 1, 0, 2, 1, 0)

            def loop(mod):
                for _ in range(10_000):
                    mod.ring_mono_mul(x, y, 2, 8)
            t_py = bench(loop, (pure,), args.repeat)
            t_cy = bench(loop, (compiled,), args.repeat) if compiled else float("nan")
        print(f"{name:40s} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:8.1f}x")
    if not args.skip_end_to_end:
        print("\nend to end: weight-6 module evaluation of Sq^5 Sq^7")
        for pure_flag in ("0", "1"):
            env = dict(os.environ, MSTEEN_PURE_PYTHON=pure_flag)
            out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
            backend, secs = out.stdout.split()
            print(f"  {backend:8s} {float(secs):8.3f}s")


if __name__ == "__main__":
    main()
