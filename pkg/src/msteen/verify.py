"""The Adem-relation sweep: three independent checks of every relation.

For each inadmissible pair in range the normal form from the rewriting
engine is compared with

(i)   the product computed through the dual algebra and the pairing,
(ii)  evaluation on the test class of the truncated ``B mu_l`` ring
      (only up to a weight cutoff, since it gets expensive),
(iii) the classical Adem normal form after ``t = 1, r = 0``.

Pairs can be checked in worker processes; the report is always assembled
in the order the pairs were enumerated.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from msteen.algebra import BETA, normalize, specialize_classical
from msteen.bmu import equal_via_module
from msteen.classical import classical_product
from msteen.coeff import Prime
from msteen.milnor import admissible_to_milnor, product_via_duality


@dataclass
class PairCheck:
    word: str
    status: str
    seconds: float
    failures: list = field(default_factory=list)
    module_checked: bool = False


@dataclass
class VerifyReport:
    prime: int
    bound: int
    module_cutoff: int
    checks: list
    counterexamples: list
    seconds: float

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def summary(self) -> str:
        n_mod = sum(1 for c in self.checks if c.module_checked)
        head = "OK" if self.ok else "FAILED"
        lines = [
            f"{head}: {len(self.checks)} relations at l={self.prime} with a+b <= {self.bound}",
            f"  duality product and classical form checked on all; module evaluation on {n_mod} (weight <= {self.module_cutoff})",
            f"  counterexamples: {len(self.counterexamples)}",
            f"  wall clock: {self.seconds:.2f}s",
        ]
        for c in self.counterexamples:
            lines.append(f"  {c['word']}: {', '.join(c['failures'])}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "prime": self.prime,
            "bound": self.bound,
            "module_cutoff": self.module_cutoff,
            "ok": self.ok,
            "seconds": round(self.seconds, 3),
            "counterexamples": self.counterexamples,
            "checks": [asdict(c) | {"seconds": round(c.seconds, 4)} for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def inadmissible_pairs(prime: int, bound: int) -> list:
    """Words ``Sq^a Sq^b`` (l = 2) or ``P^a P^b``, ``P^a b P^b`` in Adem range.

    At ``l = 2``: ``0 < a < 2b`` and ``a + b <= bound``.  At odd ``l`` the
    bound applies to the two ``P`` exponents.
    """
    p = int(Prime(prime))
    out = []
    for total in range(2, bound + 1):
        for b in range(1, total):
            a = total - b
            if p == 2:
                if a < 2 * b:
                    out.append((("Sq", a), ("Sq", b)))
            else:
                if a < p * b:
                    out.append((("P", a), ("P", b)))
                if a <= p * b:
                    out.append((("P", a), BETA, ("P", b)))
    return out


def render_word(word) -> str:
    return " ".join("b" if t == BETA else f"{t[0]}^{t[1]}" for t in word)


def _classical_word(word, p: int) -> tuple:
    if p == 2:
        return tuple(t[1] for t in word)
    return tuple("b" if t == BETA else t for t in word)


def _word_weight(word, p: int) -> int:
    if p == 2:
        return sum(t[1] // 2 for t in word)
    return (p - 1) * sum(t[1] for t in word if t != BETA)


def check_pair(args) -> PairCheck:
    word, p, cutoff = args
    start = time.perf_counter()
    failures = []
    word = list(word)
    motivic = normalize(word, p)
    left, right = word[:1], word[1:]
    if admissible_to_milnor(motivic) != product_via_duality(left, right, p):
        failures.append("duality product differs")
    module = _word_weight(word, p) <= cutoff
    if module and not equal_via_module(word, motivic, p):
        failures.append("module evaluation differs")
    if specialize_classical(motivic) != classical_product(p, _classical_word(word, p)):
        failures.append("classical normal form differs")
    return PairCheck(render_word(word), "fail" if failures else "ok", time.perf_counter() - start, failures, module)


def thread_count() -> int:
    cap = os.environ.get("MSTEEN_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ValueError("MSTEEN_THREADS must be an integer") from None
    return n


def verify_adem(prime: int = 2, bound: int = 100, module_cutoff: int = 6, workers: int | None = None) -> VerifyReport:
    p = int(Prime(prime))
    if bound < 0 or module_cutoff < 0:
        raise ValueError("bound and cutoff must be non-negative")
    jobs = [(w, p, module_cutoff) for w in inadmissible_pairs(p, bound)]
    workers = thread_count() if workers is None else workers
    start = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(check_pair, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        checks = [check_pair(j) for j in jobs]
    bad = [{"word": c.word, "failures": c.failures} for c in checks if c.failures]
    return VerifyReport(p, bound, module_cutoff, checks, bad, time.perf_counter() - start)


__all__ = ["VerifyReport", "PairCheck", "verify_adem", "inadmissible_pairs", "check_pair", "thread_count"]
