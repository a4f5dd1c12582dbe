"""The dual algebra: monomials in ``tau_k`` and ``xi_k`` with right coefficients.

A dual monomial ``tau_0^e0 xi_1^r1 tau_1^e1 xi_2^r2 ...`` is stored as the
zero-trimmed index tuple ``(e0, r1, e1, r2, ...)``; the unit ``xi_0`` is
``()``.  Coefficients act on the right and are central.

Relations: ``tau_k^2 = xi_{k+1} t + tau_0 xi_{k+1} r + tau_{k+1} r`` at
``l = 2`` and ``tau_k^2 = 0`` at odd ``l``, where ``tau``'s anticommute.

The tensor product used by the coproduct is twisted: a coefficient ``x`` on
the left factor moves into the right factor as ``lambda*(x)``, with
``lambda*(t) = t + tau_0 r`` and ``lambda*(r) = r``.
"""

from __future__ import annotations

import threading

from msteen.coeff import Bidegree, MotCoeff, Prime, render_coeff_monomial
from msteen.indices import index_eps, index_key, index_r, make_index, trim

__all__ = [
    "UNIT",
    "tau",
    "xi",
    "dual_monomial",
    "dual_bidegree",
    "DualElement",
    "DualTensor",
    "dual_mul",
    "dual_coproduct",
    "tensor_normalize",
    "lambda_star",
    "render_dual_monomial",
]

UNIT = ()
_LOCK = threading.Lock()


def _add(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _get(index: tuple, pos: int) -> int:
    return index[pos] if pos < len(index) else 0


def _set(index: tuple, pos: int, value: int) -> tuple:
    lst = list(index) + [0] * max(0, pos + 1 - len(index))
    lst[pos] = value
    return trim(lst)


def tau(k: int) -> tuple:
    return _set(UNIT, 2 * k, 1)


def xi(k: int, e: int = 1) -> tuple:
    if k == 0 or e == 0:
        return UNIT
    return _set(UNIT, 2 * k - 1, e)


def dual_monomial(eps=(), r=()) -> tuple:
    """Index tuple of ``tau^eps xi^r`` (``r`` starts at ``xi_1``)."""
    return make_index(eps, r)


def dual_bidegree(index: tuple, p: int) -> Bidegree:
    deg = 0
    wt = 0
    for pos, x in enumerate(index):
        if not x:
            continue
        if pos % 2 == 0:
            w = p ** (pos // 2) - 1
            deg += 2 * w + 1
        else:
            w = p ** ((pos + 1) // 2) - 1
            deg += 2 * w * x
        wt += w * x
    return Bidegree(deg, wt)


def dual_parity(index: tuple) -> int:
    return sum(index[0::2]) & 1


def render_dual_monomial(index: tuple) -> str:
    parts = []
    for pos, x in enumerate(index):
        if not x:
            continue
        if pos % 2 == 0:
            parts.append(f"tau_{pos // 2}")
        else:
            k = (pos + 1) // 2
            parts.append(f"xi_{k}" if x == 1 else f"xi_{k}^{x}")
    return " ".join(parts)


def render_dual_term(c: int, a: int, b: int, index: tuple) -> str:
    body = render_dual_monomial(index)
    coeff = render_coeff_monomial(1, a, b) if (a or b) else ""
    parts = []
    if c != 1:
        parts.append(str(c))
    if body:
        parts.append(body)
    if coeff:
        parts.append(coeff)
    return " ".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# multiplication

_TAU_MUL: dict = {}
_MONO_MUL: dict = {}


def _mul_tau(index: tuple, k: int, p: int) -> dict:
    """``index * tau_k`` as a flat dict ``{(index, a, b): c}``."""
    key = (p, index, k)
    hit = _TAU_MUL.get(key)
    if hit is not None:
        return hit
    pos = 2 * k
    out: dict = {}
    if _get(index, pos):
        if p == 2:
            rest = _set(index, pos, 0)
            with_xi = _set(rest, pos + 1, _get(rest, pos + 1) + 1)
            _add(out, (with_xi, 1, 0), 1, 2)
            for (m, a, b), c in _mul_tau(with_xi, 0, p).items():
                _add(out, (m, a, b + 1), c, 2)
            for (m, a, b), c in _mul_tau(rest, k + 1, p).items():
                _add(out, (m, a, b + 1), c, 2)
    else:
        sign = 1
        if p != 2 and sum(index[pos + 2 :: 2]) & 1:
            sign = -1
        out[(_set(index, pos, 1), 0, 0)] = sign % p
    with _LOCK:
        return _TAU_MUL.setdefault(key, out)


def _add_xi(index: tuple, other: tuple) -> tuple:
    lst = list(index) + [0] * max(0, len(other) - len(index))
    for pos in range(1, len(other), 2):
        lst[pos] += other[pos]
    return trim(lst)


def mono_mul(i1: tuple, i2: tuple, p: int) -> dict:
    """Product of two dual monomials as a flat dict ``{(index, a, b): c}``."""
    if not i2:
        return {(i1, 0, 0): 1}
    if not i1:
        return {(i2, 0, 0): 1}
    key = (p, i1, i2)
    hit = _MONO_MUL.get(key)
    if hit is not None:
        return hit
    flat = {(i1, 0, 0): 1}
    for k, e in enumerate(index_eps(i2)):
        if not e:
            continue
        nxt: dict = {}
        for (m, a, b), c in flat.items():
            for (m2, a2, b2), c2 in _mul_tau(m, k, p).items():
                _add(nxt, (m2, a + a2, b + b2), c * c2, p)
        flat = nxt
    out: dict = {}
    for (m, a, b), c in flat.items():
        _add(out, (_add_xi(m, i2), a, b), c, p)
    with _LOCK:
        return _MONO_MUL.setdefault(key, out)


def flat_mul(x: dict, y: dict, p: int) -> dict:
    out: dict = {}
    for (m1, a1, b1), c1 in x.items():
        for (m2, a2, b2), c2 in y.items():
            for (m, a, b), c in mono_mul(m1, m2, p).items():
                _add(out, (m, a + a1 + a2, b + b1 + b2), c * c1 * c2, p)
    return out


_LAMBDA: dict = {}


def lambda_star_flat(a: int, b: int) -> dict:
    """``lambda*(t^a r^b) = (t + tau_0 r)^a r^b`` as a flat dual element."""
    key = (a, b)
    hit = _LAMBDA.get(key)
    if hit is not None:
        return hit
    if a == 0:
        out = {(UNIT, 0, b): 1}
    else:
        out = flat_mul(lambda_star_flat(a - 1, b), {(UNIT, 1, 0): 1, (tau(0), 0, 1): 1}, 2)
    with _LOCK:
        return _LAMBDA.setdefault(key, out)


def lambda_star(c: MotCoeff) -> "DualElement":
    """Left unit: a coefficient viewed inside the dual algebra."""
    p = int(c.prime)
    out: dict = {}
    for (a, b), s in c.terms.items():
        src = lambda_star_flat(a, b) if p == 2 else {(UNIT, 0, 0): 1}
        for k, v in src.items():
            _add(out, k, v * s, p)
    return DualElement._from_flat(p, out)


# ---------------------------------------------------------------------------
# elements


class DualElement:
    """Right-coefficient combination of dual monomials."""

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms: dict | None = None):
        self.prime = Prime(prime)
        p = int(self.prime)
        clean = {}
        for m, c in (terms or {}).items():
            if not isinstance(c, MotCoeff):
                c = MotCoeff.scalar(p, c)
            m = trim(m)
            if any(x not in (0, 1) for x in m[0::2]) or any(x < 0 for x in m):
                raise ValueError(f"{m} is not a reduced dual monomial")
            if c:
                clean[m] = clean[m] + c if m in clean else c
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def _from_flat(cls, p: int, flat: dict) -> "DualElement":
        grouped: dict = {}
        for (m, a, b), c in flat.items():
            grouped.setdefault(m, {})[(a, b)] = c
        out = cls.__new__(cls)
        out.prime = Prime(p)
        out.terms = {m: MotCoeff(p, t) for m, t in grouped.items()}
        return out

    @classmethod
    def monomial(cls, prime: int, index: tuple, coeff=1) -> "DualElement":
        return cls(prime, {index: coeff})

    def _flat(self) -> dict:
        out = {}
        for m, c in self.terms.items():
            for (a, b), s in c.terms.items():
                out[(m, a, b)] = s
        return out

    def __add__(self, other: "DualElement") -> "DualElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return DualElement(self.prime, out)

    def __neg__(self) -> "DualElement":
        return DualElement(self.prime, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "DualElement") -> "DualElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DualElement):
            return dual_mul(self, other)
        if isinstance(other, int):
            other = MotCoeff.scalar(self.prime, other)
        if isinstance(other, MotCoeff):
            return DualElement(self.prime, {m: c * other for m, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, DualElement):
            return NotImplemented
        return self.prime == other.prime and self.terms == other.terms

    def __hash__(self):
        return hash((int(self.prime), frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list:
        out = []
        for m in sorted(self.terms, key=index_key):
            for (a, b), c in sorted(self.terms[m].terms.items()):
                out.append((m, (a, b), c))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(render_dual_term(c, a, b, m) for m, (a, b), c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"DualElement({int(self.prime)}, {self})"


def dual_mul(x: DualElement, y: DualElement) -> DualElement:
    """Graded-commutative product with the ``tau_k^2`` relations applied."""
    if x.prime != y.prime:
        raise ValueError("elements over different primes")
    p = int(x.prime)
    return DualElement._from_flat(p, flat_mul(x._flat(), y._flat(), p))


# ---------------------------------------------------------------------------
# twisted tensor products


class DualTensor:
    """Sum of ``I (x) J * coefficient`` with no coefficient between factors."""

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms: dict | None = None):
        self.prime = Prime(prime)
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def _from_flat(cls, p: int, flat: dict) -> "DualTensor":
        grouped: dict = {}
        for (i, j, a, b), c in flat.items():
            grouped.setdefault((i, j), {})[(a, b)] = c
        return cls(p, {k: MotCoeff(p, t) for k, t in grouped.items()})

    def _flat(self) -> dict:
        out = {}
        for (i, j), c in self.terms.items():
            for (a, b), s in c.terms.items():
                out[(i, j, a, b)] = s
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DualTensor):
            return NotImplemented
        return self.prime == other.prime and self.terms == other.terms

    def __add__(self, other: "DualTensor") -> "DualTensor":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return DualTensor(self.prime, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, j in sorted(self.terms, key=lambda k: (index_key(k[0]), index_key(k[1]))):
            left = render_dual_monomial(i) or "1"
            for (a, b), c in sorted(self.terms[(i, j)].terms.items()):
                parts.append(f"{left} ⊗ {render_dual_term(c, a, b, j)}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"DualTensor({int(self.prime)}, {self})"


def _twist_into(out: dict, p: int, i: tuple, la: int, lb: int, j: tuple, ra: int, rb: int, c: int) -> None:
    """Add ``(i t^la r^lb) (x) (j t^ra r^rb) * c`` in canonical form to ``out``."""
    if p != 2 or (la == 0 and lb == 0):
        _add(out, (i, j, la + ra, lb + rb), c, p)
        return
    for (k, ka, kb), kc in lambda_star_flat(la, lb).items():
        for (m, ma, mb), mc in mono_mul(k, j, p).items():
            _add(out, (i, m, ka + ma + ra, kb + mb + rb), c * kc * mc, p)


def tensor_normalize(raw, prime: int) -> DualTensor:
    """Canonical form of ``sum (I x) (x) (J y) c`` given as 5-tuples.

    Each item of ``raw`` is ``(I, x, J, y, c)`` with ``x, y`` either
    :class:`MotCoeff` or exponent pairs ``(a, b)``, and ``c`` a scalar.
    """
    p = int(Prime(prime))
    out: dict = {}
    for i, x, j, y, c in raw:
        xs = x.terms.items() if isinstance(x, MotCoeff) else [(tuple(x), 1)]
        ys = y.terms.items() if isinstance(y, MotCoeff) else [(tuple(y), 1)]
        for (la, lb), s1 in xs:
            for (ra, rb), s2 in ys:
                _twist_into(out, p, trim(i), la, lb, trim(j), ra, rb, c * s1 * s2)
    return DualTensor._from_flat(p, out)


def tensor_mul_flat(x: dict, y: dict, p: int, left_filter=None) -> dict:
    """Product in the twisted tensor algebra of two canonical flat tensors."""
    out: dict = {}
    for (i1, j1, a1, b1), c1 in x.items():
        pj1 = dual_parity(j1)
        for (i2, j2, a2, b2), c2 in y.items():
            sign = -1 if (p != 2 and pj1 and dual_parity(i2)) else 1
            left = mono_mul(i1, i2, p)
            right = mono_mul(j1, j2, p)
            for (i, la, lb), lc in left.items():
                if left_filter is not None and not left_filter(i):
                    continue
                for (j, ra, rb), rc in right.items():
                    _twist_into(out, p, i, la, lb, j, ra + a1 + a2, rb + b1 + b2, sign * c1 * c2 * lc * rc)
    return out


def _generator_image(p: int, pos: int, restricted: bool) -> dict:
    """Coproduct of ``tau_k`` (even ``pos``) or ``xi_k`` (odd ``pos``)."""
    out: dict = {}
    if pos % 2 == 1:
        k = (pos + 1) // 2
        top = 1 if restricted else k
        for i in range(min(top, k) + 1):
            _add(out, (xi(i), xi(k - i, p**i), 0, 0), 1, p)
    else:
        k = pos // 2
        _add(out, (UNIT, tau(k), 0, 0), 1, p)
        top = 0 if restricted else k
        for i in range(top + 1):
            _add(out, (tau(i), xi(k - i, p**i), 0, 0), 1, p)
    return out


def small_left(index: tuple) -> bool:
    """Whether a dual monomial lies in the span of ``tau_0^e xi_1^n``."""
    return len(index) <= 2


_COPROD: dict = {}


def coproduct_flat(index: tuple, p: int, restricted: bool = False) -> dict:
    """Coproduct of a dual monomial as a flat tensor ``{(I, J, a, b): c}``.

    With ``restricted`` set, left factors outside ``tau_0^e xi_1^n`` are
    discarded; they span an ideal, so the remaining terms are exact.
    """
    key = (p, index, restricted)
    hit = _COPROD.get(key)
    if hit is not None:
        return hit
    if not index:
        out = {(UNIT, UNIT, 0, 0): 1}
    else:
        pos = next(i for i, x in enumerate(index) if x)
        rest = _set(index, pos, index[pos] - 1)
        gen = _generator_image(p, pos, restricted)
        out = tensor_mul_flat(gen, coproduct_flat(rest, p, restricted), p, small_left if restricted else None)
    with _LOCK:
        return _COPROD.setdefault(key, out)


def dual_coproduct(x: DualElement) -> DualTensor:
    """The coproduct, a ring morphism into the twisted tensor product."""
    p = int(x.prime)
    out: dict = {}
    for m, c in x.terms.items():
        for (i, j, a, b), v in coproduct_flat(m, p).items():
            for (ca, cb), s in c.terms.items():
                _add(out, (i, j, a + ca, b + cb), v * s, p)
    return DualTensor._from_flat(p, out)


def dual_tensor_mul(x: DualTensor, y: DualTensor) -> DualTensor:
    p = int(x.prime)
    return DualTensor._from_flat(p, tensor_mul_flat(x._flat(), y._flat(), p))


def dual_counit_split(index: tuple) -> tuple:
    return index_eps(index), index_r(index)
