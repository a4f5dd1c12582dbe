"""Admissible monomials, the motivic Adem rewriting engine and the coproduct.

A monomial ``beta^e0 P^s1 beta^e1 ... P^sk beta^ek`` is the tuple
``(e0, s1, e1, ..., sk, ek)``; the identity is ``(0,)``.  It is admissible
when ``s_i >= l * s_{i+1} + e_i``.

Elements carry coefficients on the left.  Internally an element is a flat
dict ``{(monomial, a, b): c}`` standing for ``c t^a r^b monomial``.

At ``l = 2`` the rewriting engine works with Steenrod squares
``Sq^{2n} = P^n`` and ``Sq^{2n+1} = beta P^n``, so that all four motivic Adem
relations are used literally.  Pushing a coefficient to the left uses

    Sq^{2n} o t   = t Sq^{2n} + t r Sq^{2n-1}
    Sq^{2n+1} o t = t Sq^{2n+1} + r Sq^{2n} + r^2 Sq^{2n-1}

and the fact that ``r`` is central.  At odd ``l`` coefficients are scalars.
"""

from __future__ import annotations

import threading
from typing import Iterable, Sequence

from msteen.coeff import Bidegree, MotCoeff, Prime, render_coeff_monomial
from msteen.indices import index_key, theta_inverse
from msteen.kernels import binom_mod

IDENTITY = (0,)
BETA = ("b",)


def P(n: int) -> tuple:
    return ("P", n)


def Sq(n: int) -> tuple:
    return ("Sq", n)


# ---------------------------------------------------------------------------
# monomials


def is_monomial(m) -> bool:
    if not isinstance(m, tuple) or len(m) % 2 == 0:
        return False
    for i, x in enumerate(m):
        if i % 2 == 0 and x not in (0, 1):
            return False
        if i % 2 == 1 and (not isinstance(x, int) or x <= 0):
            return False
    return True


def is_admissible(m: tuple, p: int) -> bool:
    k = (len(m) - 1) // 2
    for i in range(1, k):
        if m[2 * i - 1] < p * m[2 * i + 1] + m[2 * i]:
            return False
    return True


def weight_of(m: tuple, p: int) -> int:
    return (p - 1) * sum(m[1::2])


def bidegree(m: tuple, p: int) -> Bidegree:
    """Bidegree ``(2w + sum e_i, w)`` with ``w = (l - 1) sum s_i``."""
    w = weight_of(m, p)
    return Bidegree(2 * w + sum(m[0::2]), w)


def first_degree_parity(m: tuple) -> int:
    return sum(m[0::2]) & 1


def mono_tokens(m: tuple) -> list:
    """The word of generators spelled by a monomial."""
    out = []
    for i, x in enumerate(m):
        if i % 2 == 0:
            if x:
                out.append(BETA)
        else:
            out.append(("P", x))
    return out


def tokens_to_mono(tokens: Iterable) -> tuple | None:
    """Encode a word in ``b`` and ``P^n`` (``n > 0``); ``None`` if it has ``b b``."""
    out = [0]
    for tok in tokens:
        if tok == BETA:
            if out[-1]:
                return None
            out[-1] = 1
        else:
            out.extend((tok[1], 0))
    return tuple(out)


def mono_to_sq(m: tuple) -> tuple:
    """Square sequence of a monomial at ``l = 2``."""
    k = (len(m) - 1) // 2
    seq = [2 * m[2 * i - 1] + m[2 * i - 2] for i in range(1, k + 1)]
    if m[-1]:
        seq.append(1)
    return tuple(seq)


def sq_to_mono(seq: Sequence[int]) -> tuple:
    """Inverse of ``mono_to_sq`` for sequences without ``Sq^1 Sq^1`` clashes."""
    out = [0]
    for y in seq:
        if y & 1:
            if out[-1]:
                raise ValueError("consecutive Bocksteins")
            out[-1] = 1
        if y >= 2:
            out.extend((y >> 1, 0))
    return tuple(out)


def render_monomial(m: tuple, p: int) -> str:
    if m == IDENTITY:
        return "1"
    if p == 2:
        return " ".join(f"Sq^{y}" for y in mono_to_sq(m))
    return " ".join("b" if t == BETA else f"P^{t[1]}" for t in mono_tokens(m))


def mono_sort_key(m: tuple, p: int) -> tuple:
    return index_key(theta_inverse(m, p))


# ---------------------------------------------------------------------------
# flat dict helpers


def _add(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# Adem relations

_CACHE_LOCK = threading.Lock()
_ADEM_CACHE: dict = {}


def _cached(cache: dict, key, compute):
    # write-once per key; a racing duplicate computation yields the same value
    try:
        return cache[key]
    except KeyError:
        pass
    value = compute()
    with _CACHE_LOCK:
        return cache.setdefault(key, value)


def adem_sq(x: int, y: int) -> dict:
    """Right-hand side of the motivic relation for ``Sq^x Sq^y``, ``0 < x < 2y``.

    Returns ``{(i, j, a, b): 1}`` meaning ``t^a r^b Sq^i Sq^j`` (``Sq^0 = 1``).
    """
    if not 0 < x < 2 * y:
        raise ValueError(f"Sq^{x} Sq^{y} is not in the range 0 < x < 2y")
    return _cached(_ADEM_CACHE, (2, x, y), lambda: _adem_sq(x, y))


def _adem_sq(a: int, b: int) -> dict:
    out: dict = {}

    def put(i, j, ta, rb, c):
        if c:
            _add(out, (i, j, ta, rb), 1, 2)

    top = a // 2
    if a % 2 == 0 and b % 2 == 1:
        for j in range(top + 1):
            put(a + b - j, j, 0, 0, binom_mod(b - 1 - j, a - 2 * j, 2))
        for j in range(1, top + 1, 2):
            put(a + b - j - 1, j, 0, 1, binom_mod(b - 1 - j, a - 2 * j, 2))
    elif a % 2 == 1 and b % 2 == 1:
        for j in range(1, top + 1, 2):
            put(a + b - j, j, 0, 0, binom_mod(b - 1 - j, a - 2 * j, 2))
    elif a % 2 == 0:
        for j in range(top + 1):
            put(a + b - j, j, j % 2, 0, binom_mod(b - 1 - j, a - 2 * j, 2))
    else:
        for j in range(0, top + 1, 2):
            put(a + b - j, j, 0, 0, binom_mod(b - 1 - j, a - 2 * j, 2))
        for j in range(1, top + 1, 2):
            put(a + b - j - 1, j, 0, 1, binom_mod(b - 1 - j, a - 1 - 2 * j, 2))
    return out


def adem_odd(a: int, eps: int, b: int, p: int) -> dict:
    """Right-hand side for ``P^a b^eps P^b`` at odd ``p``, as ``{monomial: c}``."""
    if eps == 0 and not 0 < a < p * b:
        raise ValueError(f"P^{a} P^{b} is not in the range 0 < a < {p}b")
    if eps == 1 and not 0 < a <= p * b:
        raise ValueError(f"P^{a} b P^{b} is not in the range 0 < a <= {p}b")
    return _cached(_ADEM_CACHE, (p, a, eps, b), lambda: _adem_odd(a, eps, b, p))


def _pp(e0, x, e1, t, e2=0):
    return (e0, x, e1) if t == 0 else (e0, x, e1, t, e2)


def _adem_odd(a: int, eps: int, b: int, p: int) -> dict:
    out: dict = {}
    if eps == 0:
        for t in range(a // p + 1):
            c = binom_mod((p - 1) * (b - t) - 1, a - p * t, p)
            if c:
                _add(out, _pp(0, a + b - t, 0, t), (-1) ** (a + t) * c, p)
    else:
        for t in range(a // p + 1):
            c = binom_mod((p - 1) * (b - t), a - p * t, p)
            if c:
                _add(out, _pp(1, a + b - t, 0, t), (-1) ** (a + t) * c, p)
        for t in range((a - 1) // p + 1):
            c = binom_mod((p - 1) * (b - t) - 1, a - p * t - 1, p)
            if c:
                m = (0, a + b - t, 1, t, 0) if t else (0, a + b - t, 1)
                _add(out, m, (-1) ** (a + t + 1) * c, p)
    return out


def adem(a: int, mid_bockstein: int, b: int, prime: int) -> "SteenrodElement":
    """The Adem relation for ``P^a b^mid P^b`` as an admissible element.

    At ``l = 2`` this is the relation for ``Sq^{2a} Sq^{2b + mid}``; use
    :func:`adem_sq_element` for pairs with an odd first square.
    """
    p = int(Prime(prime))
    if a <= 0 or b <= 0:
        raise ValueError("indices must be positive")
    if p == 2:
        return adem_sq_element(2 * a, 2 * b + mid_bockstein)
    flat = {(m, 0, 0): c for m, c in adem_odd(a, mid_bockstein, b, p).items()}
    return SteenrodElement._from_flat(p, flat)


def adem_sq_element(x: int, y: int) -> "SteenrodElement":
    flat: dict = {}
    for (i, j, ta, rb), c in adem_sq(x, y).items():
        seq = (i, j) if j else (i,)
        _add(flat, (seq, ta, rb), c, 2)
    return SteenrodElement._from_flat(2, flat, sq=True)


# ---------------------------------------------------------------------------
# left multiplication by a generator: l = 2 (square sequences)

_SQ_TAU: dict = {}
_SQ_GEN: dict = {}


def _sq_tau1(x: int) -> dict:
    """``Sq^x o t`` as ``{(x', a, b): 1}`` (coefficient on the left)."""
    out: dict = {}
    _add(out, (x, 1, 0), 1, 2)
    if x == 0:
        return out
    if x % 2 == 0:
        _add(out, (x - 1, 1, 1), 1, 2)
    else:
        _add(out, (x - 1, 0, 1), 1, 2)
        if x >= 3:
            _add(out, (x - 2, 0, 2), 1, 2)
    return out


def sq_compose_tau(x: int, a: int) -> dict:
    """``Sq^x o t^a`` as ``{(x', a', b'): 1}``."""
    key = (x, a)
    hit = _SQ_TAU.get(key)
    if hit is not None:
        return hit
    if a == 0:
        out = {(x, 0, 0): 1}
    else:
        out = {}
        for (x1, a1, b1) in _sq_tau1(x):
            for (x2, a2, b2) in sq_compose_tau(x1, a - 1):
                _add(out, (x2, a1 + a2, b1 + b2), 1, 2)
    with _CACHE_LOCK:
        return _SQ_TAU.setdefault(key, out)


def _sq_gen(x: int, m: tuple) -> dict:
    """``Sq^x`` times the admissible square sequence ``m``, flat."""
    if x == 0:
        return {(m, 0, 0): 1}
    if not m or x >= 2 * m[0]:
        return {((x,) + m, 0, 0): 1}
    key = (x, m)
    hit = _SQ_GEN.get(key)
    if hit is not None:
        return hit
    out: dict = {}
    tail = m[1:]
    for (i, j, ta, rb) in adem_sq(x, m[0]):
        inner = _sq_gen(j, tail)
        for (m2, a2, b2) in _sq_left(i, inner):
            _add(out, (m2, a2 + ta, b2 + rb), 1, 2)
    with _CACHE_LOCK:
        return _SQ_GEN.setdefault(key, out)


def _sq_left(x: int, flat: dict) -> dict:
    """``Sq^x`` composed on the left of a flat element in square form."""
    out: dict = {}
    for (m, a, b) in flat:
        for (x1, a1, b1) in sq_compose_tau(x, a):
            for (m2, a2, b2) in _sq_gen(x1, m):
                _add(out, (m2, a1 + a2, b + b1 + b2), 1, 2)
    return out


# ---------------------------------------------------------------------------
# left multiplication by a generator: odd primes

_ODD_GEN: dict = {}


def _odd_gen(p: int, g, m: tuple) -> dict:
    if g == BETA:
        return {} if m[0] else {((1,) + m[1:], 0, 0): 1}
    a = g[1]
    if len(m) == 1:
        return {((0, a, m[0]), 0, 0): 1}
    eps0, s1 = m[0], m[1]
    if a >= p * s1 + eps0:
        return {((0, a) + m, 0, 0): 1}
    key = (p, a, m)
    hit = _ODD_GEN.get(key)
    if hit is not None:
        return hit
    out: dict = {}
    tail = m[2:]
    for mono, c in adem_odd(a, eps0, s1, p).items():
        flat = {(tail, 0, 0): c}
        for tok in reversed(mono_tokens(mono)):
            flat = _odd_left(p, tok, flat)
        for key2, c2 in flat.items():
            _add(out, key2, c2, p)
    with _CACHE_LOCK:
        return _ODD_GEN.setdefault(key, out)


def _odd_left(p: int, g, flat: dict) -> dict:
    out: dict = {}
    for (m, _, _), c in flat.items():
        for key, c2 in _odd_gen(p, g, m).items():
            _add(out, key, c * c2, p)
    return out


# ---------------------------------------------------------------------------
# words


def _coerce_token(tok, p: int):
    """Return a normalized token: BETA, ("P", n), ("Sq", n), MotCoeff or None (zero)."""
    if isinstance(tok, MotCoeff):
        if tok.prime != p:
            raise ValueError("coefficient over a different prime")
        return tok
    if isinstance(tok, int):
        return MotCoeff.scalar(p, tok)
    if tok == BETA:
        return BETA
    if isinstance(tok, tuple) and len(tok) == 2 and tok[0] in ("P", "Sq"):
        if tok[0] == "Sq" and p != 2:
            raise ValueError("Sq^n is only available at l = 2")
        return tok
    raise ValueError(f"unknown word factor {tok!r}")


def _engine_tokens(word: Iterable, p: int) -> list | None:
    """Prepare a word for the engine; ``None`` if it is zero.

    At ``l = 2`` generators become square indices (a Bockstein directly in
    front of ``P^n`` is read as ``Sq^{2n+1}``); at odd ``l`` they stay as
    ``BETA`` / ``("P", n)``.  ``P^0`` / ``Sq^0`` are dropped.
    """
    toks = [_coerce_token(t, p) for t in word]
    out: list = []
    for tok in toks:
        if isinstance(tok, MotCoeff):
            out.append(tok)
            continue
        if tok == BETA:
            out.append(1 if p == 2 else BETA)
            continue
        kind, n = tok
        if n < 0:
            return None
        if n == 0:
            continue
        if p == 2:
            x = 2 * n if kind == "P" else n
            if kind == "P" and out and out[-1] == 1:
                out[-1] = x + 1
            else:
                out.append(x)
        else:
            out.append(tok)
    return out


def _apply_engine_tokens(p: int, toks: list, flat: dict) -> dict:
    """Compose engine tokens (right to left) onto a flat element."""
    for tok in reversed(toks):
        if isinstance(tok, MotCoeff):
            flat = _scale_flat(p, flat, tok)
        elif p == 2:
            flat = _sq_left(tok, flat)
        else:
            flat = _odd_left(p, tok, flat)
        if not flat:
            break
    return flat


def _scale_flat(p: int, flat: dict, coeff: MotCoeff) -> dict:
    out: dict = {}
    for (m, a, b), c in flat.items():
        for (ca, cb), s in coeff.terms.items():
            _add(out, (m, a + ca, b + cb), c * s, p)
    return out


def _to_engine(p: int, m: tuple) -> tuple:
    return mono_to_sq(m) if p == 2 else m


def _from_engine(p: int, m: tuple) -> tuple:
    return sq_to_mono(m) if p == 2 else m


def normalize(word, prime: int = 2) -> "SteenrodElement":
    """Admissible form of a word of generators and coefficients.

    ``word`` is a sequence of ``BETA``, ``P(n)``, ``Sq(n)`` (``l = 2``),
    :class:`MotCoeff` or ``int`` factors, or an existing element.
    """
    p = int(Prime(prime))
    if isinstance(word, SteenrodElement):
        return word
    toks = _engine_tokens(word, p)
    if toks is None:
        return SteenrodElement(p)
    start = {((), 0, 0): 1} if p == 2 else {(IDENTITY, 0, 0): 1}
    return SteenrodElement._from_flat(p, _apply_engine_tokens(p, toks, start), sq=(p == 2))


def compose_coefficient(mono: tuple, coeff: MotCoeff) -> "SteenrodElement":
    """``F o coeff`` rewritten with coefficients on the left."""
    p = int(coeff.prime)
    return normalize(mono_tokens(mono) + [coeff], p)


def _mul_flat(p: int, left: dict, right: dict) -> dict:
    """Product of two flat elements in engine coordinates."""
    out: dict = {}
    for (m1, a1, b1), c1 in left.items():
        toks = list(m1) if p == 2 else mono_tokens(m1)
        # coefficients of the right factor are pushed through m1 termwise
        prod = _apply_engine_tokens(p, toks, right)
        for (m, a, b), c in prod.items():
            _add(out, (m, a + a1, b + b1), c * c1, p)
    return out


def multiply(e1: "SteenrodElement", e2: "SteenrodElement") -> "SteenrodElement":
    if e1.prime != e2.prime:
        raise ValueError("elements over different primes")
    p = int(e1.prime)
    flat = _mul_flat(p, e1._engine_flat(), e2._engine_flat())
    return SteenrodElement._from_flat(p, flat, sq=(p == 2))


# ---------------------------------------------------------------------------
# elements


class SteenrodElement:
    """Finite sum of coefficients times admissible monomials."""

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms: dict | None = None):
        self.prime = Prime(prime)
        p = int(self.prime)
        clean = {}
        for m, c in (terms or {}).items():
            if not isinstance(c, MotCoeff):
                c = MotCoeff.scalar(p, c)
            if not is_monomial(m) or not is_admissible(m, p):
                raise ValueError(f"{m} is not an admissible monomial")
            if c:
                clean[m] = c
        self.terms = clean

    @classmethod
    def _from_flat(cls, p: int, flat: dict, sq: bool = False) -> "SteenrodElement":
        grouped: dict = {}
        for (m, a, b), c in flat.items():
            mono = sq_to_mono(m) if sq else m
            grouped.setdefault(mono, {})[(a, b)] = c
        out = cls.__new__(cls)
        out.prime = Prime(p)
        out.terms = {m: MotCoeff(p, t) for m, t in grouped.items()}
        out.terms = {m: c for m, c in out.terms.items() if c}
        return out

    def _engine_flat(self) -> dict:
        p = int(self.prime)
        out = {}
        for m, c in self.terms.items():
            em = _to_engine(p, m)
            for (a, b), s in c.terms.items():
                out[(em, a, b)] = s
        return out

    @classmethod
    def identity(cls, prime: int) -> "SteenrodElement":
        return cls(prime, {IDENTITY: 1})

    @classmethod
    def monomial(cls, prime: int, m: tuple, coeff=1) -> "SteenrodElement":
        return cls(prime, {m: coeff})

    # arithmetic -------------------------------------------------------
    def __add__(self, other: "SteenrodElement") -> "SteenrodElement":
        if other.prime != self.prime:
            raise ValueError("elements over different primes")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return SteenrodElement(self.prime, out)

    def __neg__(self) -> "SteenrodElement":
        return SteenrodElement(self.prime, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SteenrodElement") -> "SteenrodElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SteenrodElement):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int):
            other = MotCoeff.scalar(self.prime, other)
        if isinstance(other, MotCoeff):
            return SteenrodElement(self.prime, {m: other * c for m, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, SteenrodElement):
            return NotImplemented
        return self.prime == other.prime and self.terms == other.terms

    def __hash__(self):
        return hash((int(self.prime), frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    # structure ----------------------------------------------------------
    def bidegrees(self) -> set:
        p = int(self.prime)
        out = set()
        for m, c in self.terms.items():
            for (a, b) in c.terms:
                out.add(bidegree(m, p) + Bidegree(b, a + b))
        return out

    def bidegree(self) -> Bidegree:
        degs = self.bidegrees()
        if len(degs) != 1:
            raise ValueError("element is zero or not homogeneous")
        return degs.pop()

    def sorted_terms(self) -> list:
        """``[(monomial, (a, b), scalar)]`` in canonical order."""
        p = int(self.prime)
        out = []
        for m in sorted(self.terms, key=lambda m: mono_sort_key(m, p)):
            for (a, b), c in sorted(self.terms[m].terms.items()):
                out.append((m, (a, b), c))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = int(self.prime)
        parts = []
        for m, (a, b), c in self.sorted_terms():
            parts.append(render_term(c, a, b, render_monomial(m, p)))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SteenrodElement({int(self.prime)}, {self})"


def render_term(c: int, a: int, b: int, body: str) -> str:
    if body == "1":
        return render_coeff_monomial(c, a, b)
    if c == 1 and a == 0 and b == 0:
        return body
    return f"{render_coeff_monomial(c, a, b)} {body}"


# ---------------------------------------------------------------------------
# coproduct


class SteenrodTensor:
    """Element of ``A (x)_H A``: coefficients stored once per pair."""

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms: dict | None = None):
        self.prime = Prime(prime)
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def _from_flat(cls, p: int, flat: dict) -> "SteenrodTensor":
        grouped: dict = {}
        for (m1, m2, a, b), c in flat.items():
            grouped.setdefault((m1, m2), {})[(a, b)] = c
        return cls(p, {k: MotCoeff(p, t) for k, t in grouped.items()})

    def _flat(self) -> dict:
        out = {}
        for (m1, m2), c in self.terms.items():
            for (a, b), s in c.terms.items():
                out[(m1, m2, a, b)] = s
        return out

    def __add__(self, other: "SteenrodTensor") -> "SteenrodTensor":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return SteenrodTensor(self.prime, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SteenrodTensor):
            return NotImplemented
        return self.prime == other.prime and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = int(self.prime)
        keys = sorted(self.terms, key=lambda k: (mono_sort_key(k[0], p), mono_sort_key(k[1], p)))
        parts = []
        for m1, m2 in keys:
            body = f"{render_monomial(m1, p)} ⊗ {render_monomial(m2, p)}"
            for (a, b), c in sorted(self.terms[(m1, m2)].terms.items()):
                parts.append(render_term(c, a, b, body) if body != "1 ⊗ 1" or (a, b, c) != (0, 0, 1) else body)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SteenrodTensor({int(self.prime)}, {self})"


def tensor(e1: SteenrodElement, e2: SteenrodElement) -> SteenrodTensor:
    """``e1 (x) e2`` with coefficients multiplied together."""
    p = int(e1.prime)
    flat: dict = {}
    for m1, c1 in e1.terms.items():
        for m2, c2 in e2.terms.items():
            for (a, b), s in (c1 * c2).terms.items():
                _add(flat, (m1, m2, a, b), s, p)
    return SteenrodTensor._from_flat(p, flat)


_COPRODUCT: dict = {}


def _generator_coproduct(p: int, tok) -> dict:
    """Flat coproduct of ``b`` or ``P^n`` in spec monomial coordinates."""
    if tok == BETA:
        return {((1,), IDENTITY, 0, 0): 1, (IDENTITY, (1,), 0, 0): 1}
    n = tok[1]
    out: dict = {}

    def pm(k, e=0):
        return (e, k, 0) if k else ((e,) if e else IDENTITY)

    for i in range(n + 1):
        _add(out, (pm(i), pm(n - i), 0, 0), 1, p)
    if p == 2:
        for i in range(n):
            _add(out, (pm(i, 1), pm(n - 1 - i, 1), 1, 0), 1, p)
    return out


def _mono_coproduct(p: int, m: tuple) -> dict:
    key = (p, m)
    hit = _COPRODUCT.get(key)
    if hit is not None:
        return hit
    toks = mono_tokens(m)
    if not toks:
        out = {(IDENTITY, IDENTITY, 0, 0): 1}
    else:
        rest = tokens_to_mono(toks[1:])
        inner = _mono_coproduct(p, rest)
        gen = _generator_coproduct(p, toks[0])
        out = {}
        for (c1, d1, ga, gb), gc in gen.items():
            ctoks = _engine_tokens(mono_tokens(c1), p)
            dtoks = _engine_tokens(mono_tokens(d1), p)
            dpar = first_degree_parity(d1)
            for (ci, di, a, b), c in inner.items():
                sign = -1 if (p != 2 and dpar and first_degree_parity(ci)) else 1
                left = _apply_engine_tokens(p, ctoks, {(_to_engine(p, ci), a, b): 1})
                right = _apply_engine_tokens(p, dtoks, {(_to_engine(p, di), 0, 0): 1})
                for (lm, la, lb), lc in left.items():
                    for (rm, ra, rb), rc in right.items():
                        _add(
                            out,
                            (_from_engine(p, lm), _from_engine(p, rm), la + ra + ga, lb + rb + gb),
                            sign * gc * c * lc * rc,
                            p,
                        )
    with _CACHE_LOCK:
        return _COPRODUCT.setdefault(key, out)


def coproduct(e: SteenrodElement) -> SteenrodTensor:
    """The coproduct, computed from generator values and the composition rule."""
    p = int(e.prime)
    flat: dict = {}
    for m, coeff in e.terms.items():
        for (m1, m2, a, b), c in _mono_coproduct(p, m).items():
            for (ca, cb), s in coeff.terms.items():
                _add(flat, (m1, m2, a + ca, b + cb), c * s, p)
    return SteenrodTensor._from_flat(p, flat)


def counit(e: SteenrodElement) -> MotCoeff:
    """Evaluation on the class ``1``: the coefficient of the identity."""
    return e.terms.get(IDENTITY, MotCoeff.zero(e.prime))


def specialize_classical(e: SteenrodElement) -> dict:
    """Set ``t = 1`` and ``r = 0``; returns ``{monomial: scalar}``."""
    p = int(e.prime)
    out = {}
    for m, c in e.terms.items():
        v = sum(s for (a, b), s in c.terms.items() if b == 0) % p
        if v:
            out[m] = v
    return out


def admissible_monomials(bideg: Bidegree, p: int) -> list:
    """All admissible monomials of a bidegree, by direct recursion."""
    deg, w = bideg
    if w < 0 or w % (p - 1) or deg < 2 * w:
        return []
    total = w // (p - 1)
    out = []

    def rec(prefix, remaining, betas_left, smax):
        if remaining == 0:
            if betas_left == 0:
                out.append(prefix)
            return
        for s in range(1, min(remaining, smax) + 1):
            for e in (0, 1):
                if e <= betas_left:
                    rec(prefix + (s, e), remaining - s, betas_left - e, (s - e) // p)

    for e0 in (0, 1):
        if e0 <= deg - 2 * w:
            rec((e0,), total, deg - 2 * w - e0, total)
    return out
