"""Classical mod-l Steenrod algebra, kept separate from the motivic engine.

Used as the reference when motivic answers are specialized at ``t = 1``,
``r = 0``.  Words are tuples of tokens: integers ``n`` for ``Sq^n`` at
``l = 2``; ``"b"`` and ``("P", n)`` at odd ``l``.  Binomials come from
:func:`math.comb` so that nothing is shared with the motivic code.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb


def _binom(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return comb(n, k)


def _add(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# l = 2


def adem_two(a: int, b: int) -> dict:
    """``Sq^a Sq^b = sum_j C(b-1-j, a-2j) Sq^(a+b-j) Sq^j`` for ``0 < a < 2b``."""
    out: dict = {}
    for j in range(a // 2 + 1):
        c = _binom(b - 1 - j, a - 2 * j) % 2
        if c:
            out[(a + b - j, j) if j else (a + b,)] = 1
    return out


@lru_cache(maxsize=None)
def _normalize_two(word: tuple) -> tuple:
    word = tuple(x for x in word if x != 0)
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a < 2 * b:
            out: dict = {}
            for mid, c in adem_two(a, b).items():
                for w, c2 in _normalize_two(word[:i] + mid + word[i + 2 :]):
                    _add(out, w, c * c2, 2)
            return tuple(sorted(out.items()))
    return ((word, 1),)


def normalize_two(word) -> dict:
    """Admissible expansion ``{Sq-sequence: 1}`` of a word of squares."""
    return dict(_normalize_two(tuple(word)))


# ---------------------------------------------------------------------------
# odd l


def adem_odd_pp(a: int, b: int, p: int) -> dict:
    """``P^a P^b`` for ``0 < a < p b``."""
    out: dict = {}
    for j in range(a // p + 1):
        c = (-1) ** (a + j) * _binom((p - 1) * (b - j) - 1, a - p * j)
        if c % p:
            _add(out, _pword(("P", a + b - j), ("P", j)), c, p)
    return out


def adem_odd_pbp(a: int, b: int, p: int) -> dict:
    """``P^a b P^b`` for ``0 < a <= p b``."""
    out: dict = {}
    for j in range(a // p + 1):
        c = (-1) ** (a + j) * _binom((p - 1) * (b - j), a - p * j)
        if c % p:
            _add(out, _pword("b", ("P", a + b - j), ("P", j)), c, p)
    for j in range((a - 1) // p + 1):
        c = (-1) ** (a + j + 1) * _binom((p - 1) * (b - j) - 1, a - p * j - 1)
        if c % p:
            _add(out, _pword(("P", a + b - j), "b", ("P", j)), c, p)
    return out


def _pword(*toks) -> tuple:
    return tuple(t for t in toks if t == "b" or t[1] != 0)


@lru_cache(maxsize=None)
def _normalize_odd(word: tuple, p: int) -> tuple:
    word = tuple(t for t in word if t == "b" or t[1] != 0)
    for i in range(len(word) - 1):
        if word[i] == "b" and word[i + 1] == "b":
            return ()
    for i in range(len(word) - 1):
        x, y = word[i], word[i + 1]
        if x == "b":
            continue
        if y != "b":
            if x[1] < p * y[1]:
                rel = adem_odd_pp(x[1], y[1], p)
                return _substitute(word, i, 2, rel, p)
        elif i + 2 < len(word) and word[i + 2] != "b":
            z = word[i + 2]
            if x[1] <= p * z[1]:
                rel = adem_odd_pbp(x[1], z[1], p)
                return _substitute(word, i, 3, rel, p)
    return ((word, 1),)


def _substitute(word: tuple, i: int, width: int, rel: dict, p: int) -> tuple:
    out: dict = {}
    for mid, c in rel.items():
        for w, c2 in _normalize_odd(word[:i] + mid + word[i + width :], p):
            _add(out, w, c * c2, p)
    return tuple(sorted(out.items(), key=repr))


def normalize_odd(word, p: int) -> dict:
    """Admissible expansion of a word in ``b`` and ``("P", n)`` at odd ``p``."""
    return dict(_normalize_odd(tuple(word), p))


# ---------------------------------------------------------------------------
# conversion to (e0, s1, e1, ..., sk, ek) monomials


def sq_word_to_monomial(seq: tuple) -> tuple:
    """Admissible square sequence to ``(e0, s1, e1, ...)`` with ``Sq^(2s+e)``."""
    out = [0]
    for y in seq:
        if y & 1:
            out[-1] = 1
        if y >= 2:
            out.extend((y >> 1, 0))
    return tuple(out)


def p_word_to_monomial(word: tuple) -> tuple:
    out = [0]
    for t in word:
        if t == "b":
            out[-1] = 1
        else:
            out.extend((t[1], 0))
    return tuple(out)


def classical_product(prime: int, *words) -> dict:
    """Normal form ``{monomial: scalar}`` of a concatenation of words."""
    word = tuple(x for w in words for x in w)
    if prime == 2:
        return {sq_word_to_monomial(w): c for w, c in normalize_two(word).items()}
    return {p_word_to_monomial(w): c for w, c in normalize_odd(word, prime).items()}
