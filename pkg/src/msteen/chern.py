"""Operations on Chern and Thom classes through symmetric polynomials.

Write a rank-``d`` bundle as a formal sum of line bundles with first Chern
classes ``X_1 .. X_d``.  An operation ``P^(r)`` sends ``c_i`` and the Thom
class to symmetric polynomials in the ``X``'s; rewriting those in the
elementary symmetric functions gives universal formulas in ``c_1 .. c_d``.
"""

from __future__ import annotations

from itertools import combinations

from msteen.coeff import Bidegree, Prime

_ELEM: dict = {}


def _padd(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _pmul(x: dict, y: dict, p: int) -> dict:
    out: dict = {}
    for e1, c1 in x.items():
        for e2, c2 in y.items():
            _padd(out, tuple(a + b for a, b in zip(e1, e2)), c1 * c2, p)
    return out


def elementary(i: int, d: int) -> dict:
    """``e_i(X_1 .. X_d)`` as ``{exponent vector: 1}``."""
    key = (i, d)
    hit = _ELEM.get(key)
    if hit is None:
        hit = {}
        for J in combinations(range(d), i):
            e = [0] * d
            for j in J:
                e[j] = 1
            hit[tuple(e)] = 1
        _ELEM[key] = hit
    return hit


class SymPoly:
    """Symmetric polynomial in ``X_1 .. X_d`` over ``F_l``."""

    def __init__(self, d: int, terms: dict | None = None, prime: int = 2, check: bool = True):
        self.d = d
        self.prime = Prime(prime)
        p = int(self.prime)
        clean: dict = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != d or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {d} variables")
            _padd(clean, e, c, p)
        self.terms = clean
        if check and not self.is_symmetric():
            raise ValueError("polynomial is not symmetric")

    def is_symmetric(self) -> bool:
        # adjacent transpositions generate the symmetric group
        for e, c in self.terms.items():
            for i in range(self.d - 1):
                f = list(e)
                f[i], f[i + 1] = f[i + 1], f[i]
                if self.terms.get(tuple(f)) != c:
                    return False
        return True

    @classmethod
    def power_sum(cls, k: int, d: int, prime: int) -> "SymPoly":
        terms = {}
        for j in range(d):
            e = [0] * d
            e[j] = k
            terms[tuple(e)] = 1
        return cls(d, terms, prime)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymPoly) and (self.d, int(self.prime), self.terms) == (
            other.d,
            int(other.prime),
            other.terms,
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            body = " ".join(f"X{j + 1}" if x == 1 else f"X{j + 1}^{x}" for j, x in enumerate(e) if x)
            c = self.terms[e]
            if not body:
                parts.append(str(c))
            else:
                parts.append(body if c == 1 else f"{c} {body}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SymPoly({self})"


class ChernPoly:
    """Polynomial in ``c_1 .. c_d`` (``c_j`` of bidegree ``(2j, j)``) over ``F_l``."""

    def __init__(self, d: int, terms: dict | None = None, prime: int = 2):
        self.d = d
        self.prime = Prime(prime)
        p = int(self.prime)
        clean: dict = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != d:
                raise ValueError(f"exponent vector {e} needs length {d}")
            _padd(clean, e, c, p)
        self.terms = clean

    @classmethod
    def one(cls, d: int, prime: int) -> "ChernPoly":
        return cls(d, {(0,) * d: 1}, prime)

    def bidegrees(self) -> set:
        return {Bidegree(2 * w, w) for w in (sum((j + 1) * x for j, x in enumerate(e)) for e in self.terms)}

    def extend(self, d: int) -> "ChernPoly":
        """Same polynomial viewed with ``d >= self.d`` Chern classes."""
        if d < self.d:
            if any(any(e[d:]) for e in self.terms):
                raise ValueError("polynomial uses classes beyond the requested rank")
            return ChernPoly(d, {e[:d]: c for e, c in self.terms.items()}, int(self.prime))
        pad = (0,) * (d - self.d)
        return ChernPoly(d, {e + pad: c for e, c in self.terms.items()}, int(self.prime))

    def recompose(self) -> dict:
        """Substitute ``c_j = e_j(X)`` and expand: ``{exponent vector in X: c}``."""
        p = int(self.prime)
        out: dict = {}
        for e, c in self.terms.items():
            poly = {(0,) * self.d: c}
            for j, x in enumerate(e):
                for _ in range(x):
                    poly = _pmul(poly, elementary(j + 1, self.d), p)
            for k, v in poly.items():
                _padd(out, k, v, p)
        return out

    def as_json(self) -> list:
        return [{"exponents": list(e), "coeff": c} for e, c in self._sorted()]

    def _sorted(self) -> list:
        return sorted(self.terms.items(), reverse=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChernPoly):
            return NotImplemented
        d = max(self.d, other.d)
        a = self.extend(d) if self.d != d else self
        b = other.extend(d) if other.d != d else other
        return int(a.prime) == int(b.prime) and a.terms == b.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self._sorted():
            body = " ".join(f"c{j + 1}" if x == 1 else f"c{j + 1}^{x}" for j, x in enumerate(e) if x)
            if not body:
                parts.append(str(c))
            else:
                parts.append(body if c == 1 else f"{c} {body}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"ChernPoly({self})"


def decompose_symmetric(poly: SymPoly) -> ChernPoly:
    """Write a symmetric polynomial in the elementary symmetric functions.

    Repeatedly take the lexicographically largest monomial ``c X^a`` (its
    exponents are non-increasing by symmetry) and subtract
    ``c e_1^(a1-a2) e_2^(a2-a3) ... e_d^(ad)``.
    """
    if not poly.is_symmetric():
        raise ValueError("polynomial is not symmetric")
    p = int(poly.prime)
    d = poly.d
    rest = dict(poly.terms)
    out: dict = {}
    while rest:
        lead = max(rest)
        c = rest[lead]
        expo = tuple(lead[j] - (lead[j + 1] if j + 1 < d else 0) for j in range(d))
        if any(x < 0 for x in expo):
            raise AssertionError("leading monomial is not a partition")
        _padd(out, expo, c, p)
        sub = {(0,) * d: c}
        for j, x in enumerate(expo):
            for _ in range(x):
                sub = _pmul(sub, elementary(j + 1, d), p)
        for k, v in sub.items():
            _padd(rest, k, -v, p)
        if lead in rest:
            raise AssertionError("elimination did not remove the leading term")
    return ChernPoly(d, out, p)


def _r_targets(r) -> list:
    """``k``-values multiset for ``prod xi_{k_j} = xi^r``: ``r_m`` copies of ``m``."""
    ks = []
    for m, rm in enumerate(r, start=1):
        ks.extend([m] * rm)
    return ks


def _assignments(size: int, r) -> list:
    """All ``k : {0..size-1} -> N`` whose nonzero values have multiplicities ``r``."""
    ks = _r_targets(r)
    if len(ks) > size:
        return []
    out = set()
    for pos in combinations(range(size), len(ks)):
        for perm in _perms(ks):
            k = [0] * size
            for slot, val in zip(pos, perm):
                k[slot] = val
            out.add(tuple(k))
    return sorted(out)


def _perms(seq):
    if not seq:
        yield ()
        return
    seen = set()
    for i, x in enumerate(seq):
        if x in seen:
            continue
        seen.add(x)
        for rest in _perms(seq[:i] + seq[i + 1 :]):
            yield (x,) + rest


def chern_polynomial(r, i: int, d: int, prime: int) -> SymPoly:
    """``sum_{#J = i} sum_k prod_{j in J} X_j^(l^k_j)`` with ``prod xi_{k_j} = xi^r``."""
    p = int(Prime(prime))
    if not 0 <= i <= d:
        raise ValueError("need 0 <= i <= d")
    terms: dict = {}
    for J in combinations(range(d), i):
        for k in _assignments(i, r):
            e = [0] * d
            for j, kj in zip(J, k):
                e[j] = p**kj
            _padd(terms, tuple(e), 1, p)
    return SymPoly(d, terms, p)


def thom_polynomial(r, d: int, prime: int) -> SymPoly:
    """``sum_k prod_j X_j^(l^k_j - 1)`` with ``prod xi_{k_j} = xi^r``."""
    p = int(Prime(prime))
    if d < 1:
        raise ValueError("need d >= 1")
    terms: dict = {}
    for k in _assignments(d, r):
        _padd(terms, tuple(p**kj - 1 for kj in k), 1, p)
    return SymPoly(d, terms, p)


def chern_action(r, i: int, d: int, prime: int = 2) -> ChernPoly:
    """``P^(r)(c_i(V))`` for bundles of rank at most ``d``."""
    return decompose_symmetric(chern_polynomial(tuple(r), i, d, prime))


def thom_action(r, d: int, prime: int = 2) -> ChernPoly:
    """Multiplier ``R`` with ``P^(r)(t_V) = R(c_1 .. c_d) t_V``."""
    return decompose_symmetric(thom_polynomial(tuple(r), d, prime))


def stable_rank(r, prime: int) -> int:
    """Rank from which :func:`thom_action` no longer depends on ``d``."""
    p = int(Prime(prime))
    return sum((p**m - 1) * rm for m, rm in enumerate(r, start=1))


def q_index(n: int) -> tuple:
    """The ``r``-sequence dual to ``xi_n`` (the index of ``q_n``)."""
    return tuple([0] * (n - 1) + [1]) if n > 0 else ()


def sample_partitions(degree: int, d: int):
    """Exponent vectors that are partitions of ``degree`` into at most ``d`` parts."""
    def rec(rem, maxpart, left):
        if rem == 0:
            yield ()
            return
        if left == 0:
            return
        for x in range(min(rem, maxpart), 0, -1):
            for rest in rec(rem - x, x, left - 1):
                yield (x,) + rest

    for part in rec(degree, degree, d):
        yield part + (0,) * (d - len(part))


def monomial_symmetric(partition: tuple, prime: int) -> SymPoly:
    """Orbit sum of ``X^partition`` under permutations."""
    d = len(partition)
    terms = {perm: 1 for perm in _perms(tuple(partition))}
    return SymPoly(d, terms, prime)


__all__ = [
    "SymPoly",
    "ChernPoly",
    "decompose_symmetric",
    "chern_polynomial",
    "thom_polynomial",
    "chern_action",
    "thom_action",
    "stable_rank",
    "q_index",
    "elementary",
    "monomial_symmetric",
    "sample_partitions",
]
