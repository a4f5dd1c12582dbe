"""Scalars, bidegrees and the universal motivic coefficient ring.

At ``l = 2`` coefficients live in ``F_2[t, r]`` where ``t`` (tau) has
bidegree ``(0, 1)`` and ``r`` (rho) has bidegree ``(1, 1)``.  At odd ``l``
the coefficient ring is just ``F_l``.

Coefficients are stored sparsely as ``{(a, b): c}`` meaning
``c * t^a * r^b`` with ``0 < c < l``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from msteen.kernels import binom_mod, carries, poly_mul_into

__all__ = [
    "Prime",
    "Bidegree",
    "MotCoeff",
    "binom_mod",
    "carries",
    "specialize",
    "coeff_bidegree",
    "render_coeff_monomial",
]


class Prime(int):
    """A prime integer; primality is checked on construction."""

    def __new__(cls, value: int) -> "Prime":
        if isinstance(value, Prime):
            return value
        value = int(value)
        if value < 2 or any(value % d == 0 for d in range(2, int(value**0.5) + 1)):
            raise ValueError(f"{value} is not a prime")
        return super().__new__(cls, value)


@dataclass(frozen=True, order=True)
class Bidegree:
    degree: int
    weight: int

    def __add__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.degree + other.degree, self.weight + other.weight)

    def __sub__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.degree - other.degree, self.weight - other.weight)

    def __iter__(self):
        yield self.degree
        yield self.weight

    def __str__(self) -> str:
        return f"({self.degree}, {self.weight})"


def coeff_bidegree(a: int, b: int) -> Bidegree:
    """Bidegree of ``t^a r^b``."""
    return Bidegree(b, a + b)


def render_coeff_monomial(c: int, a: int, b: int) -> str:
    parts = []
    if c != 1 or (a == 0 and b == 0):
        parts.append(str(c))
    if a:
        parts.append("t" if a == 1 else f"t^{a}")
    if b:
        parts.append("r" if b == 1 else f"r^{b}")
    return " ".join(parts)


class MotCoeff:
    """Element of ``F_2[t, r]`` (``l = 2``) or ``F_l`` (odd ``l``)."""

    __slots__ = ("prime", "terms", "_hash")

    def __init__(self, prime: int, terms: Mapping[tuple[int, int], int] | None = None):
        self.prime = Prime(prime)
        p = int(self.prime)
        clean = {}
        for (a, b), c in (terms or {}).items():
            c %= p
            if not c:
                continue
            if a < 0 or b < 0:
                raise ValueError("negative exponent in coefficient")
            if p != 2 and (a or b):
                raise ValueError("t and r only exist at l = 2")
            clean[(a, b)] = c
        self.terms = clean
        self._hash = None

    # constructors -----------------------------------------------------
    @classmethod
    def scalar(cls, prime: int, c: int = 1) -> "MotCoeff":
        return cls(prime, {(0, 0): c})

    @classmethod
    def monomial(cls, prime: int, a: int = 0, b: int = 0, c: int = 1) -> "MotCoeff":
        return cls(prime, {(a, b): c})

    @classmethod
    def tau(cls) -> "MotCoeff":
        return cls(2, {(1, 0): 1})

    @classmethod
    def rho(cls) -> "MotCoeff":
        return cls(2, {(0, 1): 1})

    @classmethod
    def zero(cls, prime: int) -> "MotCoeff":
        return cls(prime)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "MotCoeff":
        if isinstance(other, MotCoeff):
            if other.prime != self.prime:
                raise ValueError("coefficients over different primes")
            return other
        if isinstance(other, int):
            return MotCoeff.scalar(self.prime, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return MotCoeff(self.prime, out)

    __radd__ = __add__

    def __neg__(self) -> "MotCoeff":
        return MotCoeff(self.prime, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = poly_mul_into({}, self.terms, other.terms, int(self.prime))
        return MotCoeff(self.prime, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MotCoeff":
        out = MotCoeff.scalar(self.prime, 1)
        for _ in range(n):
            out = out * self
        return out

    # queries ----------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    def scalar_value(self) -> int:
        if not self.is_scalar():
            raise ValueError(f"{self} is not a scalar")
        return self.terms.get((0, 0), 0)

    def bidegree(self) -> Bidegree:
        """Common bidegree of a homogeneous nonzero coefficient."""
        degs = {coeff_bidegree(a, b) for a, b in self.terms}
        if len(degs) != 1:
            raise ValueError(f"{self} is not homogeneous")
        return degs.pop()

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = MotCoeff.scalar(self.prime, other)
        if not isinstance(other, MotCoeff):
            return NotImplemented
        return self.prime == other.prime and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((int(self.prime), frozenset(self.terms.items())))
        return self._hash

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(render_coeff_monomial(c, a, b) for (a, b), c in sorted(self.terms.items()))

    def __repr__(self) -> str:
        return f"MotCoeff({int(self.prime)}, {self})"


def specialize(c: MotCoeff, tau_val: int, rho_val: int) -> int:
    """Evaluate ``c`` at ``t = tau_val, r = rho_val`` in ``F_l``."""
    p = int(c.prime)
    total = 0
    for (a, b), s in c.terms.items():
        total += s * pow(tau_val, a, p) * pow(rho_val, b, p) if (a or b) else s
    return total % p


def sum_coeffs(prime: int, items: Iterable[MotCoeff]) -> MotCoeff:
    out = MotCoeff.zero(prime)
    for x in items:
        out = out + x
    return out
