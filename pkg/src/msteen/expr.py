"""Text expressions shared by the library and the command line.

An expression is a ``+``-separated sum of terms; a term is a
whitespace-separated product of factors.  Factors:

* Steenrod words: ``b``, ``P^n``, ``Sq^n`` (only at ``l = 2``)
* Milnor basis: ``Q_n``, ``Q{i,j,...}``, ``q_n``, ``Pm(r1,r2,...)``
* dual algebra: ``xi_k`` / ``xi_k^e``, ``tau_k``
* classes: ``u_i`` / ``u_i^e``, ``v_i`` / ``v_i^e``
* coefficients: ``t``, ``t^a``, ``r``, ``r^b`` and integers

Each term keeps its factors in order, since Steenrod words do not commute
with coefficients.  Converters turn an :class:`Expr` into the object the
caller needs.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from msteen.algebra import BETA, SteenrodElement, multiply, normalize
from msteen.bmu import BmuClass, BmuRing, bmu_mul
from msteen.coeff import MotCoeff, Prime
from msteen.dual import DualElement, dual_mul, tau, xi
from msteen.indices import make_index
from msteen.milnor import MilnorElement, admissible_to_milnor, milnor_to_admissible

log = logging.getLogger(__name__)

_FACTOR = re.compile(
    r"""
    (?P<Pm>Pm\(\s*(?P<pm_args>-?\d+(?:\s*,\s*-?\d+)*)?\s*\))
  | (?P<Qset>Q\{\s*(?P<q_args>\d+(?:\s*,\s*\d+)*)?\s*\})
  | (?P<gen>(?P<name>Sq|P|Q|q|xi|tau|u|v|t|r|b)(?:_(?P<sub>-?\d+))?(?:\^(?P<sup>-?\d+))?)
  | (?P<int>-?\d+)
    """,
    re.VERBOSE,
)

WORD_KINDS = {"b", "P", "Sq"}
MILNOR_KINDS = {"Q", "q", "Pm"}
DUAL_KINDS = {"xi", "tau"}
CLASS_KINDS = {"u", "v"}


class ParseError(ValueError):
    """Syntax error; ``position`` is the offset in the input text."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


@dataclass
class Term:
    """Ordered factors; ``("coeff", MotCoeff)`` or ``(kind, data)``."""

    factors: list = field(default_factory=list)
    zero: bool = False

    def kinds(self) -> set:
        return {k for k, _ in self.factors if k != "coeff"}


@dataclass
class Expr:
    prime: int
    terms: list

    def kinds(self) -> set:
        out = set()
        for t in self.terms:
            out |= t.kinds()
        return out

    def live_terms(self) -> list:
        return [t for t in self.terms if not t.zero]


# ---------------------------------------------------------------------------
# parsing


def parse(text: str, prime: int = 2) -> Expr:
    """Parse ``text``; raises :class:`ParseError` with a position."""
    p = int(Prime(prime))
    if not text.strip():
        raise ParseError("empty expression", text, 0)
    terms = []
    start = 0
    for chunk in text.split("+"):
        terms.append(_parse_term(chunk, text, start, p))
        start += len(chunk) + 1
    return Expr(p, terms)


def _parse_term(chunk: str, text: str, offset: int, p: int) -> Term:
    term = Term()
    pos = 0
    n = len(chunk)
    while True:
        while pos < n and chunk[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _FACTOR.match(chunk, pos)
        end = m.end() if m else pos
        if not m or (end < n and not chunk[end].isspace()):
            raise ParseError("unrecognized factor", text, offset + pos)
        _add_factor(term, m, text, offset + pos, p)
        pos = end
    if not term.factors and not term.zero:
        raise ParseError("empty term", text, offset)
    return term


def _int(s: str | None, default: int) -> int:
    return default if s is None else int(s)


def _add_factor(term: Term, m: re.Match, text: str, pos: int, p: int) -> None:
    if m.group("int") is not None:
        c = int(m.group("int"))
        if c % p == 0:
            term.zero = True
        term.factors.append(("coeff", MotCoeff.scalar(p, c)))
        return
    if m.group("Pm") is not None:
        args = m.group("pm_args")
        r = tuple(int(x) for x in args.split(",")) if args else ()
        if any(x < 0 for x in r):
            raise ParseError("negative Milnor exponent", text, pos)
        term.factors.append(("Pm", r))
        return
    if m.group("Qset") is not None:
        args = m.group("q_args")
        X = tuple(int(x) for x in args.split(",")) if args else ()
        if len(set(X)) != len(X):
            raise ParseError("repeated index in Q{...}", text, pos)
        term.factors.append(("Q", tuple(sorted(X))))
        return
    name, sub, sup = m.group("name"), m.group("sub"), m.group("sup")
    if name in ("P", "Sq"):
        if sub is not None or sup is None:
            raise ParseError(f"{name} needs an exponent {name}^n", text, pos)
        if name == "Sq" and p != 2:
            raise ParseError("Sq^n is only defined at l = 2", text, pos)
        n = int(sup)
        if n < 0:
            log.warning("%s^%d is zero (negative index)", name, n)
            term.zero = True
            n = 0
        if n:
            term.factors.append((name, n))
        elif not term.zero:
            term.factors.append(("coeff", MotCoeff.scalar(p, 1)))  # P^0 is the identity
        return
    if name == "b":
        if sub is not None or sup is not None:
            raise ParseError("b takes no index", text, pos)
        term.factors.append(("b", None))
        return
    if name in ("t", "r"):
        if sub is not None:
            raise ParseError(f"{name} takes no subscript", text, pos)
        if p != 2:
            raise ParseError(f"{name} only exists at l = 2", text, pos)
        e = _int(sup, 1)
        if e < 0:
            raise ParseError("negative exponent", text, pos)
        c = MotCoeff.monomial(2, e, 0) if name == "t" else MotCoeff.monomial(2, 0, e)
        term.factors.append(("coeff", c))
        return
    if sub is None:
        raise ParseError(f"{name} needs a subscript {name}_k", text, pos)
    k = int(sub)
    if k < 0:
        raise ParseError("negative subscript", text, pos)
    e = _int(sup, 1)
    if e < 0:
        raise ParseError("negative exponent", text, pos)
    if name == "q" and sup is not None:
        raise ParseError("q_n takes no exponent", text, pos)
    if name in ("Q", "tau") and sup is not None and e != 1:
        if e == 0:
            term.factors.append(("coeff", MotCoeff.scalar(p, 1)))
            return
        if name == "Q":
            term.zero = True  # Q_i^2 = 0
    if name == "Q":
        term.factors.append(("Q", (k,)))
    elif name == "q":
        if k == 0:
            raise ParseError("q_n needs n >= 1", text, pos)
        term.factors.append(("q", k))
    elif name == "xi":
        term.factors.append(("xi", (k, e)))
    elif name == "tau":
        term.factors.extend([("tau", k)] * e)
    elif name in ("u", "v"):
        if k == 0:
            raise ParseError("classes are numbered from 1", text, pos)
        term.factors.append((name, (k, e)))


# ---------------------------------------------------------------------------
# conversion


def _check(expr: Expr, allowed: set, what: str) -> None:
    bad = expr.kinds() - allowed
    if bad:
        raise ValueError(f"{', '.join(sorted(bad))} cannot appear in {what}")


def word_tokens(term: Term) -> list:
    """Word for the Adem engine (coefficients stay in place)."""
    out = []
    for kind, data in term.factors:
        if kind == "coeff":
            out.append(data)
        elif kind == "b":
            out.append(BETA)
        else:
            out.append((kind, data))
    return out


def is_plain_word(expr: Expr) -> bool:
    return expr.kinds() <= WORD_KINDS and len(expr.live_terms()) == 1


def _milnor_factor(kind: str, data, p: int) -> MilnorElement:
    if kind == "Q":
        eps = [0] * (max(data) + 1 if data else 0)
        for i in data:
            eps[i] = 1
        return MilnorElement(p, {make_index(eps, ()): 1})
    if kind == "q":
        return MilnorElement(p, {xi(data): 1})
    return MilnorElement(p, {make_index((), data): 1})


def to_steenrod(expr: Expr) -> SteenrodElement:
    """Admissible form; Milnor factors are converted and multiplied in order."""
    _check(expr, WORD_KINDS | MILNOR_KINDS, "an operation")
    p = expr.prime
    total = SteenrodElement(p)
    for term in expr.live_terms():
        value = None
        run: list = []

        def flush(value, run):
            if not run:
                return value
            piece = normalize(word_tokens(Term(run)), p)
            return piece if value is None else multiply(value, piece)

        for kind, data in term.factors:
            if kind in MILNOR_KINDS:
                value = flush(value, run)
                run = []
                piece = milnor_to_admissible(_milnor_factor(kind, data, p))
                value = piece if value is None else multiply(value, piece)
            else:
                run.append((kind, data))
        value = flush(value, run)
        total = total + value
    return total


def to_operation(expr: Expr):
    """A plain word (list) when possible, else an admissible element."""
    if is_plain_word(expr):
        return word_tokens(expr.live_terms()[0])
    return to_steenrod(expr)


def to_milnor(expr: Expr) -> MilnorElement:
    """Milnor-basis form of any operation expression."""
    _check(expr, WORD_KINDS | MILNOR_KINDS, "an operation")
    p = expr.prime
    total = MilnorElement(p)
    for term in expr.live_terms():
        kinds = term.kinds()
        milnor = [(k, d) for k, d in term.factors if k in MILNOR_KINDS]
        if not kinds - MILNOR_KINDS and len(milnor) <= 1 and _coeffs_first(term):
            coeff = MotCoeff.scalar(p, 1)
            for k, d in term.factors:
                if k == "coeff":
                    coeff = coeff * d
            base = _milnor_factor(*milnor[0], p) if milnor else MilnorElement(p, {(): 1})
            total = total + coeff * base
        else:
            total = total + admissible_to_milnor(to_steenrod(Expr(p, [term])))
    return total


def _coeffs_first(term: Term) -> bool:
    seen_op = False
    for k, d in term.factors:
        if k == "coeff":
            if seen_op and not d.is_scalar():
                return False
        else:
            seen_op = True
    return True


def to_dual(expr: Expr) -> DualElement:
    """Dual-algebra element; every coefficient acts on the right."""
    _check(expr, DUAL_KINDS, "a dual element")
    p = expr.prime
    total = DualElement(p)
    for term in expr.live_terms():
        value = DualElement(p, {(): 1})
        coeff = MotCoeff.scalar(p, 1)
        for kind, data in term.factors:
            if kind == "coeff":
                coeff = coeff * data
            elif kind == "tau":
                value = dual_mul(value, DualElement(p, {tau(data): 1}))
            else:
                k, e = data
                if k:
                    value = dual_mul(value, DualElement(p, {xi(k, e): 1}))
        total = total + value * coeff
    return total


def class_shape(expr: Expr) -> tuple:
    """``(largest index, largest v exponent)`` used in a class expression."""
    n, top = 1, 0
    for term in expr.terms:
        for kind, data in term.factors:
            if kind in CLASS_KINDS:
                n = max(n, data[0])
                if kind == "v":
                    top = max(top, data[1])
    return n, top


def to_class(expr: Expr, ring: BmuRing) -> BmuClass:
    _check(expr, CLASS_KINDS, "a class")
    p = expr.prime
    total = BmuClass(ring)
    for term in expr.live_terms():
        value = BmuClass.one(ring)
        for kind, data in term.factors:
            if kind == "coeff":
                value = data * value
                continue
            i, e = data
            if i > ring.n:
                raise ValueError(f"{kind}_{i} needs arity at least {i}")
            if kind == "v":
                factor = BmuClass.v(ring, i, e)
            else:
                factor = BmuClass.u(ring, i) ** e
            value = bmu_mul(value, factor)
        total = total + value
    if int(ring.p) != p:
        raise ValueError("ring over a different prime")
    return total


def to_coeff(expr: Expr) -> MotCoeff:
    _check(expr, set(), "a coefficient")
    out = MotCoeff.zero(expr.prime)
    for term in expr.live_terms():
        c = MotCoeff.scalar(expr.prime, 1)
        for _, d in term.factors:
            c = c * d
        out = out + c
    return out


__all__ = [
    "Expr",
    "Term",
    "ParseError",
    "parse",
    "to_steenrod",
    "to_operation",
    "to_milnor",
    "to_dual",
    "to_class",
    "to_coeff",
    "class_shape",
    "word_tokens",
]
