"""Kronecker pairing, duality product and the Milnor basis.

The pairing of an operation word with a dual monomial is computed by peeling
the rightmost factor: with ``Psi_*(w) = sum a_i (x) b_i mu_i``,

    <F' G, w> = sum over i with a_i = dual(G) of <F', b_i> mu_i

where ``G`` is ``b^e P^n`` and ``dual(G) = tau_0^e xi_1^n``.  Only left
factors of the form ``tau_0^e xi_1^n`` matter, so the coproduct is computed
modulo the ideal spanned by the other monomials.  No coefficient ever has
to be moved through an operation, so this product is independent of the
Adem engine.
"""

from __future__ import annotations

import threading
from msteen.algebra import (
    BETA,
    IDENTITY,
    SteenrodElement,
    _coerce_token,
    compose_coefficient,
    mono_tokens,
    normalize,
    render_term,
)
from msteen.coeff import Bidegree, MotCoeff, Prime
from msteen.dual import (
    UNIT,
    coproduct_flat,
    dual_bidegree,
    render_dual_monomial,
    tau,
    xi,
)
from msteen.indices import index_eps, index_key, index_r, make_index, theta, trim

_LOCK = threading.Lock()


def _add(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# peel tokens


def peel_tokens(word) -> tuple:
    """Split a word in ``b`` / ``P^n`` into factors ``b^e P^n`` (pairs ``(e, n)``)."""
    out = []
    pending = 0
    for tok in word:
        if tok == BETA:
            if pending:
                out.append((1, 0))
            pending = 1
        else:
            out.append((pending, tok[1]))
            pending = 0
    if pending:
        out.append((1, 0))
    return tuple(out)


def mono_peel_tokens(m: tuple) -> tuple:
    return peel_tokens(mono_tokens(m))


def _token_dual(tok: tuple) -> tuple:
    return trim(tok)


def _tokens_bidegree(tokens: tuple, p: int) -> Bidegree:
    w = (p - 1) * sum(n for _, n in tokens)
    return Bidegree(2 * w + sum(e for e, _ in tokens), w)


def _coeff_shift_ok(diff: Bidegree, p: int) -> bool:
    d, w = diff
    if p != 2:
        return d == 0 and w == 0
    return 0 <= d <= w


_BY_LEFT: dict = {}


def _restricted_by_left(index: tuple, p: int) -> dict:
    key = (p, index)
    hit = _BY_LEFT.get(key)
    if hit is not None:
        return hit
    grouped: dict = {}
    for (i, j, a, b), c in coproduct_flat(index, p, restricted=True).items():
        grouped.setdefault(i, []).append((j, a, b, c))
    with _LOCK:
        return _BY_LEFT.setdefault(key, grouped)


_PAIR: dict = {}


def pair_tokens(tokens: tuple, index: tuple, p: int) -> dict:
    """``<word, dual monomial>`` as a flat coefficient ``{(a, b): c}``."""
    if not tokens:
        return {(0, 0): 1} if not index else {}
    if not _coeff_shift_ok(_tokens_bidegree(tokens, p) - dual_bidegree(index, p), p):
        return {}
    if len(tokens) == 1:
        return {(0, 0): 1} if index == _token_dual(tokens[0]) else {}
    key = (p, tokens, index)
    hit = _PAIR.get(key)
    if hit is not None:
        return hit
    out: dict = {}
    head = tokens[:-1]
    for j, a, b, c in _restricted_by_left(index, p).get(_token_dual(tokens[-1]), ()):
        for (ca, cb), v in pair_tokens(head, j, p).items():
            _add(out, (ca + a, cb + b), c * v, p)
    with _LOCK:
        return _PAIR.setdefault(key, out)


def _split_word(word, p: int):
    """Return ``(leading coefficient, generator tokens)`` or an element.

    Words with coefficients after the first generator are normalized first.
    """
    lead = MotCoeff.scalar(p, 1)
    toks = []
    for tok in word:
        tok = _coerce_token(tok, p)
        if isinstance(tok, MotCoeff):
            if toks:
                return normalize(list(word), p)
            lead = lead * tok
        elif tok == BETA:
            toks.append(BETA)
        elif tok[0] == "Sq":
            n = tok[1]
            if n < 0:
                return SteenrodElement(p)
            if n & 1:
                toks.append(BETA)
            if n >= 2:
                toks.append(("P", n >> 1))
        else:
            if tok[1] < 0:
                return SteenrodElement(p)
            if tok[1] > 0:
                toks.append(tok)
    return lead, toks


def pair(F, omega: tuple, prime: int | None = None) -> MotCoeff:
    """``<F, omega>`` for a word or element ``F`` and a dual monomial ``omega``."""
    if isinstance(F, SteenrodElement):
        p = int(F.prime)
        out = MotCoeff.zero(p)
        for m, c in F.terms.items():
            out = out + c * MotCoeff(p, pair_tokens(mono_peel_tokens(m), trim(omega), p))
        return out
    p = int(Prime(prime if prime is not None else 2))
    split = _split_word(F, p)
    if isinstance(split, SteenrodElement):
        return pair(split, omega)
    lead, toks = split
    return lead * MotCoeff(p, pair_tokens(peel_tokens(toks), trim(omega), p))


def pair_left(F: SteenrodElement, omega: tuple) -> MotCoeff:
    """The same pairing computed by peeling the leftmost factor.

    ``<G F', w> = sum <G <F', a_i>, b_i> mu_i`` over the full coproduct of
    ``w``; moving ``<F', a_i>`` through ``G`` uses the Adem engine's
    coefficient rules, so agreement with :func:`pair` tests those rules.
    """
    p = int(F.prime)
    out = MotCoeff.zero(p)
    for m, c in F.terms.items():
        out = out + c * _pair_left_mono(m, trim(omega), p)
    return out


def _pair_left_mono(m: tuple, omega: tuple, p: int) -> MotCoeff:
    toks = mono_peel_tokens(m)
    if len(toks) <= 1:
        if not toks:
            return MotCoeff.scalar(p, 1 if not omega else 0)
        return MotCoeff.scalar(p, 1 if omega == _token_dual(toks[0]) else 0)
    g = toks[0]
    rest_word = []
    for e, n in toks[1:]:
        if e:
            rest_word.append(BETA)
        if n:
            rest_word.append(("P", n))
    rest = normalize(rest_word, p)
    g_mono = (g[0], g[1], 0) if g[1] else (g[0],)
    out = MotCoeff.zero(p)
    for (i, j, a, b), c in coproduct_flat(omega, p).items():
        inner = pair(rest, i)
        if not inner:
            continue
        composed = compose_coefficient(g_mono, inner)
        val = MotCoeff.zero(p)
        for mono, coeff in composed.terms.items():
            t = mono_peel_tokens(mono)
            hit = (not t and not j) or (len(t) == 1 and _token_dual(t[0]) == j)
            if hit:
                val = val + coeff
        out = out + val * MotCoeff(p, {(a, b): c})
    return out


# ---------------------------------------------------------------------------
# enumeration of dual monomials


def dual_monomials(bideg: Bidegree, p: int, max_gen: int | None = None, shifted: bool = False) -> list:
    """Dual monomials of a bidegree, in canonical order.

    With ``shifted`` (only meaningful at ``l = 2``) all monomials whose
    bidegree differs from ``bideg`` by that of some ``t^a r^b`` are returned.
    ``max_gen`` restricts to ``tau_i`` with ``i < max_gen`` and ``xi_i`` with
    ``i <= max_gen``.
    """
    deg, wt = bideg
    shifted = shifted and p == 2
    if deg < 0 or wt < 0:
        return []
    gens = []  # (position, degree, weight)
    k = 0
    while True:
        w = p**k - 1
        if 2 * w + 1 > deg and (k > 0 and 2 * w > deg):
            break
        if (max_gen is None or k < max_gen) and 2 * w + 1 <= deg:
            gens.append((2 * k, 2 * w + 1, w))
        if k >= 1 and (max_gen is None or k <= max_gen) and 2 * w <= deg:
            gens.append((2 * k - 1, 2 * w, w))
        k += 1
    gens.sort(reverse=True)
    out = []
    lst = [0] * (gens[0][0] + 1 if gens else 0)

    def rec(gi, d, w):
        if gi == len(gens):
            if (shifted and 0 <= d <= w) or (d == 0 and w == 0):
                out.append(trim(lst))
            return
        pos, gd, gw = gens[gi]
        top = 1 if pos % 2 == 0 else d // gd
        for e in range(top + 1):
            dd, ww = d - e * gd, w - e * gw
            if dd < 0 or ww < 0:
                break
            lst[pos] = e
            rec(gi + 1, dd, ww)
        lst[pos] = 0

    rec(0, deg, wt)
    return sorted(set(out), key=index_key)


def _candidates(bideg: Bidegree, p: int, max_gen: int) -> list:
    return dual_monomials(bideg, p, max_gen=max_gen, shifted=True)


# ---------------------------------------------------------------------------
# Milnor elements


def render_milnor_index(index: tuple) -> str:
    eps = index_eps(index)
    r = trim(index_r(index))
    parts = []
    if any(eps):
        parts.append("Q{" + ",".join(str(i) for i, e in enumerate(eps) if e) + "}")
    if r:
        parts.append("Pm(" + ",".join(str(x) for x in r) + ")")
    return " ".join(parts) if parts else "1"


class MilnorElement:
    """Left-coefficient combination of Milnor basis elements."""

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms: dict | None = None):
        self.prime = Prime(prime)
        p = int(self.prime)
        clean = {}
        for m, c in (terms or {}).items():
            if not isinstance(c, MotCoeff):
                c = MotCoeff.scalar(p, c)
            m = trim(m)
            if c:
                clean[m] = clean[m] + c if m in clean else c
        self.terms = {m: c for m, c in clean.items() if c}

    def __add__(self, other: "MilnorElement") -> "MilnorElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return MilnorElement(self.prime, out)

    def __neg__(self) -> "MilnorElement":
        return MilnorElement(self.prime, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MilnorElement") -> "MilnorElement":
        return self + (-other)

    def __rmul__(self, other):
        if isinstance(other, int):
            other = MotCoeff.scalar(self.prime, other)
        if isinstance(other, MotCoeff):
            return MilnorElement(self.prime, {m: other * c for m, c in self.terms.items()})
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, MilnorElement):
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
        return " + ".join(render_term(c, a, b, render_milnor_index(m)) for m, (a, b), c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"MilnorElement({int(self.prime)}, {self})"


def _milnor_of_tokens(tokens: tuple, p: int) -> dict:
    """``{index: flat coeff}`` with ``<word, omega>`` for all relevant omega."""
    out = {}
    for omega in _candidates(_tokens_bidegree(tokens, p), p, len(tokens)):
        v = pair_tokens(tokens, omega, p)
        if v:
            out[omega] = v
    return out


_A2M: dict = {}


def _mono_to_milnor(m: tuple, p: int) -> dict:
    key = (p, m)
    hit = _A2M.get(key)
    if hit is None:
        hit = _milnor_of_tokens(mono_peel_tokens(m), p)
        with _LOCK:
            hit = _A2M.setdefault(key, hit)
    return hit


def admissible_to_milnor(e: SteenrodElement) -> MilnorElement:
    """``e = sum <e, omega> rho(omega)``."""
    p = int(e.prime)
    acc: dict = {}
    for m, c in e.terms.items():
        for omega, flat in _mono_to_milnor(m, p).items():
            acc[omega] = acc[omega] + c * MotCoeff(p, flat) if omega in acc else c * MotCoeff(p, flat)
    return MilnorElement(p, acc)


def milnor_to_admissible(x: MilnorElement) -> SteenrodElement:
    """Inverse basis change by elimination from the largest index down."""
    p = int(x.prime)
    residual = dict(x.terms)
    result: dict = {}
    guard = 0
    while residual:
        guard += 1
        if guard > 100000:
            raise RuntimeError("basis change did not terminate")
        top = max(residual, key=index_key)
        mono = theta(top, p)
        expansion = _mono_to_milnor(mono, p)
        diag = MotCoeff(p, expansion.get(top, {}))
        if not diag.is_scalar() or diag.scalar_value() == 0:
            raise ArithmeticError(f"diagonal pairing at {top} is not a unit")
        mu = residual[top] * pow(diag.scalar_value(), p - 2, p)
        result[mono] = result[mono] + mu if mono in result else mu
        for omega, flat in expansion.items():
            if index_key(omega) > index_key(top):
                raise ArithmeticError("pairing is not triangular")
            v = mu * MotCoeff(p, flat)
            residual[omega] = residual[omega] - v if omega in residual else -v
            if not residual[omega]:
                del residual[omega]
    return SteenrodElement(p, result)


# ---------------------------------------------------------------------------
# duality product


def _as_terms(x, p: int) -> list:
    """``[(coefficient, generator word)]`` for a word or element."""
    if isinstance(x, SteenrodElement):
        return [(c, mono_tokens(m)) for m, c in x.terms.items()]
    if isinstance(x, MilnorElement):
        return _as_terms(milnor_to_admissible(x), p)
    split = _split_word(x, p)
    if isinstance(split, SteenrodElement):
        return _as_terms(split, p)
    return [split]


def product_via_duality(C, D, prime: int = 2) -> MilnorElement:
    """Milnor expansion of ``C D`` from ``<C D, omega> = [C (x) D, Psi_* omega]``.

    ``C`` and ``D`` are words or elements.  A non-scalar coefficient on ``D``
    has to be moved through ``C`` first, which is the only step that uses
    the Adem engine's coefficient rules.
    """
    if isinstance(C, (SteenrodElement, MilnorElement)):
        prime = int(C.prime)
    elif isinstance(D, (SteenrodElement, MilnorElement)):
        prime = int(D.prime)
    p = int(Prime(prime))
    acc: dict = {}
    for lam, cw in _as_terms(C, p):
        for mu, dw in _as_terms(D, p):
            if mu.is_scalar():
                pieces = [(lam * mu, cw)]
            else:
                cmono = normalize(cw + [mu], p)
                pieces = [(lam * c2, mono_tokens(m2)) for m2, c2 in cmono.terms.items()]
            for coeff, left in pieces:
                toks = peel_tokens(left + dw)
                for omega, flat in _milnor_of_tokens(toks, p).items():
                    v = coeff * MotCoeff(p, flat)
                    acc[omega] = acc[omega] + v if omega in acc else v
    return MilnorElement(p, acc)


# ---------------------------------------------------------------------------
# Gram matrices


class GramMatrix:
    """Pairings ``<theta(I), omega(J)>`` over the index sequences of a bidegree."""

    def __init__(self, bideg: Bidegree, prime: int, indices: list, entries: list):
        self.bidegree = bideg
        self.prime = Prime(prime)
        self.indices = indices
        self.entries = entries

    def entry(self, i: int, j: int) -> MotCoeff:
        return self.entries[i][j]

    def is_unitriangular(self) -> bool:
        """Unit diagonal and zero above it (``I < J``)."""
        n = len(self.indices)
        for i in range(n):
            d = self.entries[i][i]
            if not d.is_scalar() or d.scalar_value() not in (1, int(self.prime) - 1):
                return False
            for j in range(i + 1, n):
                if self.entries[i][j]:
                    return False
        return True

    def __str__(self) -> str:
        rows = [" ".join(str(c) for c in row) for row in self.entries]
        return "\n".join(rows)


_GRAM: dict = {}


def gram(bideg, prime: int = 2) -> GramMatrix:
    p = int(Prime(prime))
    bideg = Bidegree(*bideg)
    key = (p, bideg)
    hit = _GRAM.get(key)
    if hit is not None:
        return hit
    indices = dual_monomials(bideg, p)
    entries = []
    for i in indices:
        tokens = mono_peel_tokens(theta(i, p))
        entries.append([MotCoeff(p, pair_tokens(tokens, j, p)) for j in indices])
    g = GramMatrix(bideg, p, indices, entries)
    with _LOCK:
        return _GRAM.setdefault(key, g)


# ---------------------------------------------------------------------------
# named elements


def Q(indices, prime: int = 2) -> MilnorElement:
    """``Q(X)``: Milnor basis element with exterior part the set ``X``."""
    X = sorted(set(indices))
    eps = [0] * (X[-1] + 1 if X else 0)
    for i in X:
        eps[i] = 1
    return MilnorElement(prime, {make_index(eps, ()): 1})


def Q_number(n: int) -> MilnorElement:
    """``Q(n)`` at ``l = 2``: ``Q`` of the set of binary digits of ``n``."""
    return Q([i for i in range(n.bit_length()) if n >> i & 1], 2)


def q(n: int, prime: int = 2) -> MilnorElement:
    """``q_n``, dual to ``xi_n``."""
    return MilnorElement(prime, {xi(n): 1})


def Pm(r, prime: int = 2) -> MilnorElement:
    """``P^(r1, r2, ...)``, dual to ``xi_1^r1 xi_2^r2 ...``."""
    return MilnorElement(prime, {make_index((), tuple(r)): 1})


def M(k: int, prime: int = 2) -> SteenrodElement:
    """``P^{l^{k-1}} ... P^l P^1``."""
    p = int(Prime(prime))
    return normalize([("P", p**i) for i in range(k - 1, -1, -1)], p)


def milnor_generator(kind: str, data, prime: int = 2):
    """Dispatch on ``kind`` in ``{"Q", "q", "Pm", "M"}``."""
    if kind == "Q":
        return Q(data, prime)
    if kind == "q":
        return q(data, prime)
    if kind == "Pm":
        return Pm(data, prime)
    if kind == "M":
        return M(data, prime)
    raise ValueError(f"unknown generator kind {kind!r}")


def to_admissible(x) -> SteenrodElement:
    return milnor_to_admissible(x) if isinstance(x, MilnorElement) else x


__all__ = [
    "pair",
    "pair_left",
    "pair_tokens",
    "peel_tokens",
    "dual_monomials",
    "MilnorElement",
    "admissible_to_milnor",
    "milnor_to_admissible",
    "product_via_duality",
    "GramMatrix",
    "gram",
    "Q",
    "Q_number",
    "q",
    "Pm",
    "M",
    "milnor_generator",
    "render_milnor_index",
]
