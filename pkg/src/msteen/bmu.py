"""Truncated cohomology of a product of copies of ``B mu_l`` with all operations.

Generators ``u_i`` (bidegree ``(1, 1)``) and ``v_i`` (bidegree ``(2, 1)``)
satisfy ``u_i^2 = t v_i + r u_i`` at ``l = 2`` and ``u_i^2 = 0`` at odd
``l``, where ``u``'s anticommute.  Powers ``v_i^N`` are set to zero; the
ideal they span is stable under every operation.

Operations act through the total-operation vector of a class ``x``:
``T(x)[n] = (P^n x, b P^n x)``.  On generators ``b u = v``,
``P^1 v = v^l`` and ``P^0`` is the identity; the coefficients ``t``, ``r``
are treated as classes with ``b t = r``.  Products use the Cartan formula

    P^n(xy)   = sum P^i x P^j y + t sum_{i+j=n-1} bP^i x bP^j y
    bP^n(xy)  = sum (bP^i x P^j y + (-1)^|x| P^i x bP^j y)
                + r sum_{i+j=n-1} bP^i x bP^j y

with the ``t`` and ``r`` terms present only at ``l = 2``.
"""

from __future__ import annotations

import logging
import threading

from msteen.algebra import BETA, SteenrodElement, _coerce_token, bidegree as mono_bidegree
from msteen.algebra import mono_tokens, render_term
from msteen.coeff import Bidegree, MotCoeff, Prime
from msteen.dual import UNIT, mono_mul as dual_mono_mul, render_dual_monomial, tau, xi
from msteen.indices import index_key
from msteen.kernels import COEFF_BITS, apply_op, binom_mod, ring_mono_mul

log = logging.getLogger(__name__)

_LOCK = threading.Lock()
_TVEC_LIMIT = 200_000
_CMAX = (1 << COEFF_BITS) - 1
_EVAL_MEMO_LIMIT = 64


def _add(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class BmuRing:
    """Configuration: prime, number of ``(u, v)`` pairs and truncation ``N``."""

    def __init__(self, prime: int, arity: int, truncation: int):
        if arity < 1 or truncation < 2:
            raise ValueError("need arity >= 1 and truncation >= 2")
        self.prime = Prime(prime)
        self.p = int(self.prime)
        self.n = arity
        self.N = truncation
        self.one = (0,) * (2 * arity)
        self._tvec: dict = {}
        self._coact: dict = {}
        self._mul: dict = {}
        self._test_eval: dict = {}

    def __eq__(self, other) -> bool:
        return isinstance(other, BmuRing) and (self.p, self.n, self.N) == (other.p, other.n, other.N)

    def __hash__(self):
        return hash((self.p, self.n, self.N))


    def __repr__(self) -> str:
        return f"BmuRing(prime={self.p}, arity={self.n}, truncation={self.N})"

    # monomials ------------------------------------------------------------
    def u(self, i: int) -> tuple:
        lst = list(self.one)
        lst[2 * (i - 1)] = 1
        return tuple(lst)

    def v(self, i: int, e: int = 1) -> tuple | None:
        if e >= self.N:
            return None
        lst = list(self.one)
        lst[2 * (i - 1) + 1] = e
        return tuple(lst)

    def mono_bidegree(self, m: tuple) -> Bidegree:
        us = sum(m[0::2])
        vs = sum(m[1::2])
        return Bidegree(us + 2 * vs, us + vs)

    def mono_mul(self, x: tuple, y: tuple) -> dict:
        """``x * y`` as a flat dict ``{(mono, a, b): c}`` (memoized)."""
        key = (x, y)
        hit = self._mul.get(key)
        if hit is None:
            hit = self._mul[key] = ring_mono_mul(x, y, self.p, self.N)
        return hit

    def flat_mul(self, x: dict, y: dict) -> dict:
        p = self.p
        out: dict = {}
        for (m1, a1, b1), c1 in x.items():
            for (m2, a2, b2), c2 in y.items():
                for (m, a, b), c in self.mono_mul(m1, m2).items():
                    _add(out, (m, a + a1 + a2, b + b1 + b2), c * c1 * c2, p)
        return out

    # total operation vectors ------------------------------------------------
    def _flat_parity(self, x: dict) -> int:
        for (m, a, b) in x:
            return (sum(m[0::2]) + b) & 1
        return 0

    def _cartan(self, tx: list, ty: list, parity_x: int, upto: int | None = None) -> list:
        p = self.p
        length = len(tx) + len(ty) - (0 if p == 2 else 1)
        if upto is not None:
            length = min(length, upto + 1)
        out = [[{}, {}] for _ in range(length)]
        sgn = -1 if (parity_x and p != 2) else 1
        for i, (px, bx) in enumerate(tx):
            for j, (py, by) in enumerate(ty):
                n = i + j
                if n >= length:
                    break
                for key, c in self.flat_mul(px, py).items():
                    _add(out[n][0], key, c, p)
                for key, c in self.flat_mul(bx, py).items():
                    _add(out[n][1], key, c, p)
                for key, c in self.flat_mul(px, by).items():
                    _add(out[n][1], key, sgn * c, p)
                if p == 2 and bx and by and n + 1 < length:
                    bb = self.flat_mul(bx, by)
                    for (m, a, b), c in bb.items():
                        _add(out[n + 1][0], (m, a + 1, b), c, p)
                        _add(out[n + 1][1], (m, a, b + 1), c, p)
        while out and not out[-1][0] and not out[-1][1]:
            out.pop()
        return out

    def _var_vector(self, i: int, e: int, k: int, upto: int | None) -> list:
        """Vector of ``u_i^e v_i^k``: ``P^j v^k = C(k, j) v^(k + j(l-1))`` and ``b u = v``."""
        p, N = self.p, self.N
        top = k if upto is None else min(k, upto)
        out = []
        for j in range(top + 1):
            c = binom_mod(k, j, p)
            ex = k + j * (p - 1)
            pj: dict = {}
            bj: dict = {}
            if c:
                lst = list(self.one)
                if ex < N:
                    lst[2 * i - 1] = ex
                    lst[2 * i - 2] = e
                    pj[(tuple(lst), 0, 0)] = c
                if e and ex + 1 < N:
                    lst[2 * i - 2] = 0
                    lst[2 * i - 1] = ex + 1
                    bj[(tuple(lst), 0, 0)] = c
            out.append([pj, bj])
        return out

    def total_vector(self, m: tuple, a: int = 0, b: int = 0, upto: int | None = None) -> list:
        """``[(P^n x, b P^n x)]`` for ``x = t^a r^b m`` (flat dicts), ``n <= upto``.

        The monomial is split into one factor per variable; each factor has
        a closed form and the factors are combined with the Cartan formula.
        """
        key = (m, a, b, upto)
        hit = self._tvec.get(key)
        if hit is not None:
            return hit
        one = self.one
        factors = []
        for _ in range(a):
            factors.append(([[{(one, 1, 0): 1}, {(one, 0, 1): 1}]], 0))
        for _ in range(b):
            factors.append(([[{(one, 0, 1): 1}, {}]], 1))
        for i in range(self.n):
            e, k = m[2 * i], m[2 * i + 1]
            if e or k:
                factors.append((self._var_vector(i + 1, e, k, upto), e))
        if not factors:
            out = [[{(one, 0, 0): 1}, {}]]
        else:
            out = factors[-1][0]
            for vec, parity in reversed(factors[:-1]):
                out = self._cartan(vec, out, parity, upto)
        if len(self._tvec) > _TVEC_LIMIT:
            self._tvec.clear()
        self._tvec[key] = out
        return out

    def apply_flat(self, tok, x: dict) -> dict:
        """Apply ``b``, ``P^n``, ``Sq^n`` or a coefficient to a flat class.

        This is the reference path built on :meth:`total_vector`; :func:`act`
        uses the packed kernel instead.
        """
        p = self.p
        if isinstance(tok, MotCoeff):
            return self.flat_mul({(self.one, a, b): c for (a, b), c in tok.terms.items()}, x)
        n, slot = _op_index(tok)
        if n < 0:
            return {}
        out: dict = {}
        for (m, a, b), c in x.items():
            vec = self.total_vector(m, a, b, n)
            if n < len(vec):
                for key, c2 in vec[n][slot].items():
                    _add(out, key, c * c2, p)
        return out

    # packed classes -------------------------------------------------------
    @property
    def _shift(self) -> int:
        return self.n * (self.N.bit_length() + 1)

    def pack(self, flat: dict) -> dict:
        """Flat class to ``{int key: c}`` in the layout used by the kernels."""
        vb = self.N.bit_length() + 1
        sh = self._shift
        out = {}
        for (m, a, b), c in flat.items():
            if a > _CMAX or b > _CMAX:
                raise OverflowError("coefficient exponent too large to pack")
            key = (b << (sh + COEFF_BITS)) | (a << sh)
            for i in range(self.n):
                key |= ((m[2 * i + 1] << 1) | m[2 * i]) << (i * vb)
            out[key] = c
        return out

    def unpack(self, packed: dict) -> dict:
        vb = self.N.bit_length() + 1
        vmask = (1 << vb) - 1
        sh = self._shift
        out = {}
        for key, c in packed.items():
            m = []
            for i in range(self.n):
                f = (key >> (i * vb)) & vmask
                m.append(f & 1)
                m.append(f >> 1)
            out[(tuple(m), (key >> sh) & _CMAX, key >> (sh + COEFF_BITS))] = c
        return out

    def apply_packed(self, tok, x: dict) -> dict:
        p = self.p
        if isinstance(tok, MotCoeff):
            if tok.is_scalar():
                s = tok.scalar_value()
                if s == 1:
                    return x
                return {key: c * s % p for key, c in x.items()} if s else {}
            sh = self._shift
            out: dict = {}
            for (ca, cb), s in tok.terms.items():
                shift = (cb << (sh + COEFF_BITS)) + (ca << sh)
                for key, c in x.items():
                    _add(out, key + shift, c * s, p)
            return out
        n, slot = _op_index(tok)
        return apply_op(x, n, slot, p, self.n, self.N)


def _op_index(tok) -> tuple:
    """``(n, slot)`` with ``slot = 1`` for ``b P^n``."""
    if tok == BETA:
        return 0, 1
    if tok[0] == "Sq":
        return tok[1] >> 1, tok[1] & 1
    return tok[1], 0


class BmuClass:
    """Element of a :class:`BmuRing`, stored as ``{monomial: MotCoeff}``."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: BmuRing, terms: dict | None = None):
        self.ring = ring
        p = ring.p
        clean = {}
        for m, c in (terms or {}).items():
            if not isinstance(c, MotCoeff):
                c = MotCoeff.scalar(p, c)
            if len(m) != 2 * ring.n or any(x >= ring.N for x in m[1::2]):
                raise ValueError(f"{m} is not a monomial of {ring}")
            if any(x not in (0, 1) for x in m[0::2]):
                raise ValueError("u exponents must be 0 or 1")
            if c:
                clean[m] = clean[m] + c if m in clean else c
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def _from_flat(cls, ring: BmuRing, flat: dict) -> "BmuClass":
        grouped: dict = {}
        for (m, a, b), c in flat.items():
            grouped.setdefault(m, {})[(a, b)] = c
        out = cls.__new__(cls)
        out.ring = ring
        out.terms = {m: MotCoeff(ring.p, t) for m, t in grouped.items()}
        return out

    def _flat(self) -> dict:
        out = {}
        for m, c in self.terms.items():
            for (a, b), s in c.terms.items():
                out[(m, a, b)] = s
        return out

    @classmethod
    def one(cls, ring: BmuRing) -> "BmuClass":
        return cls(ring, {ring.one: 1})

    @classmethod
    def u(cls, ring: BmuRing, i: int) -> "BmuClass":
        return cls(ring, {ring.u(i): 1})

    @classmethod
    def v(cls, ring: BmuRing, i: int, e: int = 1) -> "BmuClass":
        m = ring.v(i, e)
        return cls(ring, {m: 1} if m is not None else {})

    def __add__(self, other: "BmuClass") -> "BmuClass":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return BmuClass(self.ring, out)

    def __neg__(self) -> "BmuClass":
        return BmuClass(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "BmuClass") -> "BmuClass":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, BmuClass):
            return bmu_mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int):
            other = MotCoeff.scalar(self.ring.p, other)
        if isinstance(other, MotCoeff):
            return BmuClass._from_flat(self.ring, self.ring.apply_flat(other, self._flat()))
        return NotImplemented

    def __pow__(self, e: int) -> "BmuClass":
        out = BmuClass.one(self.ring)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, BmuClass):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def bidegrees(self) -> set:
        out = set()
        for m, c in self.terms.items():
            for (a, b) in c.terms:
                out.add(self.ring.mono_bidegree(m) + Bidegree(b, a + b))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            for (a, b), c in sorted(self.terms[m].terms.items()):
                parts.append(render_term(c, a, b, render_bmu_monomial(m)))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"BmuClass({self})"


def render_bmu_monomial(m: tuple) -> str:
    parts = []
    for i in range(len(m) // 2):
        e, k = m[2 * i], m[2 * i + 1]
        if e:
            parts.append(f"u_{i + 1}")
        if k:
            parts.append(f"v_{i + 1}" if k == 1 else f"v_{i + 1}^{k}")
    return " ".join(parts) if parts else "1"


def bmu_mul(x: BmuClass, y: BmuClass) -> BmuClass:
    if x.ring != y.ring:
        raise ValueError("classes live in different rings")
    return BmuClass._from_flat(x.ring, x.ring.flat_mul(x._flat(), y._flat()))


def _word_tokens(w, p: int) -> list:
    if isinstance(w, SteenrodElement):
        raise TypeError("expected a word")
    return [_coerce_token(t, p) for t in w]


def act(w, x: BmuClass) -> BmuClass:
    """Apply a word (or a :class:`SteenrodElement`) to a class."""
    ring = x.ring
    return BmuClass._from_flat(ring, ring.unpack(_act_packed(ring, w, ring.pack(x._flat()))))


def _act_packed(ring: BmuRing, w, base: dict, memo: dict | None = None) -> dict:
    p = ring.p
    if not isinstance(w, SteenrodElement):
        return _apply_tokens(ring, _word_tokens(w, p), base, memo)
    if w.prime != p:
        raise ValueError("operation over a different prime")
    out: dict = {}
    for m, c in w.terms.items():
        res = _apply_tokens(ring, mono_tokens(m), base, memo)
        res = ring.apply_packed(c, res) if res else res
        for key, v in res.items():
            _add(out, key, v, p)
    return out


def act_reference(w, x: BmuClass) -> BmuClass:
    """Same as :func:`act` through the slower generic Cartan products."""
    ring = x.ring
    res = x._flat()
    for tok in reversed(_word_tokens(w, ring.p)):
        res = ring.apply_flat(tok, res)
        if not res:
            break
    return BmuClass._from_flat(ring, res)


def _apply_tokens(ring: BmuRing, toks: list, packed: dict, memo: dict | None = None) -> dict:
    """Apply ``toks`` right to left; ``memo`` caches results per word suffix."""
    if memo is None:
        for tok in reversed(toks):
            packed = ring.apply_packed(tok, packed)
            if not packed:
                break
        return packed
    key = tuple(toks)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if not toks:
        return packed
    res = _apply_tokens(ring, toks[1:], packed, memo)
    res = ring.apply_packed(toks[0], res) if res else res
    if len(memo) >= _EVAL_MEMO_LIMIT:
        memo.clear()
    memo[key] = res
    return res


def _word_bidegree(w, p: int) -> set:
    if isinstance(w, SteenrodElement):
        return w.bidegrees()
    deg = Bidegree(0, 0)
    for tok in _word_tokens(w, p):
        if isinstance(tok, MotCoeff):
            if not tok:
                return set()
            deg = deg + tok.bidegree()
        elif tok == BETA:
            deg = deg + Bidegree(1, 0)
        elif tok[0] == "Sq":
            deg = deg + Bidegree(tok[1], tok[1] // 2)
        else:
            deg = deg + mono_bidegree((0, tok[1], 0), p) if tok[1] > 0 else deg
    return {deg}


def test_class(ring: BmuRing, k: int | None = None) -> BmuClass:
    """``u_1 v_1 u_2 v_2 ... u_k v_k`` (all pairs by default)."""
    k = ring.n if k is None else k
    lst = [0] * (2 * ring.n)
    for i in range(k):
        lst[2 * i] = 1
        lst[2 * i + 1] = 1
    return BmuClass(ring, {tuple(lst): 1})


def equal_via_module(F, G, prime: int | None = None, arity: int | None = None, truncation: int | None = None) -> bool:
    """Compare two operations by evaluating on ``u_1 v_1 ... u_n v_n``.

    With weight ``w`` the ring uses ``n = w + 1`` pairs and truncation
    ``N = w + 2``; evaluation there is injective on operations of weight
    at most ``w``.
    """
    if prime is None:
        prime = F.prime if isinstance(F, SteenrodElement) else (G.prime if isinstance(G, SteenrodElement) else 2)
    p = int(Prime(prime))
    degs = _word_bidegree(F, p) | _word_bidegree(G, p)
    if len(degs) > 1:
        log.warning("bidegree mismatch: %s", sorted(tuple(d) for d in degs))
        return False
    w = max((d.weight for d in degs), default=0)
    ring = module_ring(p, arity or w + 1, truncation or w + 2)
    base = ring.pack(test_class(ring)._flat())
    memo = ring._test_eval
    return _act_packed(ring, F, base, memo) == _act_packed(ring, G, base, memo)


_RINGS: dict = {}


def module_ring(p: int, arity: int, truncation: int) -> BmuRing:
    """Shared ring instances so that operation caches are reused."""
    key = (p, arity, truncation)
    with _LOCK:
        ring = _RINGS.get(key)
        if ring is None:
            ring = _RINGS[key] = BmuRing(p, arity, truncation)
    return ring


# ---------------------------------------------------------------------------
# total power and coaction


class TotalPowerExpansion:
    """``sum_j A_j d^j + sum_j B_j c d^j`` keyed by ``(j, has_c)``."""

    def __init__(self, ring: BmuRing, terms: dict):
        self.ring = ring
        self.terms = {k: v for k, v in terms.items() if v}

    def __eq__(self, other) -> bool:
        return isinstance(other, TotalPowerExpansion) and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (j, has_c) in sorted(self.terms):
            sym = ("c " if has_c else "") + ("d" if j == 1 else f"d^{j}" if j else "")
            sym = sym.strip()
            body = str(self.terms[(j, has_c)])
            parts.append(f"({body}) {sym}".strip() if sym else body)
        return " + ".join(parts)


def total_power(x: BmuClass, r: int) -> TotalPowerExpansion:
    """``P(x) = sum P^{r-j}(x) d^j + sum bP^{r-1-j}(x) c d^j`` for ``x`` in ``(2r, r)``."""
    degs = x.bidegrees()
    if degs and degs != {Bidegree(2 * r, r)}:
        raise ValueError(f"class must have bidegree ({2 * r}, {r})")
    terms = {}
    for j in range(r + 1):
        terms[(j, 0)] = act([("P", r - j)], x)
    for j in range(r):
        terms[(j, 1)] = act([BETA, ("P", r - 1 - j)], x)
    return TotalPowerExpansion(x.ring, terms)


def coaction(x: BmuClass) -> dict:
    """``lambda*(x)`` as ``{dual monomial: BmuClass}``.

    ``lambda*(u) = xi_0 (x) u + sum tau_k (x) v^{l^k}``,
    ``lambda*(v) = sum xi_k (x) v^{l^k}``, ``lambda*(t) = xi_0 (x) t + tau_0 (x) r``;
    extended multiplicatively.  Right coefficients of dual monomials move
    onto the class factor.
    """
    ring = x.ring
    p = ring.p
    flat: dict = {}
    for (m, a, b), c in x._flat().items():
        for key, v in _coact_mono(ring, m, a, b).items():
            _add(flat, key, c * v, p)
    grouped: dict = {}
    for (omega, m, a, b), c in flat.items():
        grouped.setdefault(omega, {})[(m, a, b)] = c
    return {omega: BmuClass._from_flat(ring, f) for omega, f in grouped.items()}


def _coact_mul(ring: BmuRing, x: dict, y: dict) -> dict:
    p = ring.p
    out: dict = {}
    for (w1, m1, a1, b1), c1 in x.items():
        par1 = (sum(m1[0::2]) + b1) & 1
        for (w2, m2, a2, b2), c2 in y.items():
            sign = -1 if (p != 2 and par1 and sum(w2[0::2]) & 1) else 1
            for (w, da, db), dc in dual_mono_mul(w1, w2, p).items():
                for (m, a, b), c in ring.mono_mul(m1, m2).items():
                    _add(out, (w, m, a + a1 + a2 + da, b + b1 + b2 + db), sign * c * c1 * c2 * dc, p)
    return out


def _coact_gen(ring: BmuRing, kind: str, i: int = 0) -> dict:
    p, N, one = ring.p, ring.N, ring.one
    out: dict = {}
    if kind == "t":
        out[(UNIT, one, 1, 0)] = 1
        out[(tau(0), one, 0, 1)] = 1
    elif kind == "r":
        out[(UNIT, one, 0, 1)] = 1
    elif kind == "u":
        out[(UNIT, ring.u(i), 0, 0)] = 1
        k = 0
        while p**k < N:
            out[(tau(k), ring.v(i, p**k), 0, 0)] = 1
            k += 1
    else:
        k = 0
        while p**k < N:
            out[(xi(k), ring.v(i, p**k), 0, 0)] = 1
            k += 1
    return out


def _coact_mono(ring: BmuRing, m: tuple, a: int, b: int) -> dict:
    key = (m, a, b)
    hit = ring._coact.get(key)
    if hit is not None:
        return hit
    if a:
        out = _coact_mul(ring, _coact_gen(ring, "t"), _coact_mono(ring, m, a - 1, b))
    elif b:
        out = _coact_mul(ring, _coact_gen(ring, "r"), _coact_mono(ring, m, 0, b - 1))
    elif m == ring.one:
        out = {(UNIT, ring.one, 0, 0): 1}
    else:
        i = next(k for k, x in enumerate(m) if x)
        lst = list(m)
        lst[i] -= 1
        gen = _coact_gen(ring, "u" if i % 2 == 0 else "v", i // 2 + 1)
        out = _coact_mul(ring, gen, _coact_mono(ring, tuple(lst), 0, 0))
    with _LOCK:
        return ring._coact.setdefault(key, out)


def render_coaction(co: dict) -> str:
    if not co:
        return "0"
    parts = []
    for omega in sorted(co, key=index_key):
        parts.append(f"{render_dual_monomial(omega) or '1'} ⊗ ({co[omega]})")
    return " + ".join(parts)

