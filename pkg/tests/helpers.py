"""Oracles shared by several test modules."""

import random
from math import comb

from msteen.algebra import (
    IDENTITY,
    SteenrodElement,
    _add,
    admissible_monomials,
    bidegree,
    coproduct,
    first_degree_parity,
    mono_tokens,
    normalize,
)
from msteen.coeff import Bidegree, MotCoeff
from msteen.dual import dual_bidegree


def monomials_up_to(p, max_weight):
    """All admissible monomials of weight at most ``max_weight``."""
    out = []
    for w in range(0, max_weight + 1):
        if w % (p - 1):
            continue
        for d in range(2 * w, 3 * w + 2):
            out.extend(admissible_monomials(Bidegree(d, w), p))
    return out


def triple_coproduct_left(e):
    """``(Psi (x) 1) Psi`` as ``{(m1, m2, m3, a, b): c}``."""
    p = int(e.prime)
    out = {}
    for (m1, m2), lam in coproduct(e).terms.items():
        inner = coproduct(SteenrodElement(p, {m1: lam}))
        for (x, y), mu in inner.terms.items():
            for (a, b), c in mu.terms.items():
                _add(out, (x, y, m2, a, b), c, p)
    return out


def triple_coproduct_right(e):
    """``(1 (x) Psi) Psi``; the inner coefficient is a scalar of the tensor
    product and joins the outer one on the left."""
    p = int(e.prime)
    out = {}
    for (m1, m2), lam in coproduct(e).terms.items():
        for (y, z), mu in coproduct(SteenrodElement.monomial(p, m2)).terms.items():
            for (a, b), c in (lam * mu).terms.items():
                _add(out, (m1, y, z, a, b), c, p)
    return out


def flip(t):
    """Bigraded flip ``x (x) y -> (-1)^{|x||y|} y (x) x`` (first degrees)."""
    p = int(t.prime)
    out = {}
    for (m1, m2), lam in t.terms.items():
        s = -1 if p != 2 and first_degree_parity(m1) and first_degree_parity(m2) else 1
        for (a, b), c in lam.terms.items():
            _add(out, (m2, m1, a, b), s * c, p)
    return out


def tensor_flat(t):
    return t._flat()


def counit_left(t):
    """``(eps (x) 1) t`` as an element."""
    p = int(t.prime)
    terms = {}
    for (m1, m2), lam in t.terms.items():
        if m1 == IDENTITY:
            terms[m2] = terms[m2] + lam if m2 in terms else lam
    return SteenrodElement(p, terms)


def counit_right(t):
    p = int(t.prime)
    terms = {}
    for (m1, m2), lam in t.terms.items():
        if m2 == IDENTITY:
            terms[m1] = terms[m1] + lam if m1 in terms else lam
    return SteenrodElement(p, terms)


def factorial_binom(n, k, p):
    return comb(n, k) % p if 0 <= k <= n else 0


def random_word(rng, p, max_weight, allow_coeff=True):
    """Random word in ``b``, ``P^n`` and (at ``l = 2``) ``t``, ``r``."""
    word = []
    w = 0
    while True:
        choice = rng.random()
        if choice < 0.3:
            word.append(("b",))
        elif choice < 0.45 and p == 2 and allow_coeff:
            word.append(MotCoeff.tau() if rng.random() < 0.5 else MotCoeff.rho())
        elif choice < 0.85:
            n = rng.randint(1, max(1, (max_weight - w) // (p - 1)))
            if w + n * (p - 1) > max_weight:
                break
            word.append(("P", n))
            w += n * (p - 1)
        else:
            break
    return word


def dual_monomials_up_to(p, max_weight):
    from msteen.milnor import dual_monomials

    out = []
    for w in range(0, max_weight + 1):
        for d in range(2 * w, 3 * w + 2):
            out.extend(dual_monomials(Bidegree(d, w), p))
    return out


def bracket(C, D, alpha, beta, p):
    """``[C (x) D, alpha (x) beta] = <C <D, alpha>, beta>`` for monomials.

    This is the pairing that reflects composition; it is the one used
    against the dual coproduct, not in the product adjunction."""
    from msteen.milnor import pair

    mu = pair(SteenrodElement.monomial(p, D), alpha)
    if not mu:
        return mu
    return pair(normalize(mono_tokens(C) + [mu], p), beta)


def tensor_pairing(C, D, alpha, beta, p):
    """``<C (x) D, alpha (x) beta> = (-1)^{|D||alpha|} <C, alpha> <D, beta>``
    with first degrees in the sign."""
    from msteen.milnor import pair

    left = pair(SteenrodElement.monomial(p, C), alpha)
    if not left:
        return left
    sign = -1 if p != 2 and bidegree(D, p).degree % 2 and dual_bidegree(alpha, p).degree % 2 else 1
    return sign * left * pair(SteenrodElement.monomial(p, D), beta)


def adjunction_instances(p, count, seed, max_weight=8):
    """Random ``(F, alpha, beta)`` with ``F`` an admissible monomial, mostly
    with ``alpha beta`` in the bidegree of ``F``."""
    rng = random.Random(seed)
    monos = monomials_up_to(p, max_weight)
    duals = dual_monomials_up_to(p, max_weight)
    by_deg = {}
    for x in duals:
        by_deg.setdefault(dual_bidegree(x, p), []).append(x)
    out = []
    for _ in range(count):
        m = rng.choice(monos)
        W = bidegree(m, p)
        alpha = rng.choice([x for x in duals if dual_bidegree(x, p).weight <= W.weight])
        rest = by_deg.get(W - dual_bidegree(alpha, p))
        beta = rng.choice(rest) if rest and rng.random() < 0.8 else rng.choice(duals)
        out.append((m, alpha, beta))
    return out


def adjunction_holds(m, alpha, beta, p):
    """``<F, alpha beta> == <Psi* F, alpha (x) beta>``; returns (ok, nontrivial)."""
    from msteen.dual import DualElement, dual_mul
    from msteen.milnor import pair

    F = SteenrodElement.monomial(p, m)
    prod = dual_mul(DualElement.monomial(p, alpha), DualElement.monomial(p, beta))
    lhs = MotCoeff.zero(p)
    for omega, c in prod.terms.items():
        lhs = lhs + pair(F, omega) * c
    rhs = MotCoeff.zero(p)
    for (C, D), lam in coproduct(F).terms.items():
        rhs = rhs + lam * tensor_pairing(C, D, alpha, beta, p)
    return lhs == rhs, bool(lhs)


# Milnor primitives ----------------------------------------------------------


def q_sign_rule_failures(p, max_index, disjoint_only=False):
    """Pairs ``(A, B)`` of index sets where ``Q(B) Q(A)`` is not
    ``(-1)^#{a > b} Q(A u B)`` (or 0 when they meet), computed with the
    admissible product.  ``A = B = {i}`` covers ``Q_i^2 = 0``."""
    from itertools import combinations

    from msteen.algebra import multiply
    from msteen.milnor import Q, admissible_to_milnor, milnor_to_admissible

    idx = range(max_index + 1)
    subs = [X for k in range(len(idx) + 1) for X in combinations(idx, k)]
    adm = {X: milnor_to_admissible(Q(X, p)) for X in subs}
    bad = []
    for A in subs:
        for B in subs:
            meet = set(A) & set(B)
            if meet and (disjoint_only and not (len(A) == len(B) == 1)):
                continue
            got = admissible_to_milnor(multiply(adm[B], adm[A]))
            if meet:
                ok = not got
            else:
                inv = sum(1 for a in A for b in B if a > b)
                ok = got == (-1) ** inv * Q(set(A) | set(B), p)
            if not ok:
                bad.append((A, B))
    return bad


def q_coproduct_holds(n):
    """``Psi* Q(n) = sum_{a+b=n} r^carries(a,b) Q(a) (x) Q(b)`` at ``l = 2``."""
    from msteen.algebra import SteenrodTensor, tensor
    from msteen.coeff import carries
    from msteen.milnor import Q_number, milnor_to_admissible

    adm = [milnor_to_admissible(Q_number(k)) for k in range(n + 1)]
    want = SteenrodTensor(2)
    for a in range(n + 1):
        want = want + tensor(MotCoeff.rho() ** carries(a, n - a, 2) * adm[a], adm[n - a])
    return coproduct(adm[n]) == want


def q_primitive_holds(i, p):
    from msteen.algebra import tensor
    from msteen.milnor import Q, milnor_to_admissible

    a = milnor_to_admissible(Q([i], p))
    one = SteenrodElement.identity(p)
    return coproduct(a) == tensor(a, one) + tensor(one, a)


def q_commutator_holds(n, p):
    """``Q_n = q_n b - b q_n`` with both product engines."""
    from msteen.algebra import BETA, multiply
    from msteen.milnor import Q, admissible_to_milnor, milnor_to_admissible, product_via_duality, q

    qn = milnor_to_admissible(q(n, p))
    b = normalize([BETA], p)
    want = Q([n], p)
    direct = admissible_to_milnor(multiply(qn, b) - multiply(b, qn))
    dual = product_via_duality(qn, [BETA], p) - product_via_duality([BETA], qn, p)
    return direct == want and dual == want


__all__ = [name for name in dir() if not name.startswith("_")]
