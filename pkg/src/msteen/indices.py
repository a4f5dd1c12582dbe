"""Index sequences shared by admissible monomials and dual monomials.

An index sequence ``I = (e0, r1, e1, r2, e2, ...)`` is stored zero-trimmed.
It names both the admissible monomial ``theta(I)`` and the dual monomial
``tau_0^e0 xi_1^r1 tau_1^e1 ...``.  Sequences are compared right to left
after zero padding, which is the canonical term order everywhere.
"""

from __future__ import annotations


def trim(seq) -> tuple:
    seq = list(seq)
    while seq and seq[-1] == 0:
        seq.pop()
    return tuple(seq)


def index_key(index: tuple) -> tuple:
    """Sort key realising the right-to-left lexicographic order."""
    index = trim(index)
    return (len(index), tuple(reversed(index)))


def index_eps(index: tuple) -> tuple:
    """The exterior exponents ``(e0, e1, ...)``."""
    return tuple(index[0::2])


def index_r(index: tuple) -> tuple:
    """The polynomial exponents ``(r1, r2, ...)``."""
    return tuple(index[1::2])


def make_index(eps=(), r=()) -> tuple:
    """Build an index sequence from separate exterior and polynomial parts."""
    n = max(len(eps), len(r) + 1)
    out = []
    for i in range(n):
        out.append(eps[i] if i < len(eps) else 0)
        if i < len(r):
            out.append(r[i])
        elif i + 1 < n:
            out.append(0)
    return trim(out)


def theta(index: tuple, p: int) -> tuple:
    """Admissible monomial ``(e0, s1, e1, ..., sk, ek)`` attached to ``index``.

    ``s_i = sum_{j >= i} (r_j + e_j) p^(j - i)``.
    """
    index = trim(index)
    if not index:
        return (0,)
    eps = list(index_eps(index))
    r = list(index_r(index))
    k = max(len(r), len(eps) - 1)
    eps += [0] * (k + 1 - len(eps))
    r += [0] * (k - len(r))
    s = [0] * (k + 2)
    for i in range(k, 0, -1):
        s[i] = r[i - 1] + eps[i] + p * s[i + 1]
    out = [eps[0]]
    for i in range(1, k + 1):
        out.append(s[i])
        out.append(eps[i])
    return tuple(out)


def theta_inverse(mono: tuple, p: int) -> tuple:
    """Index sequence of an admissible monomial (inverse of ``theta``)."""
    k = (len(mono) - 1) // 2
    s = [mono[2 * i - 1] for i in range(1, k + 1)] + [0]
    out = [mono[0]]
    for i in range(1, k + 1):
        out.append(s[i - 1] - (p * s[i] + mono[2 * i]))
        out.append(mono[2 * i])
    return trim(out)
