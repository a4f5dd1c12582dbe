"""Pure-Python versions of the arithmetic kernels.

These are the reference implementations; the compiled module ``_kernels``
mirrors them exactly and is preferred when it has been built.
"""


def binom_mod(x, y, p):
    """Binomial coefficient C(x, y) reduced mod the prime ``p`` (Lucas).

    Returns 0 when ``y > x`` or when either argument is negative.
    """
    if y < 0 or x < 0 or y > x:
        return 0
    result = 1
    while y:
        xd = x % p
        yd = y % p
        if yd > xd:
            return 0
        # small binomial by multiplicative formula, exact over the integers
        num = 1
        den = 1
        for i in range(yd):
            num *= xd - i
            den *= i + 1
        result = (result * (num // den)) % p
        x //= p
        y //= p
    return result


def carries(a, b, p):
    """Number of carries when adding ``a`` and ``b`` in base ``p``."""
    count = 0
    carry = 0
    while a or b or carry:
        s = a % p + b % p + carry
        carry = 1 if s >= p else 0
        count += carry
        a //= p
        b //= p
    return count


def poly_mul_into(out, left, right, p):
    """Accumulate the product of two sparse polynomials into ``out``.

    Keys are pairs of exponents ``(a, b)``; values are residues mod ``p``.
    Zero entries are removed from ``out``.
    """
    for (a1, b1), c1 in left.items():
        for (a2, b2), c2 in right.items():
            key = (a1 + a2, b1 + b2)
            v = (out.get(key, 0) + c1 * c2) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def ring_mono_mul(x, y, p, N):
    """Product of two monomials of the truncated ``B mu_l`` ring.

    Monomials are tuples ``(e1, m1, e2, m2, ...)`` for ``u_1^e1 v_1^m1 ...``.
    Returns ``{(mono, a, b): c}`` where ``t^a r^b`` is the coefficient;
    uses ``u^2 = t v + r u`` at ``p = 2`` and ``u^2 = 0`` otherwise, with
    ``v^N = 0``.
    """
    n = len(x)
    base = list(x)
    clashes = []
    sign = 1
    seen = 0
    for i in range(0, n, 2):
        ex = x[i]
        ey = y[i]
        m = x[i + 1] + y[i + 1]
        if m >= N:
            return {}
        base[i + 1] = m
        if ey:
            if ex:
                if p != 2:
                    return {}
                clashes.append(i)
            else:
                base[i] = 1
                # u's of x with larger index sit between; count them later
                seen += 1
    if p != 2 and seen:
        # sign of moving each u_j of y left past the u's of x with index > j
        after = 0
        for i in range(n - 2, -1, -2):
            if y[i] and after & 1:
                sign = -sign
            after += x[i]
    if not clashes:
        return {(tuple(base), 0, 0): sign % p}
    out = {(tuple(base), 0, 0): 1}
    for i in clashes:
        nxt = {}
        for (mono, a, b), c in out.items():
            if mono[i + 1] + 1 < N:
                lst = list(mono)
                lst[i] = 0
                lst[i + 1] += 1
                k = (tuple(lst), a + 1, b)
                nxt[k] = (nxt.get(k, 0) + c) % 2
            k = (mono, a, b + 1)
            nxt[k] = (nxt.get(k, 0) + c) % 2
        out = {k: c for k, c in nxt.items() if c}
    return out


# bits reserved for each of the t and r exponents in a packed key
COEFF_BITS = 12
_CMASK = (1 << COEFF_BITS) - 1


def _s_power_table(kmax, dmax):
    """Coefficients of ``s^k = alpha_k + s beta_k`` where ``s^2 = t (tau + r s)``.

    ``alpha[k][d]`` is the mod-2 coefficient of ``t^d`` and ``beta[k][d]`` the
    one of ``s t^d``; the accompanying ``tau^x r^y`` is fixed by degrees:
    ``y = 2d + slot - k`` and ``x = d - y``.
    """
    alpha = [[0] * (dmax + 2) for _ in range(kmax + 1)]
    beta = [[0] * (dmax + 2) for _ in range(kmax + 1)]
    alpha[0][0] = 1
    for k in range(kmax):
        for d in range(dmax + 1):
            alpha[k + 1][d + 1] ^= beta[k][d]
            beta[k + 1][d] ^= alpha[k][d]
            beta[k + 1][d + 1] ^= beta[k][d]
    return alpha, beta


_S_TABLES = {}


def s_power_tables(kmax, dmax):
    key = (kmax, dmax)
    hit = _S_TABLES.get(key)
    if hit is None:
        hit = _S_TABLES[key] = _s_power_table(kmax, dmax)
    return hit


def apply_op(src, n, slot, p, nvars, N):
    """Apply ``P^n`` (``slot = 0``) or ``b P^n`` (``slot = 1``) to a packed class.

    A packed class maps ``key -> c`` where ``key`` packs ``t^a r^b`` and a
    monomial ``u_1^e1 v_1^m1 ...``: variable ``i`` uses ``w + 1`` bits
    starting at ``i * (w + 1)`` (``w = N.bit_length()``, the ``u`` bit is the
    lowest), then ``COEFF_BITS`` bits each for ``a`` and ``b``.

    The result is read off the product over variables of
    ``sum_j t^j (P^j f + s bP^j f)``, where ``s`` anticommutes with odd
    classes and ``s^2 = t (tau + r s)`` at ``p = 2`` (``s^2 = 0`` otherwise).
    """
    w = N.bit_length()
    vb = w + 1
    vmask = (1 << vb) - 1
    sh = nvars * vb
    mono_mask = (1 << sh) - 1
    out = {}
    if n < 0:
        return out
    two = p == 2
    step = p - 1
    for key, c in src.items():
        mono = key & mono_mask
        a = (key >> sh) & _CMASK
        b = key >> (sh + COEFF_BITS)
        if two:
            alpha, beta = s_power_tables(a + nvars, n + 1)
        # per-variable options: (j, coeff, bits of P^j f, bits of bP^j f or -1)
        opts = []
        odd_before = []
        par = 0
        dead = False
        for i in range(nvars):
            f = (mono >> (i * vb)) & vmask
            if not f:
                continue
            e = f & 1
            k = f >> 1
            lst = []
            for j in range(min(k, n) + 1):
                cj = binom_mod(k, j, p)
                if not cj:
                    continue
                ex = k + j * step
                pa = ((ex << 1) | e) << (i * vb) if ex < N else -1
                pb = ((ex + 1) << 1) << (i * vb) if e and ex + 1 < N else -1
                if pa < 0 and pb < 0:
                    continue
                lst.append((j, cj, pa, pb))
            if not lst:
                dead = True
                break
            opts.append(lst)
            odd_before.append(par)
            par ^= e
        if dead:
            continue
        nopt = len(opts)
        # depth-first enumeration; state: (index, J, sCount, sign, coeff, bits)
        stack = [(0, 0, 0, 0, c % p, 0)]
        while stack:
            idx, J, ks, sgn_par, cc, bits = stack.pop()
            if idx == nopt:
                d = n - J
                if two:
                    for q in range(a + 1):
                        if q & (a - q):  # C(a, q) is even
                            continue
                        k = q + ks
                        if not (beta if slot else alpha)[k][d]:
                            continue
                        y = 2 * d + slot - k
                        if y < 0 or y > d:
                            continue
                        key2 = bits | ((a - q + d - y) << sh) | ((b + q + y) << (sh + COEFF_BITS))
                        v = out.get(key2, 0) ^ 1
                        if v:
                            out[key2] = v
                        else:
                            del out[key2]
                else:
                    if d != 0 or ks != slot:
                        continue
                    val = -cc if sgn_par else cc
                    v = (out.get(bits, 0) + val) % p
                    if v:
                        out[bits] = v
                    else:
                        out.pop(bits, None)
                continue
            for j, cj, pa, pb in opts[idx]:
                if J + j > n:
                    break
                if pa >= 0:
                    stack.append((idx + 1, J + j, ks, sgn_par, cc * cj % p, bits | pa))
                if pb >= 0 and (two or ks == 0):
                    # moving s past the odd factors already placed
                    stack.append((idx + 1, J + j, ks + 1, sgn_par ^ odd_before[idx], cc * cj % p, bits | pb))
    return out
