# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled arithmetic kernels; behaviour matches ``_kernels_py``."""


cpdef long binom_mod(long x, long y, long p):
    cdef long result = 1
    cdef long xd, yd, i, num, den
    if y < 0 or x < 0 or y > x:
        return 0
    while y:
        xd = x % p
        yd = y % p
        if yd > xd:
            return 0
        # Lucas digit: C(xd, yd) mod p computed with modular inverses
        num = 1
        den = 1
        for i in range(yd):
            num = (num * (xd - i)) % p
            den = (den * (i + 1)) % p
        result = (result * num * _inverse(den, p)) % p
        x //= p
        y //= p
    return result


cdef inline long _inverse(long a, long p):
    cdef long r = 1, e = p - 2
    a %= p
    while e > 0:
        if e & 1:
            r = (r * a) % p
        a = (a * a) % p
        e >>= 1
    return r


cpdef long carries(long a, long b, long p):
    cdef long count = 0, carry = 0, s
    while a or b or carry:
        s = a % p + b % p + carry
        carry = 1 if s >= p else 0
        count += carry
        a //= p
        b //= p
    return count


def poly_mul_into(dict out, dict left, dict right, long p):
    cdef long a1, b1, a2, b2, c1, c2, v
    for k1, v1 in left.items():
        a1, b1 = k1
        c1 = v1
        for k2, v2 in right.items():
            a2, b2 = k2
            c2 = v2
            key = (a1 + a2, b1 + b2)
            v = (out.get(key, 0) + c1 * c2) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out




def ring_mono_mul(tuple x, tuple y, long p, long N):
    cdef Py_ssize_t n = len(x), i
    cdef long ex, ey, m, sign = 1, after = 0, seen = 0
    base = list(x)
    clashes = []
    for i in range(0, n, 2):
        ex = x[i]
        ey = y[i]
        m = <long>x[i + 1] + <long>y[i + 1]
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
                seen += 1
    if p != 2 and seen:
        for i in range(n - 2, -1, -2):
            if y[i] and after & 1:
                sign = -sign
            after += <long>x[i]
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


# ---------------------------------------------------------------------------
# operations on packed classes

from libc.stdlib cimport malloc, free
from libcpp.unordered_map cimport unordered_map
from cython.operator cimport dereference as deref, preincrement as inc

from msteen._kernels_py import COEFF_BITS as _COEFF_BITS_PY
from msteen._kernels_py import apply_op as _apply_op_py

ctypedef unsigned long long u64

cdef int COEFF_BITS = _COEFF_BITS_PY


cdef struct Opt:
    long j
    long c
    u64 pa
    u64 pb
    bint has_a
    bint has_b


cdef struct Walk:
    Opt* opts
    int* start
    int* count
    int* odd_before
    int nopt
    long n
    int slot
    long p
    long a
    long b
    int sh
    unsigned char* alpha
    unsigned char* beta
    int dcols
    unordered_map[u64, long]* out


cdef inline void _emit(Walk* w, u64 key, long c) nogil:
    cdef long v = (w.out[0][key] + c) % w.p
    if v < 0:
        v += w.p
    w.out[0][key] = v


cdef void _walk(Walk* w, int idx, long J, int ks, int sgn, long cc, u64 bits) nogil:
    cdef int t, k, q, y
    cdef long d
    cdef Opt* o
    if idx == w.nopt:
        d = w.n - J
        if w.p == 2:
            for q in range(w.a + 1):
                if q & (w.a - q):
                    continue
                k = q + ks
                if w.slot:
                    if not w.beta[k * w.dcols + d]:
                        continue
                elif not w.alpha[k * w.dcols + d]:
                    continue
                y = 2 * d + w.slot - k
                if y < 0 or y > d:
                    continue
                _emit(w, bits | ((<u64>(w.a - q + d - y)) << w.sh)
                      | ((<u64>(w.b + q + y)) << (w.sh + COEFF_BITS)), 1)
        elif d == 0 and ks == w.slot:
            _emit(w, bits, -cc if sgn else cc)
        return
    for t in range(w.count[idx]):
        o = &w.opts[w.start[idx] + t]
        if J + o.j > w.n:
            break
        if o.has_a:
            _walk(w, idx + 1, J + o.j, ks, sgn, (cc * o.c) % w.p, bits | o.pa)
        if o.has_b and (w.p == 2 or ks == 0):
            _walk(w, idx + 1, J + o.j, ks + 1, sgn ^ w.odd_before[idx], (cc * o.c) % w.p, bits | o.pb)


def apply_op(dict src, long n, long slot, long p, long nvars, long N):
    """Compiled twin of ``_kernels_py.apply_op`` for keys that fit in 64 bits."""
    cdef int vb = (<object>N).bit_length() + 1
    cdef int sh = nvars * vb
    if n < 0:
        return {}
    if sh + 2 * COEFF_BITS > 63:
        return _apply_op_py(src, n, slot, p, nvars, N)
    cdef u64 vmask = (1ULL << vb) - 1
    cdef u64 mono_mask = (1ULL << sh) - 1
    cdef u64 cmask = (1ULL << COEFF_BITS) - 1
    cdef long amax = 0, a, kmax, k, j, cj, ex, e, c
    cdef int i, d, nopt, dcols = n + 2, par
    cdef u64 key, mono, f
    cdef unordered_map[u64, long] out
    cdef Walk w
    cdef bint dead
    cdef Opt* o
    for pykey in src:
        key = pykey
        a = (key >> sh) & cmask
        if a > amax:
            amax = a
    kmax = amax + nvars
    w.alpha = NULL
    w.beta = NULL
    w.opts = <Opt*>malloc(nvars * (n + 1) * sizeof(Opt))
    w.start = <int*>malloc(nvars * sizeof(int))
    w.count = <int*>malloc(nvars * sizeof(int))
    w.odd_before = <int*>malloc(nvars * sizeof(int))
    try:
        if p == 2:
            w.alpha = <unsigned char*>malloc((kmax + 2) * dcols)
            w.beta = <unsigned char*>malloc((kmax + 2) * dcols)
            for i in range((kmax + 2) * dcols):
                w.alpha[i] = 0
                w.beta[i] = 0
            w.alpha[0] = 1
            for k in range(kmax + 1):
                for d in range(n + 1):
                    w.alpha[(k + 1) * dcols + d + 1] ^= w.beta[k * dcols + d]
                    w.beta[(k + 1) * dcols + d] ^= w.alpha[k * dcols + d]
                    w.beta[(k + 1) * dcols + d + 1] ^= w.beta[k * dcols + d]
        w.n = n
        w.slot = slot
        w.p = p
        w.sh = sh
        w.dcols = dcols
        w.out = &out
        for pykey, pyc in src.items():
            key = pykey
            c = pyc
            mono = key & mono_mask
            w.a = (key >> sh) & cmask
            w.b = key >> (sh + COEFF_BITS)
            nopt = 0
            par = 0
            dead = False
            for i in range(nvars):
                f = (mono >> (i * vb)) & vmask
                if not f:
                    continue
                e = f & 1
                k = f >> 1
                w.start[nopt] = nopt * (n + 1)
                w.count[nopt] = 0
                for j in range(min(k, n) + 1):
                    cj = binom_mod(k, j, p)
                    if not cj:
                        continue
                    ex = k + j * (p - 1)
                    o = &w.opts[w.start[nopt] + w.count[nopt]]
                    o.j = j
                    o.c = cj
                    o.has_a = ex < N
                    o.has_b = e and ex + 1 < N
                    o.pa = (((<u64>ex) << 1) | e) << (i * vb)
                    o.pb = ((<u64>(ex + 1)) << 1) << (i * vb)
                    if o.has_a or o.has_b:
                        w.count[nopt] += 1
                if not w.count[nopt]:
                    dead = True
                    break
                w.odd_before[nopt] = par
                par ^= e
                nopt += 1
            if dead:
                continue
            w.nopt = nopt
            _walk(&w, 0, 0, 0, 0, c % p, 0)
    finally:
        free(w.opts)
        free(w.start)
        free(w.count)
        free(w.odd_before)
        if w.alpha != NULL:
            free(w.alpha)
            free(w.beta)
    result = {}
    cdef unordered_map[u64, long].iterator it = out.begin()
    while it != out.end():
        if deref(it).second:
            result[deref(it).first] = deref(it).second
        inc(it)
    return result
