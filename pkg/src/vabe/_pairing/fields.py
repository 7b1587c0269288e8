"""Tower-field arithmetic for the pairing target field.

Layout: Fp2 = Fp[u]/(u^2+1), Fp6 = Fp2[v]/(v^3 - xi) with xi = 1+u,
Fp12 = Fp6[w]/(w^2 - v).  Elements are nested tuples of gmpy2 mpz values,
always kept reduced mod p.  Fp2 is a pair, Fp6 a triple of pairs, Fp12 a
pair of triples.  Everything here is a free function on tuples; the
object layer lives in vabe.groups.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpz

from .constants import P, FROB_GAMMA1, FROB_GAMMA2

_ZERO = mpz(0)
_ONE = mpz(1)

F2_ZERO = (_ZERO, _ZERO)
F2_ONE = (_ONE, _ZERO)
F6_ZERO = (F2_ZERO, F2_ZERO, F2_ZERO)
F6_ONE = (F2_ONE, F2_ZERO, F2_ZERO)
F12_ONE = (F6_ONE, F6_ZERO)
F12_ZERO = (F6_ZERO, F6_ZERO)


# ---------------------------------------------------------------- Fp ----

def fp_inv(a):
    return gmpy2.invert(a, P)


def fp_sqrt(a):
    """Square root in Fp (p = 3 mod 4), or None if a is not a square."""
    s = gmpy2.powmod(a, (P + 1) >> 2, P)
    return s if s * s % P == a % P else None


# --------------------------------------------------------------- Fp2 ----

def f2_add(a, b):
    return ((a[0] + b[0]) % P, (a[1] + b[1]) % P)


def f2_sub(a, b):
    return ((a[0] - b[0]) % P, (a[1] - b[1]) % P)


def f2_neg(a):
    return ((-a[0]) % P, (-a[1]) % P)


def f2_conj(a):
    return (a[0], (-a[1]) % P)


def f2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    m0 = a0 * b0
    m1 = a1 * b1
    return ((m0 - m1) % P, ((a0 + a1) * (b0 + b1) - m0 - m1) % P)


def f2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % P, (a0 * a1 << 1) % P)


def f2_mul_xi(a):
    # multiply by xi = 1 + u
    a0, a1 = a
    return ((a0 - a1) % P, (a0 + a1) % P)


def f2_smul(a, k):
    return (a[0] * k % P, a[1] * k % P)


def f2_inv(a):
    a0, a1 = a
    t = gmpy2.invert(a0 * a0 + a1 * a1, P)
    return (a0 * t % P, -a1 * t % P)


def f2_sqrt(a):
    """Square root in Fp2 via norm descent, or None if a is not a square.

    The candidate is verified by squaring, so edge cases cannot produce a
    wrong root silently.
    """
    a0, a1 = a
    if a1 == 0:
        s = fp_sqrt(a0)
        if s is not None:
            return (s, _ZERO)
        # a0 is a non-residue: sqrt(a0) = sqrt(-a0) * u since u^2 = -1
        s = fp_sqrt((-a0) % P)
        if s is None:
            return None
        return (_ZERO, s)
    lam = fp_sqrt((a0 * a0 + a1 * a1) % P)
    if lam is None:
        return None
    inv2 = (P + 1) >> 1
    delta = (a0 + lam) * inv2 % P
    x0 = fp_sqrt(delta)
    if x0 is None:
        x0 = fp_sqrt((a0 - lam) * inv2 % P)
        if x0 is None:
            return None
    x1 = a1 * gmpy2.invert(x0 << 1, P) % P
    cand = (x0, x1)
    return cand if f2_sqr(cand) == (a0 % P, a1 % P) else None


# --------------------------------------------------------------- Fp6 ----

def f6_add(a, b):
    return (f2_add(a[0], b[0]), f2_add(a[1], b[1]), f2_add(a[2], b[2]))


def f6_sub(a, b):
    return (f2_sub(a[0], b[0]), f2_sub(a[1], b[1]), f2_sub(a[2], b[2]))


def f6_neg(a):
    return (f2_neg(a[0]), f2_neg(a[1]), f2_neg(a[2]))


def f6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = f2_mul(a0, b0)
    t1 = f2_mul(a1, b1)
    t2 = f2_mul(a2, b2)
    c0 = f2_add(t0, f2_mul_xi(f2_sub(f2_mul(f2_add(a1, a2), f2_add(b1, b2)), f2_add(t1, t2))))
    c1 = f2_add(f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), f2_add(t0, t1)), f2_mul_xi(t2))
    c2 = f2_add(f2_sub(f2_mul(f2_add(a0, a2), f2_add(b0, b2)), f2_add(t0, t2)), t1)
    return (c0, c1, c2)


def f6_sqr(a):
    a0, a1, a2 = a
    t0 = f2_sqr(a0)
    t1 = f2_mul(a0, a1)
    t1 = f2_add(t1, t1)
    t2 = f2_sqr(f2_sub(f2_add(a0, a2), a1))
    t3 = f2_mul(a1, a2)
    t3 = f2_add(t3, t3)
    t4 = f2_sqr(a2)
    c0 = f2_add(t0, f2_mul_xi(t3))
    c1 = f2_add(t1, f2_mul_xi(t4))
    c2 = f2_sub(f2_add(f2_add(t1, t2), t3), f2_add(t0, t4))
    return (c0, c1, c2)


def f6_mul_v(a):
    # multiply by v (the cubic generator); shifts coefficients with an xi fold
    return (f2_mul_xi(a[2]), a[0], a[1])


def f6_inv(a):
    a0, a1, a2 = a
    c0 = f2_sub(f2_sqr(a0), f2_mul_xi(f2_mul(a1, a2)))
    c1 = f2_sub(f2_mul_xi(f2_sqr(a2)), f2_mul(a0, a1))
    c2 = f2_sub(f2_sqr(a1), f2_mul(a0, a2))
    t = f2_inv(f2_add(f2_mul(a0, c0), f2_mul_xi(f2_add(f2_mul(a2, c1), f2_mul(a1, c2)))))
    return (f2_mul(c0, t), f2_mul(c1, t), f2_mul(c2, t))


# -------------------------------------------------------------- Fp12 ----

def f12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = f6_mul(a0, b0)
    t1 = f6_mul(a1, b1)
    c1 = f6_sub(f6_mul(f6_add(a0, a1), f6_add(b0, b1)), f6_add(t0, t1))
    return (f6_add(t0, f6_mul_v(t1)), c1)


def f12_sqr(a):
    a0, a1 = a
    t0 = f6_mul(a0, a1)
    c0 = f6_sub(f6_mul(f6_add(a0, a1), f6_add(a0, f6_mul_v(a1))), f6_add(t0, f6_mul_v(t0)))
    return (c0, f6_add(t0, t0))


def f12_conj(a):
    return (a[0], f6_neg(a[1]))


def f12_inv(a):
    a0, a1 = a
    t = f6_inv(f6_sub(f6_mul(a0, a0), f6_mul_v(f6_mul(a1, a1))))
    return (f6_mul(a0, t), f6_neg(f6_mul(a1, t)))


def f12_mul_014(f, e0, e1, e4):
    """Multiply f by the sparse line value e0 + e1*v + e4*v*w."""
    f0, f1 = f
    a = f6_mul(f0, (e0, e1, F2_ZERO))
    b0, b1, b2 = f1
    b = (f2_mul_xi(f2_mul(b2, e4)), f2_mul(b0, e4), f2_mul(b1, e4))
    c = f6_mul(f6_add(f0, f1), (e0, f2_add(e1, e4), F2_ZERO))
    r1 = f6_sub(c, f6_add(a, b))
    return (f6_add(a, f6_mul_v(b)), r1)


def f12_pow(a, e):
    """Generic square-and-multiply; used by tests and non-cyclotomic paths."""
    if e < 0:
        a = f12_inv(a)
        e = -e
    result = F12_ONE
    while e:
        if e & 1:
            result = f12_mul(result, a)
        a = f12_sqr(a)
        e >>= 1
    return result


# --------------------------------------------------------- Frobenius ----

def f12_frob(f):
    """The p-power Frobenius endomorphism."""
    (c00, c01, c02), (c10, c11, c12) = f
    # flat w-basis coefficients in order w^0 .. w^5
    a0 = f2_conj(c00)
    a1 = f2_mul(f2_conj(c10), FROB_GAMMA1[1])
    a2 = f2_mul(f2_conj(c01), FROB_GAMMA1[2])
    a3 = f2_mul(f2_conj(c11), FROB_GAMMA1[3])
    a4 = f2_mul(f2_conj(c02), FROB_GAMMA1[4])
    a5 = f2_mul(f2_conj(c12), FROB_GAMMA1[5])
    return ((a0, a2, a4), (a1, a3, a5))


def f12_frob2(f):
    """The p^2-power Frobenius; coefficients are in Fp so no conjugation."""
    (c00, c01, c02), (c10, c11, c12) = f
    a0 = c00
    a1 = f2_smul(c10, FROB_GAMMA2[1])
    a2 = f2_smul(c01, FROB_GAMMA2[2])
    a3 = f2_smul(c11, FROB_GAMMA2[3])
    a4 = f2_smul(c02, FROB_GAMMA2[4])
    a5 = f2_smul(c12, FROB_GAMMA2[5])
    return ((a0, a2, a4), (a1, a3, a5))


# --------------------------------------------------------- cyclotomic ----

def _f4_sqr(a, b):
    t0 = f2_sqr(a)
    t1 = f2_sqr(b)
    c0 = f2_add(f2_mul_xi(t1), t0)
    c1 = f2_sub(f2_sub(f2_sqr(f2_add(a, b)), t0), t1)
    return c0, c1


def cyc_sqr(f):
    """Squaring restricted to the cyclotomic subgroup (where conj = inverse).

    Roughly three times cheaper than a generic Fp12 squaring; only valid
    for elements f with f^(p^4 - p^2 + 1) = 1, which covers every pairing
    output and everything decoded through the GT membership check.
    """
    (z0, z4, z3), (z2, z1, z5) = f
    t0, t1 = _f4_sqr(z0, z1)
    r0 = f2_add(f2_smul(f2_sub(t0, z0), 2), t0)
    r1 = f2_add(f2_smul(f2_add(t1, z1), 2), t1)
    t0, t1 = _f4_sqr(z2, z3)
    t2, t3 = _f4_sqr(z4, z5)
    r4 = f2_add(f2_smul(f2_sub(t0, z4), 2), t0)
    r5 = f2_add(f2_smul(f2_add(t1, z5), 2), t1)
    t0 = f2_mul_xi(t3)
    r2 = f2_add(f2_smul(f2_add(t0, z2), 2), t0)
    r3 = f2_add(f2_smul(f2_sub(t2, z3), 2), t2)
    return ((r0, r4, r3), (r2, r1, r5))


def cyc_pow(f, e):
    """f^e for cyclotomic f, e >= 0; sliding-window over cheap squarings."""
    if e == 0:
        return F12_ONE
    if e <= 3:
        result = f
        for _ in range(e - 1):
            result = f12_mul(result, f)
        return result
    # odd powers f^1, f^3, ..., f^15
    f2 = cyc_sqr(f)
    odd = [f]
    for _ in range(7):
        odd.append(f12_mul(odd[-1], f2))
    bits = bin(e)[2:]
    result = None
    i = 0
    n = len(bits)
    while i < n:
        if bits[i] == "0":
            result = cyc_sqr(result)
            i += 1
            continue
        # take the longest window ending in a 1, at most 4 bits
        j = min(i + 4, n)
        while bits[j - 1] == "0":
            j -= 1
        window = int(bits[i:j], 2)
        if result is None:
            result = odd[window >> 1]
        else:
            for _ in range(j - i):
                result = cyc_sqr(result)
            result = f12_mul(result, odd[window >> 1])
        i = j
    return result
