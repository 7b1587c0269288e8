"""Optimal ate pairing with a product-of-pairings fast path.

miller_product evaluates several pairs under one shared squaring chain,
so e(a1,b1) * ... * e(ak,bk) costs one Miller loop's squarings plus k
line accumulations, then a single final exponentiation.

The final exponentiation uses the cyclotomic identity
(x-1)^2 (x+p) (x^2+p^2-1) + 3 = 3 (p^4-p^2+1)/r, i.e. it computes the
standard pairing raised to the harmless constant 3 (coprime to r), which
keeps the exponentiation chain short.
"""

from __future__ import annotations

from gmpy2 import mpz

from .constants import P, R, X_ABS
from .fields import (
    F12_ONE,
    F2_ZERO,
    cyc_pow,
    cyc_sqr,
    f12_conj,
    f12_frob,
    f12_frob2,
    f12_inv,
    f12_mul,
    f12_mul_014,
    f12_sqr,
    f2_add,
    f2_inv,
    f2_mul,
    f2_smul,
    f2_sqr,
    f2_sub,
)

_X_BITS = bin(X_ABS)[3:]


def _dbl_step(t, neg_xp, yp):
    """Double the G2 accumulator; return the evaluated line at (xp, yp)."""
    xt, yt = t
    lam = f2_mul(f2_smul(f2_sqr(xt), 3), f2_inv(f2_smul(yt, 2)))
    x3 = f2_sub(f2_sqr(lam), f2_smul(xt, 2))
    y3 = f2_sub(f2_mul(lam, f2_sub(xt, x3)), yt)
    e0 = f2_sub(f2_mul(lam, xt), yt)
    e1 = f2_smul(lam, neg_xp)
    return (x3, y3), e0, e1


def _add_step(t, q, neg_xp):
    xt, yt = t
    xq, yq = q
    lam = f2_mul(f2_sub(yt, yq), f2_inv(f2_sub(xt, xq)))
    x3 = f2_sub(f2_sub(f2_sqr(lam), xt), xq)
    y3 = f2_sub(f2_mul(lam, f2_sub(xt, x3)), yt)
    e0 = f2_sub(f2_mul(lam, xq), yq)
    e1 = f2_smul(lam, neg_xp)
    return (x3, y3), e0, e1


def miller_product(pairs):
    """Product of Miller loop values over [(g1_affine, g2_affine), ...].

    Identity entries contribute the neutral line value and are filtered
    out by the caller-facing wrappers in vabe.groups.
    """
    sides = []
    for p, q in pairs:
        neg_xp = (-p[0]) % P
        yp = (p[1], mpz(0))
        sides.append([q, neg_xp, yp, q])  # accumulator, -xP, yP wrap, base
    f = F12_ONE
    first = True
    for bit in _X_BITS:
        if not first:
            f = f12_sqr(f)
        first = False
        for side in sides:
            t, e0, e1 = _dbl_step(side[0], side[1], side[2])
            side[0] = t
            f = f12_mul_014(f, e0, e1, side[2])
        if bit == "1":
            for side in sides:
                t, e0, e1 = _add_step(side[0], side[3], side[1])
                side[0] = t
                f = f12_mul_014(f, e0, e1, side[2])
    return f12_conj(f)  # the curve seed is negative


def _cyc_pow_absx(f):
    return cyc_pow(f, X_ABS)


def final_exp(f):
    # easy part: f^((p^6 - 1)(p^2 + 1))
    f = f12_mul(f12_conj(f), f12_inv(f))
    f = f12_mul(f12_frob2(f), f)
    # hard part: exponent (x-1)^2 (x+p) (x^2+p^2-1) + 3
    t0 = f12_mul(_cyc_pow_absx(f), f)          # f^(x-1) up to sign: x<0 so
    t0 = f12_conj(t0)                          # f^{-(|x|+1)} conj = f^{x-1}
    t1 = f12_mul(_cyc_pow_absx(t0), t0)
    t0 = f12_conj(t1)                          # f^{(x-1)^2}
    t1 = f12_mul(f12_conj(_cyc_pow_absx(t0)), f12_frob(t0))   # ^(x+p)
    t0 = t1
    t2 = _cyc_pow_absx(_cyc_pow_absx(t0))      # ^(x^2), signs cancel
    t0 = f12_mul(f12_mul(t2, f12_frob2(t0)), f12_conj(t0))    # ^(x^2+p^2-1)
    return f12_mul(t0, f12_mul(cyc_sqr(f), f))


def pairing_tuple(p_aff, q_aff):
    """e(P, Q) on affine inputs; identity on either side gives F12_ONE."""
    if p_aff is None or q_aff is None:
        return F12_ONE
    return f12_norm(final_exp(miller_product([(p_aff, q_aff)])))


def pairing_product_tuple(pairs):
    live = [(p, q) for p, q in pairs if p is not None and q is not None]
    if not live:
        return F12_ONE
    return f12_norm(final_exp(miller_product(live)))


def f12_norm(f):
    return tuple(tuple((c0 % P, c1 % P) for c0, c1 in c6) for c6 in f)


def gt_is_valid(f) -> bool:
    """Exact membership test for the order-r subgroup of Fp12*.

    Two conditions: f is in the cyclotomic subgroup (order divides
    p^4 - p^2 + 1) and f^(p - x) = 1 (order divides p + 1 - t = h1 * r).
    gcd((p^4-p^2+1)/r, h1) = 1 and r^2 does not divide p^4-p^2+1, so the
    intersection is exactly order | r.
    """
    if f[0] == (F2_ZERO, F2_ZERO, F2_ZERO) and f[1] == (F2_ZERO, F2_ZERO, F2_ZERO):
        return False
    p2 = f12_frob2(f)
    if f12_norm(f12_mul(f12_frob2(p2), f)) != f12_norm(p2):
        return False
    # f^p * f^{|x|} = f^{p - x} since x < 0
    lhs = f12_mul(f12_frob(f), cyc_pow(f, X_ABS))
    return f12_norm(lhs) == F12_ONE


def gt_exp(f, k):
    """f^k for f in the order-r subgroup; k may be any integer."""
    k %= R
    if k == 0:
        return F12_ONE
    return f12_norm(cyc_pow(f, k))


def gt_inv(f):
    # conjugation inverts cyclotomic elements
    return f12_conj(f)


class FixedBaseGT:
    """Comb table for repeated exponentiation of one GT base."""

    __slots__ = ("tables",)

    def __init__(self, base):
        tables = []
        row_base = base
        for _ in range(64):
            row = [row_base]
            for _ in range(14):
                row.append(f12_mul(row[-1], row_base))
            tables.append(row)
            for _ in range(4):
                row_base = cyc_sqr(row_base)
        self.tables = tables

    def exp(self, k):
        acc = None
        i = 0
        while k:
            d = k & 15
            if d:
                e = self.tables[i][d - 1]
                acc = e if acc is None else f12_mul(acc, e)
            k >>= 4
            i += 1
        return F12_ONE if acc is None else f12_norm(acc)


# ------------------------------------------------------- GT encoding -----

def gt_to_bytes(f) -> bytes:
    out = bytearray()
    for c6 in f:
        for c2 in c6:
            for c in c2:
                out += int(c).to_bytes(48, "big")
    return bytes(out)


def gt_from_bytes(data: bytes):
    """Inverse of gt_to_bytes; validates ranges but not subgroup membership."""
    if len(data) != 576:
        raise ValueError("GT encoding must be 576 bytes")
    vals = []
    for i in range(12):
        v = int.from_bytes(data[i * 48 : (i + 1) * 48], "big")
        if v >= P:
            raise ValueError("coefficient out of range")
        vals.append(mpz(v))
    return (
        ((vals[0], vals[1]), (vals[2], vals[3]), (vals[4], vals[5])),
        ((vals[6], vals[7]), (vals[8], vals[9]), (vals[10], vals[11])),
    )
