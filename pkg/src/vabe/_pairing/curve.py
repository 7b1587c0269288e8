"""Point arithmetic, subgroup checks, hashing, and point compression.

Affine points are coordinate pairs (None is the identity); scalar chains
run on Jacobian triples internally.  The membership checks are the exact
order test [r]P = 0, folded through r = x^4 - x^2 + 1 so they cost four
short scalar chains instead of one full-width one.
"""

from __future__ import annotations

import hashlib

import gmpy2
from gmpy2 import mpz

from .constants import (
    P,
    R,
    X_ABS,
    H_EFF,
    CURVE_B,
    TWIST_B,
    SVDW_Z,
    SVDW_C1,
    SVDW_C2,
    SVDW_C3,
    SVDW_C4,
)
from .fields import (
    F2_ZERO,
    f2_add,
    f2_sub,
    f2_neg,
    f2_mul,
    f2_sqr,
    f2_smul,
    f2_inv,
    f2_sqrt,
    fp_sqrt,
)

_X_BITS = bin(X_ABS)[3:]  # scalar chain for |x|, most significant bit consumed
_HALF_P = (P - 1) >> 1


# ============================================================== G1 =======

def g1_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    return (y * y - (x * x * x + CURVE_B)) % P == 0


def g1_neg(pt):
    if pt is None:
        return None
    return (pt[0], (-pt[1]) % P)


def g1_add_aff(p, q):
    """General affine addition; used off the hot path."""
    if p is None:
        return q
    if q is None:
        return p
    x1, y1 = p
    x2, y2 = q
    if x1 == x2:
        if (y1 + y2) % P == 0:
            return None
        lam = 3 * x1 * x1 % P * gmpy2.invert(y1 << 1, P) % P
    else:
        lam = (y2 - y1) * gmpy2.invert(x2 - x1, P) % P
    x3 = (lam * lam - x1 - x2) % P
    return (x3, (lam * (x1 - x3) - y1) % P)


_J_INF = (mpz(0), mpz(1), mpz(0))


def _j_dbl(pt):
    x, y, z = pt
    if z == 0:
        return pt
    a = x * x % P
    b = y * y % P
    c = b * b % P
    d = ((x + b) * (x + b) - a - c << 1) % P
    e = 3 * a % P
    x3 = (e * e - (d << 1)) % P
    y3 = (e * (d - x3) - (c << 3)) % P
    z3 = (y * z << 1) % P
    return (x3, y3, z3)


def _j_add(p, q):
    """Full Jacobian addition with doubling/identity handling."""
    x1, y1, z1 = p
    if z1 == 0:
        return q
    x2, y2, z2 = q
    if z2 == 0:
        return p
    z1z1 = z1 * z1 % P
    z2z2 = z2 * z2 % P
    u1 = x1 * z2z2 % P
    u2 = x2 * z1z1 % P
    s1 = y1 * z2 * z2z2 % P
    s2 = y2 * z1 * z1z1 % P
    if u1 == u2:
        if s1 != s2:
            return _J_INF
        return _j_dbl(p)
    h = (u2 - u1) % P
    i = (h * h << 2) % P
    j = h * i % P
    rr = (s2 - s1 << 1) % P
    v = u1 * i % P
    x3 = (rr * rr - j - (v << 1)) % P
    y3 = (rr * (v - x3) - (s1 * j << 1)) % P
    z3 = ((z1 + z2) * (z1 + z2) - z1z1 - z2z2) * h % P
    return (x3, y3, z3)


def _j_add_mixed(p, q_aff):
    """p Jacobian + q affine."""
    x1, y1, z1 = p
    if z1 == 0:
        x2, y2 = q_aff
        return (x2, y2, mpz(1))
    x2, y2 = q_aff
    z1z1 = z1 * z1 % P
    u2 = x2 * z1z1 % P
    s2 = y2 * z1 * z1z1 % P
    if u2 == x1:
        if s2 != y1:
            return _J_INF
        return _j_dbl(p)
    h = (u2 - x1) % P
    hh = h * h % P
    i = (hh << 2) % P
    j = h * i % P
    rr = (s2 - y1 << 1) % P
    v = x1 * i % P
    x3 = (rr * rr - j - (v << 1)) % P
    y3 = (rr * (v - x3) - (y1 * j << 1)) % P
    z3 = ((z1 + h) * (z1 + h) - z1z1 - hh) % P
    return (x3, y3, z3)


def _j_to_aff(pt):
    x, y, z = pt
    if z == 0:
        return None
    zi = gmpy2.invert(z, P)
    zi2 = zi * zi % P
    return (x * zi2 % P, y * zi2 * zi % P)


def g1_mul(p_aff, k):
    """[k]P for affine P, 4-bit sliding window; returns affine."""
    if p_aff is None or k == 0:
        return None
    if k < 0:
        return g1_mul(g1_neg(p_aff), -k)
    # odd multiples P, 3P, ..., 15P in Jacobian form
    base = (p_aff[0], p_aff[1], mpz(1))
    twice = _j_dbl(base)
    odd = [base]
    for _ in range(7):
        odd.append(_j_add(odd[-1], twice))
    bits = bin(k)[2:]
    acc = None
    i = 0
    n = len(bits)
    while i < n:
        if bits[i] == "0":
            acc = _j_dbl(acc)
            i += 1
            continue
        j = min(i + 4, n)
        while bits[j - 1] == "0":
            j -= 1
        w = int(bits[i:j], 2)
        if acc is None:
            acc = odd[w >> 1]
        else:
            for _ in range(j - i):
                acc = _j_dbl(acc)
            acc = _j_add(acc, odd[w >> 1])
        i = j
    return _j_to_aff(acc)


def _j_mul_absx(pt):
    """[|x|]Q for Jacobian Q; |x| has weight 3 so this is 63 dbl + 2 add."""
    acc = pt
    for bit in _X_BITS:
        acc = _j_dbl(acc)
        if bit == "1":
            acc = _j_add(acc, pt)
    return acc


def _j_eq(p, q):
    x1, y1, z1 = p
    x2, y2, z2 = q
    if z1 == 0 or z2 == 0:
        return z1 == z2
    z1z1 = z1 * z1 % P
    z2z2 = z2 * z2 % P
    if x1 * z2z2 % P != x2 * z1z1 % P:
        return False
    return y1 * z2 * z2z2 % P == y2 * z1 * z1z1 % P


def g1_in_subgroup(p_aff) -> bool:
    """Exact order check [r]P = 0 via r = x^4 - x^2 + 1.

    Folding: [x^4]P + P == [x^2]P; the sign of x cancels in the squares.
    """
    if p_aff is None:
        return True
    j = (p_aff[0], p_aff[1], mpz(1))
    x2 = _j_mul_absx(_j_mul_absx(j))
    x4 = _j_mul_absx(_j_mul_absx(x2))
    return _j_eq(_j_add_mixed(x4, p_aff), x2)


# ============================================================== G2 =======

def g2_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    rhs = f2_add(f2_mul(f2_sqr(x), x), TWIST_B)
    return f2_sqr(y) == rhs


def g2_neg(pt):
    if pt is None:
        return None
    return (pt[0], f2_neg(pt[1]))


def g2_add_aff(p, q):
    if p is None:
        return q
    if q is None:
        return p
    x1, y1 = p
    x2, y2 = q
    if x1 == x2:
        if f2_add(y1, y2) == F2_ZERO:
            return None
        lam = f2_mul(f2_smul(f2_sqr(x1), 3), f2_inv(f2_smul(y1, 2)))
    else:
        lam = f2_mul(f2_sub(y2, y1), f2_inv(f2_sub(x2, x1)))
    x3 = f2_sub(f2_sub(f2_sqr(lam), x1), x2)
    return (x3, f2_sub(f2_mul(lam, f2_sub(x1, x3)), y1))


_J2_INF = (F2_ZERO, (mpz(1), mpz(0)), F2_ZERO)


def _j2_is_inf(pt):
    return pt[2] == F2_ZERO


def _j2_dbl(pt):
    x, y, z = pt
    if z == F2_ZERO:
        return pt
    a = f2_sqr(x)
    b = f2_sqr(y)
    c = f2_sqr(b)
    d = f2_smul(f2_sub(f2_sqr(f2_add(x, b)), f2_add(a, c)), 2)
    e = f2_smul(a, 3)
    x3 = f2_sub(f2_sqr(e), f2_smul(d, 2))
    y3 = f2_sub(f2_mul(e, f2_sub(d, x3)), f2_smul(c, 8))
    z3 = f2_smul(f2_mul(y, z), 2)
    return (x3, y3, z3)


def _j2_add(p, q):
    if _j2_is_inf(p):
        return q
    if _j2_is_inf(q):
        return p
    x1, y1, z1 = p
    x2, y2, z2 = q
    z1z1 = f2_sqr(z1)
    z2z2 = f2_sqr(z2)
    u1 = f2_mul(x1, z2z2)
    u2 = f2_mul(x2, z1z1)
    s1 = f2_mul(f2_mul(y1, z2), z2z2)
    s2 = f2_mul(f2_mul(y2, z1), z1z1)
    if u1 == u2:
        if s1 != s2:
            return _J2_INF
        return _j2_dbl(p)
    h = f2_sub(u2, u1)
    i = f2_smul(f2_sqr(h), 4)
    j = f2_mul(h, i)
    rr = f2_smul(f2_sub(s2, s1), 2)
    v = f2_mul(u1, i)
    x3 = f2_sub(f2_sub(f2_sqr(rr), j), f2_smul(v, 2))
    y3 = f2_sub(f2_mul(rr, f2_sub(v, x3)), f2_smul(f2_mul(s1, j), 2))
    z3 = f2_mul(f2_sub(f2_sqr(f2_add(z1, z2)), f2_add(z1z1, z2z2)), h)
    return (x3, y3, z3)


def _j2_add_mixed(p, q_aff):
    if _j2_is_inf(p):
        return (q_aff[0], q_aff[1], (mpz(1), mpz(0)))
    x1, y1, z1 = p
    x2, y2 = q_aff
    z1z1 = f2_sqr(z1)
    u2 = f2_mul(x2, z1z1)
    s2 = f2_mul(f2_mul(y2, z1), z1z1)
    if u2 == x1:
        if s2 != y1:
            return _J2_INF
        return _j2_dbl(p)
    h = f2_sub(u2, x1)
    hh = f2_sqr(h)
    i = f2_smul(hh, 4)
    j = f2_mul(h, i)
    rr = f2_smul(f2_sub(s2, y1), 2)
    v = f2_mul(x1, i)
    x3 = f2_sub(f2_sub(f2_sqr(rr), j), f2_smul(v, 2))
    y3 = f2_sub(f2_mul(rr, f2_sub(v, x3)), f2_smul(f2_mul(y1, j), 2))
    z3 = f2_sub(f2_sqr(f2_add(z1, h)), f2_add(z1z1, hh))
    return (x3, y3, z3)


def _j2_to_aff(pt):
    x, y, z = pt
    if z == F2_ZERO:
        return None
    zi = f2_inv(z)
    zi2 = f2_sqr(zi)
    return (f2_mul(x, zi2), f2_mul(y, f2_mul(zi2, zi)))


def g2_mul(p_aff, k):
    """[k]Q for affine Q, 4-bit sliding window; returns affine."""
    if p_aff is None or k == 0:
        return None
    if k < 0:
        return g2_mul(g2_neg(p_aff), -k)
    base = (p_aff[0], p_aff[1], (mpz(1), mpz(0)))
    twice = _j2_dbl(base)
    odd = [base]
    for _ in range(7):
        odd.append(_j2_add(odd[-1], twice))
    bits = bin(k)[2:]
    acc = None
    i = 0
    n = len(bits)
    while i < n:
        if bits[i] == "0":
            acc = _j2_dbl(acc)
            i += 1
            continue
        j = min(i + 4, n)
        while bits[j - 1] == "0":
            j -= 1
        w = int(bits[i:j], 2)
        if acc is None:
            acc = odd[w >> 1]
        else:
            for _ in range(j - i):
                acc = _j2_dbl(acc)
            acc = _j2_add(acc, odd[w >> 1])
        i = j
    return _j2_to_aff(acc)


def _j2_mul_absx(pt):
    acc = pt
    for bit in _X_BITS:
        acc = _j2_dbl(acc)
        if bit == "1":
            acc = _j2_add(acc, pt)
    return acc


def _j2_eq(p, q):
    if _j2_is_inf(p) or _j2_is_inf(q):
        return _j2_is_inf(p) == _j2_is_inf(q)
    x1, y1, z1 = p
    x2, y2, z2 = q
    z1z1 = f2_sqr(z1)
    z2z2 = f2_sqr(z2)
    if f2_mul(x1, z2z2) != f2_mul(x2, z1z1):
        return False
    return f2_mul(f2_mul(y1, z2), z2z2) == f2_mul(f2_mul(y2, z1), z1z1)


def g2_in_subgroup(p_aff) -> bool:
    if p_aff is None:
        return True
    j = (p_aff[0], p_aff[1], (mpz(1), mpz(0)))
    x2 = _j2_mul_absx(_j2_mul_absx(j))
    x4 = _j2_mul_absx(_j2_mul_absx(x2))
    return _j2_eq(_j2_add_mixed(x4, p_aff), x2)


# ================================================= fixed-base tables =====

class FixedBaseG1:
    """Comb table for repeated exponentiation of one G1 base.

    Splits a scalar into 4-bit digits; each digit position has its own
    table of 15 precomputed affine multiples, so one exponentiation is at
    most 64 mixed additions and no doublings.
    """

    __slots__ = ("tables",)

    WINDOW = 4
    DIGITS = 64  # ceil(255 / 4)

    def __init__(self, base_aff):
        tables = []
        row_base = (base_aff[0], base_aff[1], mpz(1))
        for _ in range(self.DIGITS):
            row = [row_base]
            for _ in range(14):
                row.append(_j_add(row[-1], row_base))
            tables.append([_j_to_aff(e) for e in row])
            for _ in range(self.WINDOW):
                row_base = _j_dbl(row_base)
        self.tables = tables

    def mul(self, k):
        acc = _J_INF
        i = 0
        while k:
            d = k & 15
            if d:
                acc = _j_add_mixed(acc, self.tables[i][d - 1])
            k >>= 4
            i += 1
        return _j_to_aff(acc)


class FixedBaseG2:
    __slots__ = ("tables",)

    def __init__(self, base_aff):
        tables = []
        row_base = (base_aff[0], base_aff[1], (mpz(1), mpz(0)))
        for _ in range(64):
            row = [row_base]
            for _ in range(14):
                row.append(_j2_add(row[-1], row_base))
            tables.append([_j2_to_aff(e) for e in row])
            for _ in range(4):
                row_base = _j2_dbl(row_base)
        self.tables = tables

    def mul(self, k):
        acc = _J2_INF
        i = 0
        while k:
            d = k & 15
            if d:
                acc = _j2_add_mixed(acc, self.tables[i][d - 1])
            k >>= 4
            i += 1
        return _j2_to_aff(acc)


# ==================================================== hash to curve ======

def expand_message_xmd(msg: bytes, dst: bytes, length: int) -> bytes:
    """expand_message_xmd over SHA-256 (RFC 9380 construction)."""
    if len(dst) > 255:
        dst = hashlib.sha256(b"H2C-OVERSIZE-DST-" + dst).digest()
    ell = (length + 31) // 32
    if ell > 255:
        raise ValueError("requested output too long")
    dst_prime = dst + bytes([len(dst)])
    b0 = hashlib.sha256(
        b"\x00" * 64 + msg + length.to_bytes(2, "big") + b"\x00" + dst_prime
    ).digest()
    out = bytearray()
    prev = bytes(32)
    for i in range(1, ell + 1):
        prev = hashlib.sha256(
            bytes(a ^ b for a, b in zip(b0, prev)) + bytes([i]) + dst_prime
        ).digest()
        out += prev
    return bytes(out[:length])


def hash_to_field(msg: bytes, dst: bytes, count: int):
    uniform = expand_message_xmd(msg, dst, count * 64)
    return [mpz(int.from_bytes(uniform[i * 64 : (i + 1) * 64], "big") % P) for i in range(count)]


def _is_square(v) -> bool:
    return v == 0 or gmpy2.powmod(v, _HALF_P, P) == 1


def _g_of(x):
    return (x * x * x + CURVE_B) % P


def svdw_map(u):
    """Shallue-van de Woestijne map Fp -> E(Fp); total (defined for all u)."""
    tv1 = u * u % P * SVDW_C1 % P
    tv2 = (1 + tv1) % P
    tv1 = (1 - tv1) % P
    tv3 = tv1 * tv2 % P
    tv3 = gmpy2.invert(tv3, P) if tv3 else mpz(0)
    tv4 = u * tv1 % P * tv3 % P * SVDW_C3 % P
    x1 = (SVDW_C2 - tv4) % P
    x2 = (SVDW_C2 + tv4) % P
    x3 = (tv2 * tv2 % P * tv3 % P) ** 2 % P * SVDW_C4 % P
    x3 = (x3 + SVDW_Z) % P
    if _is_square(_g_of(x1)):
        x = x1
    elif _is_square(_g_of(x2)):
        x = x2
    else:
        x = x3
    y = fp_sqrt(_g_of(x))
    if (u & 1) != (y & 1):
        y = P - y
    return (x, y)


def hash_to_g1_point(msg: bytes, dst: bytes):
    """Full (uniform) hash to the G1 subgroup; never returns the identity."""
    counter = 0
    data = msg
    while True:
        u0, u1 = hash_to_field(data, dst, 2)
        q = g1_add_aff(svdw_map(u0), svdw_map(u1))
        q = g1_mul(q, H_EFF)
        if q is not None:
            return q
        counter += 1
        data = msg + b"\x00" + counter.to_bytes(4, "big")


# ====================================================== encodings ========

_COMPRESSED = 0x80
_INFINITY = 0x40
_SIGN = 0x20


def g1_compress(pt) -> bytes:
    if pt is None:
        out = bytearray(48)
        out[0] = _COMPRESSED | _INFINITY
        return bytes(out)
    x, y = pt
    out = bytearray(int(x).to_bytes(48, "big"))
    out[0] |= _COMPRESSED | (_SIGN if y > _HALF_P else 0)
    return bytes(out)


def g1_decompress(data: bytes):
    """Inverse of g1_compress.  Raises ValueError on any non-canonical input.

    The caller is responsible for the subgroup check (g1_in_subgroup);
    this function guarantees on-curve or identity.
    """
    if len(data) != 48:
        raise ValueError("G1 encoding must be 48 bytes")
    flags = data[0]
    if not flags & _COMPRESSED:
        raise ValueError("compression bit not set")
    if flags & _INFINITY:
        if flags != (_COMPRESSED | _INFINITY) or any(data[1:]):
            raise ValueError("non-canonical identity encoding")
        return None
    x = mpz(int.from_bytes(bytes([flags & 0x1F]) + data[1:], "big"))
    if x >= P:
        raise ValueError("x coordinate out of range")
    y = fp_sqrt(_g_of(x))
    if y is None:
        raise ValueError("x is not on the curve")
    if bool(flags & _SIGN) != (y > _HALF_P):
        y = P - y
    return (x, y)


def _f2_is_larger(a) -> bool:
    """Lexicographic comparison of a against -a, high coefficient first."""
    a0, a1 = a
    if a1 != 0:
        return a1 > P - a1
    return a0 > P - a0


def g2_compress(pt) -> bytes:
    if pt is None:
        out = bytearray(96)
        out[0] = _COMPRESSED | _INFINITY
        return bytes(out)
    (x0, x1), y = pt
    out = bytearray(int(x1).to_bytes(48, "big") + int(x0).to_bytes(48, "big"))
    out[0] |= _COMPRESSED | (_SIGN if _f2_is_larger(y) else 0)
    return bytes(out)


def g2_decompress(data: bytes):
    if len(data) != 96:
        raise ValueError("G2 encoding must be 96 bytes")
    flags = data[0]
    if not flags & _COMPRESSED:
        raise ValueError("compression bit not set")
    if flags & _INFINITY:
        if flags != (_COMPRESSED | _INFINITY) or any(data[1:]):
            raise ValueError("non-canonical identity encoding")
        return None
    x1 = int.from_bytes(bytes([flags & 0x1F]) + data[1:48], "big")
    x0 = int.from_bytes(data[48:], "big")
    if x0 >= P or x1 >= P:
        raise ValueError("x coordinate out of range")
    x = (mpz(x0), mpz(x1))
    rhs = f2_add(f2_mul(f2_sqr(x), x), TWIST_B)
    y = f2_sqrt(rhs)
    if y is None:
        raise ValueError("x is not on the twist curve")
    if bool(flags & _SIGN) != _f2_is_larger(y):
        y = f2_neg(y)
    return (x, y)
