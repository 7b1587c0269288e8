"""Prime-order bilinear group API with operation counting.

Wraps the pairing backend in immutable element types (Scalar, G1Element,
G2Element, GTElement) plus a GroupDescription handle. Group-level
operations that dominate runtime (exponentiations, pairings, hashing to
the curve or to scalars) increment ambient counters opened with
counted_scope; plain group multiplications, inversions, and
serialization are not counted.

Long-lived bases (the generators, public parameters, cached hash
points) are marked internally as hot; on their second exponentiation
they build a fixed-base comb table that makes every later one cheap.
Ephemeral elements never build tables, keeping their cost flat.
"""

from __future__ import annotations

import contextvars
import functools
import os
import random
from dataclasses import dataclass, field, fields

from .errors import MalformedEncoding, WrongCurve
from ._pairing import curve as _curve
from ._pairing import fields as _fields
from ._pairing import pairing as _pairing
from ._pairing.constants import G1_GEN, G2_GEN, R as _R

CURVE_NAME = "bls12-381"
CURVE_ID = 0x01

_TAG_G1 = 0x01
_TAG_G2 = 0x02
_TAG_GT = 0x03

# exponentiations of a hot base before its comb table is built
_COMB_THRESHOLD = 2

SYSTEM_RNG = random.SystemRandom()


# ------------------------------------------------------------- counting --

@dataclass
class OpCounter:
    """Tally of the group operations that dominate scheme cost."""

    pairings: int = 0
    exp_g1: int = 0
    exp_g2: int = 0
    exp_gt: int = 0
    hash_to_group: int = 0
    hash_to_scalar: int = 0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(**{k: v + getattr(other, k) for k, v in self.as_dict().items()})

    def copy(self) -> "OpCounter":
        return OpCounter(**self.as_dict())


_scopes: contextvars.ContextVar[tuple] = contextvars.ContextVar("vabe_counters", default=())


def counted_scope(body):
    """Run body() and return (result, OpCounter) of group ops it performed.

    Scopes nest: an inner scope's operations also count toward any
    enclosing scopes.
    """
    counter = OpCounter()
    token = _scopes.set(_scopes.get() + (counter,))
    try:
        result = body()
    finally:
        _scopes.reset(token)
    return result, counter


def _bump(kind: str, n: int = 1) -> None:
    for counter in _scopes.get():
        setattr(counter, kind, getattr(counter, kind) + n)


# -------------------------------------------------------------- scalars --

@dataclass(frozen=True, eq=True)
class Scalar:
    """Element of the scalar field Z_r (r = group order)."""

    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % _R)

    def __add__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value + other.value)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value - other.value)

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value * other.value)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.value)

    def inverse(self) -> "Scalar":
        if self.value == 0:
            raise ZeroDivisionError("scalar 0 has no inverse")
        return Scalar(pow(self.value, -1, _R))

    def is_zero(self) -> bool:
        return self.value == 0

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(32, "big")


def decode_scalar(data: bytes, path: str = "") -> Scalar:
    if len(data) != 32:
        raise MalformedEncoding("scalar must be 32 bytes", path=path)
    v = int.from_bytes(data, "big")
    if v >= _R:
        raise MalformedEncoding("scalar not reduced mod group order", path=path)
    return Scalar(v)


def random_scalar(rng=SYSTEM_RNG) -> Scalar:
    return Scalar(rng.randrange(_R))


def random_bytes(rng, n: int) -> bytes:
    if hasattr(rng, "randbytes"):
        return rng.randbytes(n)
    return bytes(rng.getrandbits(8) for _ in range(n))


# ------------------------------------------------------- element wrappers --

def _exp_int(k) -> int:
    if isinstance(k, Scalar):
        return k.value
    return int(k) % _R


class G1Element:
    __slots__ = ("point", "_comb", "_pow_uses", "_hot")

    def __init__(self, point):
        self.point = point  # affine (x, y) tuple or None for identity
        self._comb = None
        self._pow_uses = 0
        self._hot = False

    def _mark_hot(self) -> "G1Element":
        self._hot = True
        return self

    def __mul__(self, other: "G1Element") -> "G1Element":
        return G1Element(_curve.g1_add_aff(self.point, other.point))

    def __pow__(self, k) -> "G1Element":
        _bump("exp_g1")
        e = _exp_int(k)
        if self.point is None or e == 0:
            return G1Element(None)
        if self._comb is None and self._hot:
            self._pow_uses += 1
            if self._pow_uses >= _COMB_THRESHOLD:
                self._comb = _curve.FixedBaseG1(self.point)
        if self._comb is not None:
            return G1Element(self._comb.mul(e))
        return G1Element(_curve.g1_mul(self.point, e))

    def inverse(self) -> "G1Element":
        return G1Element(_curve.g1_neg(self.point))

    def is_identity(self) -> bool:
        return self.point is None

    def __eq__(self, other) -> bool:
        return isinstance(other, G1Element) and self.point == other.point

    def __hash__(self):
        return hash(("G1", None if self.point is None else (int(self.point[0]), int(self.point[1]))))

    def __repr__(self):
        return f"G1Element({self.to_bytes().hex()[:18]}..)"

    def to_bytes(self) -> bytes:
        return bytes((_TAG_G1, CURVE_ID)) + _curve.g1_compress(self.point)


class G2Element:
    __slots__ = ("point", "_comb", "_pow_uses", "_hot")

    def __init__(self, point):
        self.point = point
        self._comb = None
        self._pow_uses = 0
        self._hot = False

    def _mark_hot(self) -> "G2Element":
        self._hot = True
        return self

    def __mul__(self, other: "G2Element") -> "G2Element":
        return G2Element(_curve.g2_add_aff(self.point, other.point))

    def __pow__(self, k) -> "G2Element":
        _bump("exp_g2")
        e = _exp_int(k)
        if self.point is None or e == 0:
            return G2Element(None)
        if self._comb is None and self._hot:
            self._pow_uses += 1
            if self._pow_uses >= _COMB_THRESHOLD:
                self._comb = _curve.FixedBaseG2(self.point)
        if self._comb is not None:
            return G2Element(self._comb.mul(e))
        return G2Element(_curve.g2_mul(self.point, e))

    def inverse(self) -> "G2Element":
        return G2Element(_curve.g2_neg(self.point))

    def is_identity(self) -> bool:
        return self.point is None

    def __eq__(self, other) -> bool:
        return isinstance(other, G2Element) and self.point == other.point

    def __hash__(self):
        if self.point is None:
            return hash(("G2", None))
        (x0, x1), (y0, y1) = self.point
        return hash(("G2", (int(x0), int(x1), int(y0), int(y1))))

    def __repr__(self):
        return f"G2Element({self.to_bytes().hex()[:18]}..)"

    def to_bytes(self) -> bytes:
        return bytes((_TAG_G2, CURVE_ID)) + _curve.g2_compress(self.point)


class GTElement:
    """Element of the order-r multiplicative target group."""

    __slots__ = ("value", "_comb", "_pow_uses", "_hot")

    def __init__(self, value):
        self.value = value  # normalized Fp12 tuple
        self._comb = None
        self._pow_uses = 0
        self._hot = False

    def _mark_hot(self) -> "GTElement":
        self._hot = True
        return self

    def __mul__(self, other: "GTElement") -> "GTElement":
        return GTElement(_pairing.f12_norm(_fields.f12_mul(self.value, other.value)))

    def __truediv__(self, other: "GTElement") -> "GTElement":
        return self * other.inverse()

    def __pow__(self, k) -> "GTElement":
        _bump("exp_gt")
        e = _exp_int(k)
        if e == 0:
            return GTElement(_pairing.f12_norm(_fields.F12_ONE))
        if self._comb is None and self._hot:
            self._pow_uses += 1
            if self._pow_uses >= _COMB_THRESHOLD:
                self._comb = _pairing.FixedBaseGT(self.value)
        if self._comb is not None:
            return GTElement(self._comb.exp(e))
        return GTElement(_pairing.gt_exp(self.value, e))

    def inverse(self) -> "GTElement":
        return GTElement(_pairing.f12_norm(_pairing.gt_inv(self.value)))

    def is_identity(self) -> bool:
        return self.value == _pairing.f12_norm(_fields.F12_ONE)

    def __eq__(self, other) -> bool:
        return isinstance(other, GTElement) and self.value == other.value

    def __hash__(self):
        return hash(("GT", self.to_bytes()))

    def __repr__(self):
        return f"GTElement({self.to_bytes().hex()[:18]}..)"

    def to_bytes(self) -> bytes:
        return bytes((_TAG_GT, CURVE_ID)) + _pairing.gt_to_bytes(self.value)


G1_IDENTITY = G1Element(None)
G2_IDENTITY = G2Element(None)


def gt_identity() -> GTElement:
    return GTElement(_pairing.f12_norm(_fields.F12_ONE))


# ----------------------------------------------------------- group handle --

@dataclass
class GroupDescription:
    """Handle to one curve instantiation: generators, order, target group."""

    name: str
    order: int
    g1: G1Element
    g2: G2Element
    _gt: GTElement | None = field(default=None, repr=False)

    @property
    def gt(self) -> GTElement:
        """Generator e(g1, g2) of the target group (computed once, uncounted)."""
        if self._gt is None:
            val = _pairing.pairing_tuple(self.g1.point, self.g2.point)
            self._gt = GTElement(val)._mark_hot()
        return self._gt


@functools.lru_cache(maxsize=None)
def _group_instance(name: str) -> GroupDescription:
    if name != CURVE_NAME:
        raise WrongCurve(f"unsupported curve {name!r}; only {CURVE_NAME!r} is available")
    return GroupDescription(
        name=CURVE_NAME,
        order=int(_R),
        g1=G1Element(G1_GEN)._mark_hot(),
        g2=G2Element(G2_GEN)._mark_hot(),
    )


def default_group() -> GroupDescription:
    return _group_instance(os.environ.get("VABE_CURVE", CURVE_NAME))


# --------------------------------------------------------------- pairings --

def pairing(a: G1Element, b: G2Element) -> GTElement:
    _bump("pairings")
    return GTElement(_pairing.pairing_tuple(a.point, b.point))


def pairing_product(pairs) -> GTElement:
    """Compute the product of pairings over [(g1, g2), ...] in one pass.

    Counts one pairing per input pair, which matches its cost: the Miller
    loop squarings and the final exponentiation are shared, so each extra
    pair costs only its line evaluations.
    """
    pairs = list(pairs)
    _bump("pairings", len(pairs))
    tuples = [(a.point, b.point) for a, b in pairs]
    return GTElement(_pairing.pairing_product_tuple(tuples))


# ---------------------------------------------------------------- hashing --

_ATTR_DST = b"VABE-ATTR-v1"


@functools.lru_cache(maxsize=8192)
def _hash_point_cached(label: bytes) -> G1Element:
    return G1Element(_curve.hash_to_g1_point(label, _ATTR_DST))._mark_hot()


def hash_to_g1(label) -> G1Element:
    """Map an attribute label (str or bytes) to a G1 point.

    The returned element is cached per label, so its comb table persists
    across calls; every call is still counted as one group hash.
    """
    _bump("hash_to_group")
    if isinstance(label, str):
        label = label.encode("utf-8")
    return _hash_point_cached(bytes(label))


def hash_to_scalar_bytes(domain_tag: str, data: bytes) -> Scalar:
    """Hash raw bytes to a scalar under a domain separation tag."""
    _bump("hash_to_scalar")
    out = _curve.expand_message_xmd(data, domain_tag.encode("utf-8"), 48)
    return Scalar(int.from_bytes(out, "big"))


def hash_to_scalar(domain_tag: str, m: GTElement) -> Scalar:
    """Hash a target-group element to a scalar (tagged)."""
    return hash_to_scalar_bytes(domain_tag, _pairing.gt_to_bytes(m.value))


def random_gt(rng=SYSTEM_RNG, group: GroupDescription | None = None) -> GTElement:
    """Uniform element of the target group (one counted exponentiation)."""
    group = group or default_group()
    return group.gt ** Scalar(rng.randrange(1, _R))


# ----------------------------------------------------------- wire encoding --

def encode_element(el) -> bytes:
    return el.to_bytes()


def _check_header(data: bytes, tag: int, what: str, path: str) -> bytes:
    if len(data) < 2:
        raise MalformedEncoding(f"{what} encoding truncated", path=path)
    if data[0] != tag:
        raise MalformedEncoding(f"wrong group tag {data[0]:#04x} for {what}", path=path)
    if data[1] != CURVE_ID:
        raise WrongCurve(f"element encoded for curve id {data[1]:#04x}, expected {CURVE_ID:#04x}", path=path)
    return data[2:]


def decode_g1(data: bytes, path: str = "") -> G1Element:
    body = _check_header(data, _TAG_G1, "G1", path)
    if len(body) != 48:
        raise MalformedEncoding("G1 payload must be 48 bytes", path=path)
    try:
        pt = _curve.g1_decompress(body)
    except ValueError as exc:
        raise MalformedEncoding(f"bad G1 point: {exc}", path=path) from None
    if pt is not None and not _curve.g1_in_subgroup(pt):
        raise MalformedEncoding("G1 point not in prime-order subgroup", path=path)
    return G1Element(pt)


def decode_g2(data: bytes, path: str = "") -> G2Element:
    body = _check_header(data, _TAG_G2, "G2", path)
    if len(body) != 96:
        raise MalformedEncoding("G2 payload must be 96 bytes", path=path)
    try:
        pt = _curve.g2_decompress(body)
    except ValueError as exc:
        raise MalformedEncoding(f"bad G2 point: {exc}", path=path) from None
    if pt is not None and not _curve.g2_in_subgroup(pt):
        raise MalformedEncoding("G2 point not in prime-order subgroup", path=path)
    return G2Element(pt)


def decode_gt(data: bytes, path: str = "") -> GTElement:
    body = _check_header(data, _TAG_GT, "GT", path)
    if len(body) != 576:
        raise MalformedEncoding("GT payload must be 576 bytes", path=path)
    try:
        val = _pairing.gt_from_bytes(body)
    except ValueError as exc:
        raise MalformedEncoding(f"bad GT element: {exc}", path=path) from None
    if not _pairing.gt_is_valid(val):
        raise MalformedEncoding("GT element not in prime-order subgroup", path=path)
    return GTElement(_pairing.f12_norm(val))


G1_ENC_LEN = 50
G2_ENC_LEN = 98
GT_ENC_LEN = 578
SCALAR_ENC_LEN = 32
