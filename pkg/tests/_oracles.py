"""Independent reference implementations used to cross-check the library.

Everything in here is deliberately written from scratch against public
definitions (RFC 9380 expansion, plain Gaussian elimination, direct AST
evaluation) rather than by calling back into vabe internals, so a bug in
the library cannot hide behind the same bug in the tests.
"""

import hashlib
import random

# order of the prime-order subgroup (public BLS12-381 parameter)
GROUP_ORDER = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001


# ------------------------------------------------------------ hash expansion

def xmd_sha256(msg: bytes, dst: bytes, length: int) -> bytes:
    """expand_message_xmd with SHA-256, straight from the RFC construction."""
    if length > 255 * 32:
        raise ValueError("output too long")
    ell = (length + 31) // 32
    dst_prime = dst + bytes([len(dst)])
    z_pad = b"\x00" * 64
    l_i_b_str = length.to_bytes(2, "big")
    b0 = hashlib.sha256(z_pad + msg + l_i_b_str + b"\x00" + dst_prime).digest()
    b1 = hashlib.sha256(b0 + b"\x01" + dst_prime).digest()
    blocks = [b1]
    for i in range(2, ell + 1):
        prev = blocks[-1]
        mixed = bytes(x ^ y for x, y in zip(b0, prev))
        blocks.append(hashlib.sha256(mixed + bytes([i]) + dst_prime).digest())
    return b"".join(blocks)[:length]


def scalar_hash(domain_tag: str, data: bytes) -> int:
    """48-byte expansion reduced mod the group order."""
    raw = xmd_sha256(data, domain_tag.encode("ascii"), 48)
    return int.from_bytes(raw, "big") % GROUP_ORDER


# ------------------------------------------------------------- linear algebra

def rank_mod(rows, mod: int = GROUP_ORDER) -> int:
    """Row rank of an integer matrix over GF(mod), by plain elimination."""
    work = [list(r) for r in rows]
    rank = 0
    n_cols = len(work[0]) if work else 0
    for col in range(n_cols):
        pivot = None
        for i in range(rank, len(work)):
            if work[i][col] % mod != 0:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = pow(work[rank][col], -1, mod)
        work[rank] = [v * inv % mod for v in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col] % mod != 0:
                f = work[i][col]
                work[i] = [(v - f * p) % mod for v, p in zip(work[i], work[rank])]
        rank += 1
    return rank


def in_row_span(rows, target, mod: int = GROUP_ORDER) -> bool:
    """True iff target is a linear combination of rows over GF(mod)."""
    rows = [list(r) for r in rows]
    if not rows:
        return all(v % mod == 0 for v in target)
    return rank_mod(rows, mod) == rank_mod(rows + [list(target)], mod)


# -------------------------------------------------------------- policy oracle

def ast_eval(node, attrs) -> bool:
    """Evaluate a policy AST directly against an attribute set."""
    kind = type(node).__name__
    if kind == "Leaf":
        return node.attr in attrs
    if kind == "And":
        return all(ast_eval(ch, attrs) for ch in node.children)
    if kind == "Or":
        return any(ast_eval(ch, attrs) for ch in node.children)
    if kind == "Threshold":
        return sum(1 for ch in node.children if ast_eval(ch, attrs)) >= node.k
    raise TypeError(f"unknown node {kind}")


ATTR_POOL = (
    "role:doctor", "role:nurse", "role:admin",
    "dept:icu", "dept:radiology", "clearance.high",
    "site_3", "org@example", "a-b",
)


def random_policy_node(rng: random.Random, max_leaves: int = 6, pool=ATTR_POOL):
    """Random policy AST with at most max_leaves leaves."""
    from vabe.policy import Leaf, And, Or, Threshold

    def build(budget: int):
        if budget == 1 or rng.random() < 0.25:
            return Leaf(rng.choice(pool)), 1
        arity = rng.randint(2, min(budget, 4))
        kids = []
        used = 0
        for i in range(arity):
            remaining = budget - used - (arity - 1 - i)
            sub = rng.randint(1, max(1, remaining))
            node, n = build(sub)
            kids.append(node)
            used += n
        kind = rng.choice(("and", "or", "thresh"))
        if kind == "and":
            return And(tuple(kids)), used
        if kind == "or":
            return Or(tuple(kids)), used
        return Threshold(rng.randint(1, len(kids)), tuple(kids)), used

    node, _ = build(max_leaves)
    return node


def render_policy(node, rng: random.Random) -> str:
    """Format an AST as text with randomized spacing, case and extra parens.

    Non-leaf children are always parenthesized, so this exercises the
    tokenizer and nesting rather than precedence (precedence has its own
    directed tests).
    """
    from vabe.policy import Leaf, And, Or, Threshold

    def sp() -> str:
        return " " * rng.randint(1, 3)

    def kw(word: str) -> str:
        return rng.choice((word, word.upper(), word.capitalize()))

    def wrap(text: str) -> str:
        if rng.random() < 0.3:
            return f"({sp()}{text}{sp()})"
        return text

    def go(nd) -> str:
        if isinstance(nd, Leaf):
            return wrap(nd.attr)
        if isinstance(nd, Threshold):
            inner = ("," + sp()).join(go(ch) for ch in nd.children)
            return wrap(f"{nd.k}{sp()}{kw('of')}{sp()}({inner})")
        word = kw("and") if isinstance(nd, And) else kw("or")
        parts = []
        for ch in nd.children:
            text = go(ch)
            if not isinstance(ch, Leaf):
                text = f"({text})"
            parts.append(text)
        return wrap((sp() + word + sp()).join(parts))

    return go(node)


# --------------------------------------------------- second-pass byte walker

class Walk:
    """Cursor over a serialized artifact; asserts instead of raising."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        assert self.pos + n <= len(self.data), "walker ran past end of data"
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16le(self) -> int:
        return int.from_bytes(self.take(2), "little")

    def u32le(self) -> int:
        return int.from_bytes(self.take(4), "little")

    def u16be(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def element(self, tag: int, body_len: int) -> bytes:
        raw = self.take(2 + body_len)
        assert raw[0] == tag, f"element tag {raw[0]:#04x}, wanted {tag:#04x}"
        assert raw[1] == 0x01, "curve id byte"
        return raw[2:]

    def g1(self) -> bytes:
        return self.element(0x01, 48)

    def g2(self) -> bytes:
        return self.element(0x02, 96)

    def gt(self) -> bytes:
        return self.element(0x03, 576)

    def done(self) -> None:
        assert self.pos == len(self.data), (
            f"{len(self.data) - self.pos} bytes left after walk")
