"""Access policies: text grammar, AST, and linear secret sharing.

Policy text grammar (keywords are case-insensitive, "and" binds tighter
than "or"):

    expr   := term ("or" term)*
    term   := factor ("and" factor)*
    factor := ATTR | INT "of" "(" expr ("," expr)+ ")" | "(" expr ")"

Attributes match [A-Za-z0-9_:.@-]+ and may not be a keyword. A run of
digits is a threshold count only when followed by "of"; otherwise it is
an ordinary attribute.

Chains like "a and b and c" flatten into one n-ary node, while explicit
parentheses preserve structure, so parse(format_policy(ast)) == ast.

The share-generating matrix uses the standard monotone gadgets: an Or
node hands its vector to every child, an n-ary And folds left over a
binary gadget (left child extends the vector with +1 in a fresh column,
right child gets -1 there), and a k-of-n node extends with a degree k-1
Vandermonde tail evaluated at child index j. Row order is DFS leaf
order and reconstruction targets (1, 0, ..., 0).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .errors import NotSatisfied, PolicyError, PolicySyntaxError, PolicyTooLarge
from .groups import Scalar
from ._pairing.constants import R as _R

MAX_ROWS = 512
MAX_COLS = 512
MAX_ATTR_BYTES = 255

_KEYWORDS = frozenset({"and", "or", "of"})
_ATTR_RE = re.compile(r"[A-Za-z0-9_:.@-]+")


def _validate_attr(attr: str) -> None:
    if not attr or _ATTR_RE.fullmatch(attr) is None:
        raise PolicyError(f"invalid attribute name {attr!r}")
    if attr.lower() in _KEYWORDS:
        raise PolicyError(f"attribute name {attr!r} collides with a keyword")
    if len(attr.encode("utf-8")) > MAX_ATTR_BYTES:
        raise PolicyError("attribute name longer than 255 bytes")


# -------------------------------------------------------------------- AST --

@dataclass(frozen=True)
class Leaf:
    attr: str

    def __post_init__(self):
        _validate_attr(self.attr)


@dataclass(frozen=True)
class And:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise PolicyError("And requires at least two children")


@dataclass(frozen=True)
class Or:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise PolicyError("Or requires at least two children")


@dataclass(frozen=True)
class Threshold:
    k: int
    children: tuple

    def __post_init__(self):
        n = len(self.children)
        if n < 2:
            raise PolicyError("threshold requires at least two children")
        if not 1 <= self.k <= n:
            raise PolicyError(f"threshold count {self.k} out of range 1..{n}")


PolicyNode = Leaf | And | Or | Threshold


def leaf_attrs(node: PolicyNode) -> list[str]:
    """Attributes at the leaves, in DFS order (duplicates preserved)."""
    if isinstance(node, Leaf):
        return [node.attr]
    out = []
    for ch in node.children:
        out.extend(leaf_attrs(ch))
    return out


# ----------------------------------------------------------------- parser --

_TOKEN_RE = re.compile(r"\s*(?:(?P<word>[A-Za-z0-9_:.@-]+)|(?P<punct>[(),])|(?P<bad>\S))")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str):
    """Yield (kind, value, byte_offset); kind in word/lparen/rparen/comma/end."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # only trailing whitespace remains
            break
        if m.group("bad"):
            raise PolicySyntaxError(
                f"unexpected character {m.group('bad')!r}",
                offset=_byte_offset(text, m.start("bad")),
            )
        if m.group("word"):
            word = m.group("word")
            off = _byte_offset(text, m.start("word"))
            if len(word.encode("utf-8")) > MAX_ATTR_BYTES:
                raise PolicySyntaxError("attribute name longer than 255 bytes", offset=off)
            tokens.append(("word", word, off))
        else:
            punct = m.group("punct")
            kind = {"(": "lparen", ")": "rparen", ",": "comma"}[punct]
            tokens.append((kind, punct, _byte_offset(text, m.start("punct"))))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str):
        tok = self.next()
        if tok[0] != kind:
            raise PolicySyntaxError(f"expected {what}", offset=tok[2])
        return tok

    def at_keyword(self, kw: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "word" and value.lower() == kw

    def parse(self) -> PolicyNode:
        node = self.expr()
        kind, value, off = self.peek()
        if kind != "end":
            raise PolicySyntaxError(f"unexpected trailing input {value!r}", offset=off)
        return node

    def expr(self) -> PolicyNode:
        parts = [self.term()]
        while self.at_keyword("or"):
            self.next()
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def term(self) -> PolicyNode:
        parts = [self.factor()]
        while self.at_keyword("and"):
            self.next()
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def factor(self) -> PolicyNode:
        kind, value, off = self.next()
        if kind == "lparen":
            node = self.expr()
            self.expect("rparen", "')'")
            return node
        if kind != "word":
            raise PolicySyntaxError("expected attribute, threshold, or '('", offset=off)
        low = value.lower()
        if low in _KEYWORDS:
            raise PolicySyntaxError(f"keyword {value!r} cannot start a clause", offset=off)
        if value.isdigit() and self.at_keyword("of"):
            return self.threshold(int(value), off)
        return Leaf(value)

    def threshold(self, k: int, k_off: int) -> PolicyNode:
        self.next()  # "of"
        self.expect("lparen", "'(' after 'of'")
        children = [self.expr()]
        while self.peek()[0] == "comma":
            self.next()
            children.append(self.expr())
        self.expect("rparen", "')' closing threshold list")
        if len(children) < 2:
            raise PolicySyntaxError("threshold needs at least two alternatives", offset=k_off)
        if not 1 <= k <= len(children):
            raise PolicySyntaxError(
                f"threshold count {k} out of range 1..{len(children)}", offset=k_off
            )
        return Threshold(k, tuple(children))


def parse_policy(text: str) -> PolicyNode:
    """Parse policy text into an AST; errors carry a byte offset."""
    if not isinstance(text, str):
        raise PolicyError("policy must be a string")
    return _Parser(text).parse()


def format_policy(node: PolicyNode) -> str:
    """Render an AST back to text such that parsing returns the same AST."""
    if isinstance(node, Leaf):
        return node.attr
    if isinstance(node, Threshold):
        inner = ", ".join(format_policy(ch) for ch in node.children)
        return f"{node.k} of ({inner})"
    if isinstance(node, And):
        parts = []
        for ch in node.children:
            text = format_policy(ch)
            # parenthesize anything the "and" chain would otherwise swallow
            if isinstance(ch, (And, Or)):
                text = f"({text})"
            parts.append(text)
        return " and ".join(parts)
    if isinstance(node, Or):
        parts = []
        for ch in node.children:
            text = format_policy(ch)
            if isinstance(ch, Or):
                text = f"({text})"
            parts.append(text)
        return " or ".join(parts)
    raise PolicyError(f"unknown policy node {type(node).__name__}")


# ------------------------------------------------------------------- LSSS --

@dataclass(frozen=True)
class LsssPolicy:
    """Share-generating matrix with one attribute label per row.

    Row i of `matrix` produces the share for `row_attrs[i]`; entries are
    canonical residues mod the group order. The reconstruction target is
    the unit vector (1, 0, ..., 0).
    """

    matrix: tuple
    row_attrs: tuple
    n_cols: int

    @property
    def n_rows(self) -> int:
        return len(self.matrix)

    def rows_for(self, attrs) -> list[int]:
        have = set(attrs)
        return [i for i, a in enumerate(self.row_attrs) if a in have]

    def to_bytes(self) -> bytes:
        out = bytearray()
        out += self.n_rows.to_bytes(2, "big")
        out += self.n_cols.to_bytes(2, "big")
        for attr, row in zip(self.row_attrs, self.matrix):
            raw = attr.encode("utf-8")
            out.append(len(raw))
            out += raw
            for v in row:
                out += int(v).to_bytes(32, "big")
        return bytes(out)

    def digest(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()

    def describe(self) -> str:
        lines = [f"{self.n_rows} rows x {self.n_cols} cols"]
        width = max((len(a) for a in self.row_attrs), default=1)
        for i, (attr, row) in enumerate(zip(self.row_attrs, self.matrix)):
            vals = ", ".join(str(v - _R if v > _R - 65536 else v) for v in row)
            lines.append(f"  [{i:3d}] {attr:<{width}}  ({vals})")
        return "\n".join(lines)


def lsss_from_bytes(data: bytes, path: str = "") -> LsssPolicy:
    from .errors import MalformedEncoding

    def fail(msg):
        raise MalformedEncoding(msg, path=path)

    if len(data) < 4:
        fail("policy matrix truncated")
    n_rows = int.from_bytes(data[0:2], "big")
    n_cols = int.from_bytes(data[2:4], "big")
    if n_rows < 1 or n_rows > MAX_ROWS or n_cols < 1 or n_cols > MAX_COLS:
        fail("policy matrix dimensions out of range")
    pos = 4
    attrs = []
    matrix = []
    for _ in range(n_rows):
        if pos >= len(data):
            fail("policy matrix truncated")
        alen = data[pos]
        pos += 1
        if alen == 0 or pos + alen > len(data):
            fail("bad attribute label length")
        try:
            attr = data[pos : pos + alen].decode("utf-8")
            _validate_attr(attr)
        except (UnicodeDecodeError, PolicyError):
            fail("bad attribute label")
        pos += alen
        need = 32 * n_cols
        if pos + need > len(data):
            fail("policy matrix truncated")
        row = []
        for j in range(n_cols):
            v = int.from_bytes(data[pos + 32 * j : pos + 32 * (j + 1)], "big")
            if v >= _R:
                fail("matrix entry not reduced mod group order")
            row.append(v)
        pos += need
        attrs.append(attr)
        matrix.append(tuple(row))
    if pos != len(data):
        fail("trailing bytes after policy matrix")
    return LsssPolicy(matrix=tuple(matrix), row_attrs=tuple(attrs), n_cols=n_cols)


def policy_to_lsss(node: PolicyNode, max_rows: int = MAX_ROWS, max_cols: int = MAX_COLS) -> LsssPolicy:
    """Convert a policy AST into its share-generating matrix."""
    rows = []  # (attr, {col: value}) in DFS leaf order
    n_cols = 1  # column 0 carries the secret

    def alloc() -> int:
        nonlocal n_cols
        col = n_cols
        n_cols += 1
        if n_cols > max_cols:
            raise PolicyTooLarge(f"policy needs more than {max_cols} matrix columns")
        return col

    def walk(nd, vec: dict) -> None:
        if isinstance(nd, Leaf):
            if len(rows) >= max_rows:
                raise PolicyTooLarge(f"policy has more than {max_rows} attribute rows")
            rows.append((nd.attr, vec))
            return
        if isinstance(nd, Or):
            for ch in nd.children:
                walk(ch, vec)
            return
        if isinstance(nd, And):
            def fold(kids, v):
                if len(kids) == 1:
                    walk(kids[0], v)
                    return
                col = alloc()
                left = dict(v)
                left[col] = 1
                fold(kids[:-1], left)
                walk(kids[-1], {col: _R - 1})
            fold(list(nd.children), vec)
            return
        if isinstance(nd, Threshold):
            tail = [alloc() for _ in range(nd.k - 1)]
            for j, ch in enumerate(nd.children, start=1):
                child_vec = dict(vec)
                point = 1
                for col in tail:
                    point = point * j % _R
                    child_vec[col] = point
                walk(ch, child_vec)
            return
        raise PolicyError(f"unknown policy node {type(nd).__name__}")

    walk(node, {0: 1})
    matrix = tuple(
        tuple(vec.get(j, 0) % _R for j in range(n_cols)) for _, vec in rows
    )
    return LsssPolicy(matrix=matrix, row_attrs=tuple(a for a, _ in rows), n_cols=n_cols)


# ------------------------------------------------- sharing / reconstruction --

def share_secret(lsss: LsssPolicy, s: Scalar, rng) -> list[Scalar]:
    """Split s into one share per matrix row: share_i = row_i . (s, r2..rn)."""
    w = [s.value] + [rng.randrange(_R) for _ in range(lsss.n_cols - 1)]
    return [
        Scalar(sum(m * wj for m, wj in zip(row, w)) % _R)
        for row in lsss.matrix
    ]


def _solve_target(lsss: LsssPolicy, row_idx: list[int]):
    """Coefficients c with sum c_i * row_i = (1,0,..,0), or None.

    Gauss-Jordan over the transposed subsystem. Pivots are chosen
    left-to-right, which prefers earlier matrix rows; free variables are
    set to zero so the support stays small and deterministic.
    """
    if not row_idx:
        return None
    m = len(row_idx)
    n = lsss.n_cols
    # augmented system A c = e1 where column j of A is matrix[row_idx[j]]
    aug = [[lsss.matrix[r][eq] for r in row_idx] + [1 if eq == 0 else 0] for eq in range(n)]
    piv_col_of_eq = {}
    rank = 0
    for col in range(m):
        piv = None
        for eq in range(rank, n):
            if aug[eq][col] % _R:
                piv = eq
                break
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = pow(aug[rank][col], -1, _R)
        aug[rank] = [v * inv % _R for v in aug[rank]]
        for eq in range(n):
            if eq != rank and aug[eq][col] % _R:
                f = aug[eq][col]
                aug[eq] = [(v - f * w) % _R for v, w in zip(aug[eq], aug[rank])]
        piv_col_of_eq[rank] = col
        rank += 1
    for eq in range(rank, n):
        if aug[eq][m] % _R:
            return None  # inconsistent: target outside the span
    coeffs = [0] * m
    for eq, col in piv_col_of_eq.items():
        coeffs[col] = aug[eq][m]
    return coeffs


def satisfies(attrs, lsss: LsssPolicy) -> bool:
    """True when the attribute set can reconstruct the shared secret."""
    return _solve_target(lsss, lsss.rows_for(attrs)) is not None


def recon_coeffs(attrs, lsss: LsssPolicy) -> dict[int, Scalar]:
    """Reconstruction coefficients keyed by matrix row index.

    Only rows with nonzero coefficients appear. Raises NotSatisfied when
    the attributes do not span the target vector.
    """
    row_idx = lsss.rows_for(attrs)
    sol = _solve_target(lsss, row_idx)
    if sol is None:
        raise NotSatisfied("attributes do not satisfy the policy")
    return {row_idx[j]: Scalar(c) for j, c in enumerate(sol) if c % _R}
