"""Policy language: parsing, formatting, matrix compilation, share algebra.

The matrix fixtures below were worked out by hand from the gadget
definitions before being compared to compiler output; reconstruction is
cross-checked against a from-scratch span test in _oracles.
"""

import random

import pytest

from _oracles import (
    GROUP_ORDER,
    ast_eval,
    in_row_span,
    random_policy_node,
    render_policy,
)
from vabe.errors import (
    MalformedEncoding,
    NotSatisfied,
    PolicyError,
    PolicySyntaxError,
    PolicyTooLarge,
)
from vabe.groups import Scalar
from vabe.policy import (
    And,
    Leaf,
    LsssPolicy,
    Or,
    Threshold,
    format_policy,
    leaf_attrs,
    lsss_from_bytes,
    parse_policy,
    policy_to_lsss,
    recon_coeffs,
    satisfies,
    share_secret,
)

R = GROUP_ORDER


# -------------------------------------------------------------- parsing -----

def test_parse_basic_shapes():
    assert parse_policy("doctor") == Leaf("doctor")
    assert parse_policy("a and b") == And((Leaf("a"), Leaf("b")))
    assert parse_policy("a or b") == Or((Leaf("a"), Leaf("b")))
    assert parse_policy("2 of (a, b, c)") == Threshold(2, (Leaf("a"), Leaf("b"), Leaf("c")))


def test_parse_precedence_and_binds_tighter_than_or():
    assert parse_policy("a or b and c") == Or((Leaf("a"), And((Leaf("b"), Leaf("c")))))
    assert parse_policy("a and b or c") == Or((And((Leaf("a"), Leaf("b"))), Leaf("c")))
    assert parse_policy("(a or b) and c") == And((Or((Leaf("a"), Leaf("b"))), Leaf("c")))


def test_parse_chains_flatten():
    assert parse_policy("a and b and c") == And((Leaf("a"), Leaf("b"), Leaf("c")))
    assert parse_policy("a or b or c") == Or((Leaf("a"), Leaf("b"), Leaf("c")))


def test_parse_keywords_case_insensitive():
    assert parse_policy("a AND b") == parse_policy("a and b")
    assert parse_policy("a Or b") == parse_policy("a or b")
    assert parse_policy("1 OF (a, b)") == parse_policy("1 of (a, b)")


def test_parse_attribute_charset():
    for attr in ("role:doctor", "dept.x", "a-b", "x@y", "A_1"):
        assert parse_policy(attr) == Leaf(attr)


def test_digit_runs_are_attributes_unless_followed_by_of():
    assert parse_policy("2") == Leaf("2")
    assert parse_policy("a and 2") == And((Leaf("a"), Leaf("2")))
    assert parse_policy("2 of (a, 2)") == Threshold(2, (Leaf("a"), Leaf("2")))


@pytest.mark.parametrize("text", [
    "",
    "and",
    "a and",
    "a or or b",
    "(a and b",
    "a and b)",
    "2 of (a)",       # threshold needs at least two children
    "0 of (a, b)",    # k must be at least 1
    "3 of (a, b)",    # k cannot exceed n
    "2 of a, b",
    "a b",
    "a && b",
    "of (a, b)",
])
def test_parse_rejects_bad_syntax(text):
    with pytest.raises(PolicyError):
        parse_policy(text)


def test_parse_error_carries_byte_offset():
    try:
        parse_policy("a and $")
    except PolicySyntaxError as exc:
        assert exc.offset == 6
    else:
        pytest.fail("expected a syntax error")

    # offsets are into the UTF-8 encoding, so multibyte junk counts per byte
    try:
        parse_policy("a and é")
    except PolicySyntaxError as exc:
        assert exc.offset == 6
    else:
        pytest.fail("expected a syntax error")


def test_parse_rejects_non_string():
    with pytest.raises(PolicyError):
        parse_policy(42)


def test_node_constructors_validate():
    with pytest.raises(PolicyError):
        And((Leaf("a"),))
    with pytest.raises(PolicyError):
        Or((Leaf("a"),))
    with pytest.raises(PolicyError):
        Threshold(0, (Leaf("a"), Leaf("b")))
    with pytest.raises(PolicyError):
        Threshold(3, (Leaf("a"), Leaf("b")))
    with pytest.raises(PolicyError):
        Leaf("")
    with pytest.raises(PolicyError):
        Leaf("has space")
    with pytest.raises(PolicyError):
        Leaf("x" * 256)


def test_format_parse_round_trip_on_random_policies():
    rng = random.Random(201)
    for _ in range(150):
        node = random_policy_node(rng)
        assert parse_policy(format_policy(node)) == node


def test_parse_survives_randomized_rendering():
    rng = random.Random(202)
    for _ in range(150):
        node = random_policy_node(rng)
        assert parse_policy(render_policy(node, rng)) == node


def test_leaf_attrs_in_reading_order():
    node = parse_policy("(b and a) or 2 of (c, a, d)")
    assert leaf_attrs(node) == ["b", "a", "c", "a", "d"]


# ------------------------------------------------------ matrix compilation --

def test_matrix_single_leaf():
    lsss = policy_to_lsss(Leaf("a"))
    assert lsss.matrix == ((1,),)
    assert lsss.row_attrs == ("a",)


def test_matrix_or_copies_the_vector():
    lsss = policy_to_lsss(parse_policy("a or b"))
    assert lsss.matrix == ((1,), (1,))
    assert lsss.row_attrs == ("a", "b")


def test_matrix_and_gadget():
    lsss = policy_to_lsss(parse_policy("a and b"))
    assert lsss.matrix == ((1, 1), (0, R - 1))
    assert lsss.row_attrs == ("a", "b")


def test_matrix_threshold_vandermonde():
    lsss = policy_to_lsss(parse_policy("2 of (a, b, c)"))
    assert lsss.matrix == ((1, 1), (1, 2), (1, 3))
    assert lsss.row_attrs == ("a", "b", "c")


def test_matrix_nested_example():
    lsss = policy_to_lsss(parse_policy("(a and b) or 2 of (c, d, e)"))
    assert lsss.row_attrs == ("a", "b", "c", "d", "e")
    assert lsss.matrix == (
        (1, 1, 0),
        (0, R - 1, 0),
        (1, 0, 1),
        (1, 0, 2),
        (1, 0, 3),
    )


def test_matrix_ternary_and():
    lsss = policy_to_lsss(parse_policy("a and b and c"))
    # rows sum to the target and no pair spans it
    assert lsss.matrix == ((1, 1, 1), (0, 0, R - 1), (0, R - 1, 0))
    target = [1] + [0] * (lsss.n_cols - 1)
    assert in_row_span(lsss.matrix, target)
    for drop in range(3):
        rows = [r for i, r in enumerate(lsss.matrix) if i != drop]
        assert not in_row_span(rows, target)


def test_matrix_row_caps():
    wide = Or(tuple(Leaf(f"a{i}") for i in range(40)))
    with pytest.raises(PolicyTooLarge):
        policy_to_lsss(wide, max_rows=39)
    deep = And(tuple(Leaf(f"a{i}") for i in range(40)))
    with pytest.raises(PolicyTooLarge):
        policy_to_lsss(deep, max_cols=39)
    # and the defaults admit both
    assert policy_to_lsss(wide).n_rows == 40
    assert policy_to_lsss(deep).n_cols == 40


def test_matrix_entries_are_canonical_residues():
    rng = random.Random(203)
    for _ in range(30):
        lsss = policy_to_lsss(random_policy_node(rng))
        for row in lsss.matrix:
            assert all(0 <= v < R for v in row)


# -------------------------------------------------------- lsss wire format --

def test_lsss_bytes_round_trip():
    rng = random.Random(204)
    for _ in range(30):
        lsss = policy_to_lsss(random_policy_node(rng))
        back = lsss_from_bytes(lsss.to_bytes())
        assert back == lsss
        assert back.digest() == lsss.digest()


def test_lsss_bytes_rejects_malformed():
    lsss = policy_to_lsss(parse_policy("a and b"))
    raw = lsss.to_bytes()
    with pytest.raises(MalformedEncoding):
        lsss_from_bytes(raw[:-1])
    with pytest.raises(MalformedEncoding):
        lsss_from_bytes(raw + b"\x00")
    with pytest.raises(MalformedEncoding):
        lsss_from_bytes(b"")
    # entry not reduced mod the group order
    bad = bytearray(raw)
    entry_off = 4 + 1 + 1  # header, attr length, attr "a"
    bad[entry_off : entry_off + 32] = R.to_bytes(32, "big")
    with pytest.raises(MalformedEncoding):
        lsss_from_bytes(bytes(bad))
    # zero-length attribute label
    bad = bytearray(raw)
    bad[4] = 0
    with pytest.raises(MalformedEncoding):
        lsss_from_bytes(bytes(bad))


def test_lsss_bytes_rejects_oversize_dimensions():
    head = (600).to_bytes(2, "big") + (1).to_bytes(2, "big")
    with pytest.raises(MalformedEncoding):
        lsss_from_bytes(head)
    head = (1).to_bytes(2, "big") + (600).to_bytes(2, "big")
    with pytest.raises(MalformedEncoding):
        lsss_from_bytes(head)


def test_lsss_describe_shows_small_negatives():
    text = policy_to_lsss(parse_policy("a and b")).describe()
    assert "2 rows x 2 cols" in text
    assert "-1" in text


# ----------------------------------------------- sharing and reconstruction --

def test_shares_reconstruct_the_secret():
    rng = random.Random(205)
    for _ in range(60):
        node = random_policy_node(rng)
        lsss = policy_to_lsss(node)
        attrs = set(leaf_attrs(node))
        if not ast_eval(node, attrs):
            continue  # all leaves present always satisfies, but guard anyway
        s = Scalar(rng.randrange(R))
        shares = share_secret(lsss, s, rng)
        w = recon_coeffs(attrs, lsss)
        got = sum(int(c.value) * int(shares[i].value) for i, c in w.items()) % R
        assert got == s.value


def test_recon_coeffs_only_uses_held_rows():
    rng = random.Random(206)
    for _ in range(40):
        node = random_policy_node(rng)
        lsss = policy_to_lsss(node)
        attrs = set(leaf_attrs(node))
        w = recon_coeffs(attrs, lsss)
        held = set(lsss.rows_for(attrs))
        assert set(w) <= held
        assert all(not c.is_zero() for c in w.values())


def test_recon_coeffs_raises_when_not_satisfied():
    lsss = policy_to_lsss(parse_policy("a and b"))
    with pytest.raises(NotSatisfied):
        recon_coeffs({"a"}, lsss)
    with pytest.raises(NotSatisfied):
        recon_coeffs(set(), lsss)


def test_satisfies_matches_ast_and_span_oracles():
    rng = random.Random(207)
    target_checked = 0
    for _ in range(60):
        node = random_policy_node(rng, max_leaves=5)
        lsss = policy_to_lsss(node)
        pool = sorted(set(leaf_attrs(node)))
        for mask in range(1 << len(pool)):
            attrs = {pool[i] for i in range(len(pool)) if mask >> i & 1}
            expect = ast_eval(node, attrs)
            rows = [lsss.matrix[i] for i in lsss.rows_for(attrs)]
            target = [1] + [0] * (lsss.n_cols - 1)
            assert satisfies(attrs, lsss) == expect
            assert in_row_span(rows, target) == expect
            target_checked += 1
    assert target_checked > 200


def test_unknown_attributes_are_ignored():
    lsss = policy_to_lsss(parse_policy("a or b"))
    assert satisfies({"a", "zzz"}, lsss)
    assert not satisfies({"zzz"}, lsss)


def test_duplicate_leaf_rows_both_usable():
    # the same attribute may appear in several branches
    node = parse_policy("(a and b) or (a and c)")
    lsss = policy_to_lsss(node)
    assert lsss.row_attrs.count("a") == 2
    for attrs in ({"a", "b"}, {"a", "c"}):
        w = recon_coeffs(attrs, lsss)
        s = Scalar(12345)
        shares = share_secret(lsss, s, random.Random(208))
        got = sum(int(c.value) * int(shares[i].value) for i, c in w.items()) % R
        assert got == s.value


def test_share_count_matches_rows():
    rng = random.Random(209)
    lsss = policy_to_lsss(parse_policy("2 of (a, b, c, d)"))
    shares = share_secret(lsss, Scalar(7), rng)
    assert len(shares) == lsss.n_rows
    assert isinstance(shares[0], Scalar)
