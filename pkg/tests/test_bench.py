"""Benchmark harness: closed-form counts, report plumbing, csv output."""

import csv
import random

import pytest

from vabe import abe_core, vout
from vabe.bench import BenchConfig, bench_run, expected_counts, format_report
from vabe.groups import counted_scope, random_gt
from vabe.policy import parse_policy, policy_to_lsss


@pytest.mark.parametrize("n", [1, 3, 7])
def test_expected_counts_match_real_operations(authority, n):
    pp, msk = authority
    rng = random.Random(700 + n)
    attrs = [f"x{i}" for i in range(n)]
    lsss = policy_to_lsss(parse_policy(" and ".join(attrs)))

    sk, got = counted_scope(lambda: abe_core.keygen(pp, msk, attrs, rng))
    assert got == expected_counts("keygen", n)

    m = random_gt(rng)
    ct, got = counted_scope(lambda: vout.encrypt(pp, m, lsss, rng))
    assert got == expected_counts("encrypt", n)

    tk, rk = vout.gen_tk(pp, sk, rng)
    ctp, got = counted_scope(lambda: vout.transform(pp, ct, tk))
    assert got == expected_counts("transform", n)

    header = vout.extract_header(ct)
    _, got = counted_scope(lambda: vout.outdec(pp, header, ctp, rk))
    assert got == expected_counts("outdec", n)
    assert got.pairings == 0


def test_expected_counts_rejects_unknown_operation():
    with pytest.raises(ValueError):
        expected_counts("sign", 3)


def test_bench_run_small_grid(tmp_path):
    csv_path = tmp_path / "bench.csv"
    report = bench_run(BenchConfig(sizes=(1, 2), reps=2, seed=701,
                                   csv_path=str(csv_path)))
    assert report.counter_mismatches == []
    assert {(r.operation, r.n) for r in report.rows} == {
        (op, n) for op in ("keygen", "encrypt", "transform", "outdec")
        for n in (1, 2)
    }
    for r in report.rows:
        assert r.reps == 2
        assert 0 < r.min_s <= r.median_s
        assert r.counter == expected_counts(r.operation, r.n)
    # two sizes are not enough points for a fit
    assert report.fits == {}

    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(report.rows)
    assert rows[0]["operation"] == "keygen"
    assert int(rows[0]["exp_g2"]) == 2
    assert float(rows[0]["median_s"]) > 0


def test_rounds_multiply_sample_count():
    report = bench_run(BenchConfig(sizes=(1,), reps=2, rounds=3, seed=703,
                                   operations=("keygen",)))
    row = report.row("keygen", 1)
    assert row.reps == 6  # reps samples per round, pooled
    assert row.min_s <= row.median_s


def test_report_row_lookup_and_formatting():
    report = bench_run(BenchConfig(sizes=(1, 2, 3), reps=2, seed=702,
                                   operations=("keygen",)))
    assert report.row("keygen", 2).n == 2
    with pytest.raises(KeyError):
        report.row("encrypt", 2)
    assert "keygen" in report.fits
    slope, intercept, r2 = report.fits["keygen"]
    assert 0.0 <= r2 <= 1.0

    text = format_report(report)
    assert "keygen" in text
    assert "fit keygen" in text
    assert "R^2" in text
    assert "COUNTER MISMATCH" not in text
