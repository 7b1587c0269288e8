"""End-to-end command line tests driving the installed entry point."""

import shutil
import subprocess
import sys

import pytest

from vabe.envelope import decode_public_params
from vabe.proxy import start_proxy

_VABE = [shutil.which("vabe")] if shutil.which("vabe") else [sys.executable, "-m", "vabe.cli"]

PAYLOAD = b"cli payload \x00\xff" + bytes(range(48))
POLICY = "dept:radiology and (role:doctor or role:admin)"


def run_cli(*args, stdin: bytes = None):
    return subprocess.run([*_VABE, *args], input=stdin, capture_output=True)


def ok(*args, stdin: bytes = None):
    proc = run_cli(*args, stdin=stdin)
    assert proc.returncode == 0, proc.stderr.decode()
    return proc


def fails(*args, code: int, prefix: str, stdin: bytes = None):
    proc = run_cli(*args, stdin=stdin)
    assert proc.returncode == code, (proc.stdout.decode(), proc.stderr.decode())
    first = proc.stderr.decode().splitlines()[0]
    # deliberately bare failures print the prefix alone, no colon
    assert first == prefix or first.startswith(prefix + ":"), proc.stderr.decode()
    return proc


@pytest.fixture(scope="module")
def flow(tmp_path_factory):
    """One full setup/keygen/enc/tkgen run shared by the tests below."""
    d = tmp_path_factory.mktemp("cliflow")
    f = {name: str(d / f"{name}.bin")
         for name in ("pk", "msk", "sk", "outsider", "env", "tk", "rk", "ctp")}
    f["payload"] = str(d / "payload.bin")
    f["dir"] = d
    with open(f["payload"], "wb") as fh:
        fh.write(PAYLOAD)

    ok("setup", "--out-pk", f["pk"], "--out-msk", f["msk"])
    ok("keygen", "--pk", f["pk"], "--msk", f["msk"],
       "--attrs", "dept:radiology, role:doctor", "--out", f["sk"])
    ok("keygen", "--pk", f["pk"], "--msk", f["msk"],
       "--attrs", "dept:billing", "--out", f["outsider"])
    ok("enc", "--pk", f["pk"], "--policy", POLICY,
       "--in", f["payload"], "--out", f["env"])
    ok("tkgen", "--pk", f["pk"], "--sk", f["sk"],
       "--out-tk", f["tk"], "--out-rk", f["rk"])
    ok("transform", "--pk", f["pk"], "--tk", f["tk"],
       "--in", f["env"], "--out", f["ctp"])
    return f


def test_version_banner():
    proc = ok("--version")
    assert b"vabe" in proc.stdout


def test_local_decrypt_round_trip(flow, tmp_path):
    out = str(tmp_path / "plain.bin")
    ok("dec", "--pk", flow["pk"], "--sk", flow["sk"], "--in", flow["env"], "--out", out)
    with open(out, "rb") as fh:
        assert fh.read() == PAYLOAD


def test_outsourced_decrypt_round_trip(flow):
    # --out - streams the payload to stdout with no log line mixed in
    proc = ok("outdec", "--pk", flow["pk"], "--rk", flow["rk"],
              "--env", flow["env"], "--in", flow["ctp"], "--out", "-")
    assert proc.stdout == PAYLOAD


def test_stdin_payload_and_stdout_plaintext(flow, tmp_path):
    env2 = str(tmp_path / "env2.bin")
    ok("enc", "--pk", flow["pk"], "--policy", "role:doctor or role:admin",
       "--in", "-", "--out", env2, stdin=b"from stdin")
    proc = ok("dec", "--pk", flow["pk"], "--sk", flow["sk"], "--in", env2, "--out", "-")
    assert proc.stdout == b"from stdin"


def test_refuses_overwrite_without_force(flow, tmp_path):
    out = str(tmp_path / "x.bin")
    ok("dec", "--pk", flow["pk"], "--sk", flow["sk"], "--in", flow["env"], "--out", out)
    fails("dec", "--pk", flow["pk"], "--sk", flow["sk"], "--in", flow["env"],
          "--out", out, code=2, prefix="E_IO")
    ok("dec", "--pk", flow["pk"], "--sk", flow["sk"], "--in", flow["env"],
       "--out", out, "--force")


def test_policy_syntax_error_reports_offset(flow, tmp_path):
    proc = fails("enc", "--pk", flow["pk"], "--policy", "a and or b",
                 "--in", flow["payload"], "--out", str(tmp_path / "y.bin"),
                 code=2, prefix="E_POLICY")
    assert "byte offset" in proc.stderr.decode()


def test_unsatisfied_key_is_a_domain_error(flow, tmp_path):
    fails("dec", "--pk", flow["pk"], "--sk", flow["outsider"], "--in", flow["env"],
          "--out", str(tmp_path / "z.bin"), code=1, prefix="E_NOT_SATISFIED")


def test_local_transform_requires_public_params(flow, tmp_path):
    fails("transform", "--tk", flow["tk"], "--in", flow["env"],
          "--out", str(tmp_path / "t.bin"), code=2, prefix="E_USAGE")


def test_wrong_retrieve_key_is_flagged(flow, tmp_path):
    tk2, rk2 = str(tmp_path / "tk2.bin"), str(tmp_path / "rk2.bin")
    ok("tkgen", "--pk", flow["pk"], "--sk", flow["sk"], "--out-tk", tk2, "--out-rk", rk2)
    fails("outdec", "--pk", flow["pk"], "--rk", rk2, "--env", flow["env"],
          "--in", flow["ctp"], "--out", "-", code=1, prefix="E_KEY_MISMATCH")


def test_swapped_partials_fail_verification(flow, tmp_path):
    with open(flow["ctp"], "rb") as fh:
        raw = bytearray(fh.read())
    # layout: 22-byte preamble, one 50-byte commitment echo, four 578-byte
    # target-group values; the last two are the partial decryptions
    a = 22 + 50 + 2 * 578
    b = a + 578
    raw[a:b], raw[b:b + 578] = raw[b:b + 578], raw[a:b]
    bad = str(tmp_path / "swapped.bin")
    with open(bad, "wb") as fh:
        fh.write(raw)
    fails("outdec", "--pk", flow["pk"], "--rk", flow["rk"], "--env", flow["env"],
          "--in", bad, "--out", "-", code=1, prefix="E_VERIFY_FAIL")


def test_truncated_input_is_malformed(flow, tmp_path):
    with open(flow["sk"], "rb") as fh:
        raw = fh.read()
    bad = str(tmp_path / "short.bin")
    with open(bad, "wb") as fh:
        fh.write(raw[:-9])
    fails("dec", "--pk", flow["pk"], "--sk", bad, "--in", flow["env"],
          "--out", "-", code=2, prefix="E_MALFORMED")


def test_missing_file_is_io_error(flow):
    fails("dec", "--pk", flow["pk"], "--sk", str(flow["dir"] / "absent.bin"),
          "--in", flow["env"], "--out", "-", code=2, prefix="E_IO")


def test_inspect_describes_every_artifact(flow):
    for path, needle in [
        (flow["pk"], "public parameters"),
        (flow["msk"], "master secret"),
        (flow["tk"], "transform key"),
        (flow["rk"], "retrieve key"),
        (flow["ctp"], "transformed ciphertext"),
    ]:
        proc = ok("inspect", "--in", path)
        assert needle in proc.stdout.decode()

    proc = ok("inspect", "--in", flow["env"])
    out = proc.stdout.decode()
    assert "envelope" in out and POLICY in out

    proc = ok("inspect", "--in", flow["sk"], "--pk", flow["pk"])
    out = proc.stdout.decode()
    assert "dept:radiology, role:doctor" in out
    assert "consistency with public params: ok" in out


def test_inspect_rejects_unknown_magic(flow, tmp_path):
    junk = str(tmp_path / "junk.bin")
    with open(junk, "wb") as fh:
        fh.write(b"PNG\x00 definitely not ours")
    fails("inspect", "--in", junk, code=2, prefix="E_MALFORMED")


def test_check_policy_prints_matrix():
    proc = ok("check-policy", "2 of (a, b, c)")
    out = proc.stdout.decode()
    for attr in ("a", "b", "c"):
        assert attr in out
    fails("check-policy", "a and", code=2, prefix="E_POLICY")


def test_transform_via_proxy_and_adversarial_mode(flow, tmp_path):
    # serve the flow's own public parameters from an in-process proxy
    with open(flow["pk"], "rb") as fh:
        pp = decode_public_params(fh.read())

    honest = start_proxy(pp, "honest")
    garbler = start_proxy(pp, "garble")
    try:
        addr = "127.0.0.1:{}".format(honest.server_address[1])
        out = str(tmp_path / "proxied.bin")
        ok("transform", "--tk", flow["tk"], "--in", flow["env"],
           "--out", out, "--proxy", addr)
        proc = ok("outdec", "--pk", flow["pk"], "--rk", flow["rk"],
                  "--env", flow["env"], "--in", out, "--out", "-")
        assert proc.stdout == PAYLOAD

        bad_addr = "127.0.0.1:{}".format(garbler.server_address[1])
        garbled = str(tmp_path / "garbled.bin")
        ok("transform", "--tk", flow["tk"], "--in", flow["env"],
           "--out", garbled, "--proxy", bad_addr)
        fails("outdec", "--pk", flow["pk"], "--rk", flow["rk"],
              "--env", flow["env"], "--in", garbled, "--out", "-",
              code=1, prefix="E_VERIFY_FAIL")
    finally:
        for srv in (honest, garbler):
            srv.shutdown()
            srv.server_close()


def test_proxy_refusal_maps_to_proxy_error(flow, tmp_path):
    with open(flow["pk"], "rb") as fh:
        pp = decode_public_params(fh.read())
    env2 = str(tmp_path / "narrow.bin")
    ok("enc", "--pk", flow["pk"], "--policy", "role:admin",
       "--in", flow["payload"], "--out", env2)
    server = start_proxy(pp, "honest")
    try:
        addr = "127.0.0.1:{}".format(server.server_address[1])
        fails("transform", "--tk", flow["tk"], "--in", env2,
              "--out", str(tmp_path / "never.bin"), "--proxy", addr,
              code=1, prefix="E_PROXY")
    finally:
        server.shutdown()
        server.server_close()
