"""Command-line front end.

Exit codes: 0 success, 1 for domain outcomes (policy not satisfied,
verification failure, payload authentication failure, key mismatch,
proxy refusal), 2 for usage, file format, and I/O problems. Errors go to
stderr with a stable E_* prefix so scripts can branch on them.
"""

from __future__ import annotations

import functools
import sys

import click

from . import bench as bench_mod
from . import envelope as ev
from . import proxy as proxy_mod
from . import vout
from .abe_core import check_private_key, keygen as do_keygen, setup as do_setup
from .errors import (
    MalformedEncoding,
    NotSatisfied,
    PayloadAuthFailed,
    PolicyError,
    PolicySyntaxError,
    ProxyError,
    RetrieveKeyMismatch,
    VabeError,
    VerificationFailed,
)
from .groups import SYSTEM_RNG
from .policy import parse_policy, policy_to_lsss

_DOMAIN_ERRORS = (
    (NotSatisfied, "E_NOT_SATISFIED"),
    (VerificationFailed, "E_VERIFY_FAIL"),
    (PayloadAuthFailed, "E_PAYLOAD_AUTH"),
    (RetrieveKeyMismatch, "E_KEY_MISMATCH"),
    (ProxyError, "E_PROXY"),
)


def _fail(prefix: str, message: str, code: int):
    click.echo(f"{prefix}: {message}" if message else prefix, err=True)
    sys.exit(code)


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PolicySyntaxError as exc:
            _fail("E_POLICY", f"{exc} (byte offset {exc.offset})", 2)
        except PolicyError as exc:
            _fail("E_POLICY", str(exc), 2)
        except MalformedEncoding as exc:
            where = f" in {exc.path}" if exc.path else ""
            _fail("E_MALFORMED", f"{exc}{where}", 2)
        except tuple(e for e, _ in _DOMAIN_ERRORS) as exc:
            for etype, prefix in _DOMAIN_ERRORS:
                if isinstance(exc, etype):
                    _fail(prefix, str(exc), 1)
        except VabeError as exc:
            _fail("E_ERROR", str(exc), 1)
        except OSError as exc:
            _fail("E_IO", str(exc), 2)

    return wrapper


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str, data: bytes, force: bool) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    if not force:
        try:
            with open(path, "xb") as fh:
                fh.write(data)
            return
        except FileExistsError:
            _fail("E_IO", f"{path} exists (use --force to overwrite)", 2)
    with open(path, "wb") as fh:
        fh.write(data)


def _parse_attrs(raw: str) -> list:
    attrs = [a.strip() for a in raw.split(",") if a.strip()]
    if not attrs:
        _fail("E_POLICY", "no attributes given", 2)
    return attrs


force_option = click.option("--force", is_flag=True, help="Overwrite existing output files.")


@click.group()
@click.version_option(package_name="vabe", prog_name="vabe")
def main():
    """Attribute-based encryption with verifiable outsourced decryption."""


@main.command()
@click.option("--out-pk", required=True, metavar="FILE", help="Where to write public parameters.")
@click.option("--out-msk", required=True, metavar="FILE", help="Where to write the master secret.")
@force_option
@handles_errors
def setup(out_pk, out_msk, force):
    """Create public parameters and a master secret."""
    pp, msk = do_setup(SYSTEM_RNG)
    _write(out_pk, ev.encode_public_params(pp), force)
    _write(out_msk, ev.encode_master_secret(msk), force)
    click.echo(f"wrote {out_pk} and {out_msk}")


@main.command()
@click.option("--pk", required=True, metavar="FILE")
@click.option("--msk", required=True, metavar="FILE")
@click.option("--attrs", required=True, metavar="A,B,C", help="Comma-separated attribute list.")
@click.option("--out", required=True, metavar="FILE")
@force_option
@handles_errors
def keygen(pk, msk, attrs, out, force):
    """Issue a private key for an attribute set."""
    pp = ev.decode_public_params(_read(pk))
    master = ev.decode_master_secret(_read(msk))
    sk = do_keygen(pp, master, _parse_attrs(attrs), SYSTEM_RNG)
    _write(out, ev.encode_private_key(sk), force)
    click.echo(f"wrote {out} ({len(sk.attrs)} attributes)")


@main.command()
@click.option("--pk", required=True, metavar="FILE")
@click.option("--policy", required=True, metavar="TEXT", help="Access policy, e.g. 'a and (b or c)'.")
@click.option("--in", "in_path", required=True, metavar="FILE", help="Payload file ('-' for stdin).")
@click.option("--out", required=True, metavar="FILE")
@force_option
@handles_errors
def enc(pk, policy, in_path, out, force):
    """Seal a payload under an access policy."""
    pp = ev.decode_public_params(_read(pk))
    env = ev.seal(pp, policy, _read(in_path), SYSTEM_RNG)
    _write(out, ev.encode_envelope(env), force)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--pk", required=True, metavar="FILE")
@click.option("--sk", required=True, metavar="FILE")
@click.option("--in", "in_path", required=True, metavar="FILE", help="Envelope file.")
@click.option("--out", required=True, metavar="FILE", help="Payload output ('-' for stdout).")
@force_option
@handles_errors
def dec(pk, sk, in_path, out, force):
    """Open an envelope locally with a private key."""
    pp = ev.decode_public_params(_read(pk))
    key = ev.decode_private_key(_read(sk))
    env = ev.decode_envelope(_read(in_path))
    _write(out, ev.open_local(pp, key, env), force)
    if out != "-":
        click.echo(f"wrote {out}")


@main.command()
@click.option("--pk", required=True, metavar="FILE")
@click.option("--sk", required=True, metavar="FILE")
@click.option("--out-tk", required=True, metavar="FILE")
@click.option("--out-rk", required=True, metavar="FILE")
@force_option
@handles_errors
def tkgen(pk, sk, out_tk, out_rk, force):
    """Blind a private key into a transform key plus retrieve key."""
    pp = ev.decode_public_params(_read(pk))
    key = ev.decode_private_key(_read(sk))
    tk, rk = vout.gen_tk(pp, key, SYSTEM_RNG)
    _write(out_tk, ev.encode_transform_key(tk), force)
    _write(out_rk, ev.encode_retrieve_key(rk), force)
    click.echo(f"wrote {out_tk} and {out_rk} (key id {tk.key_id.hex()})")


@main.command()
@click.option("--pk", metavar="FILE", help="Needed for local transforms.")
@click.option("--tk", required=True, metavar="FILE")
@click.option("--in", "in_path", required=True, metavar="FILE", help="Envelope file.")
@click.option("--out", required=True, metavar="FILE", help="Transformed ciphertext output.")
@click.option("--proxy", "proxy_addr", metavar="HOST:PORT",
              help="Delegate to a proxy instead of transforming locally.")
@force_option
@handles_errors
def transform(pk, tk, in_path, out, proxy_addr, force):
    """Run the pairing-heavy decryption step, locally or via a proxy."""
    tk_bytes = _read(tk)
    key = ev.decode_transform_key(tk_bytes)
    env = ev.decode_envelope(_read(in_path))
    if proxy_addr:
        with proxy_mod.ProxyClient(proxy_addr) as client:
            client.register_tk(tk_bytes)
            ctp = client.transform(env.ct, key.key_id)
    else:
        if not pk:
            _fail("E_USAGE", "--pk is required for a local transform", 2)
        pp = ev.decode_public_params(_read(pk))
        ctp = vout.transform(pp, env.ct, key)
    _write(out, ev.encode_transformed(ctp), force)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--pk", required=True, metavar="FILE")
@click.option("--rk", required=True, metavar="FILE")
@click.option("--env", "env_path", required=True, metavar="FILE", help="Original envelope file.")
@click.option("--in", "in_path", required=True, metavar="FILE", help="Transformed ciphertext.")
@click.option("--out", required=True, metavar="FILE", help="Payload output ('-' for stdout).")
@force_option
@handles_errors
def outdec(pk, rk, env_path, in_path, out, force):
    """Finish an outsourced decryption and verify the proxy's work."""
    pp = ev.decode_public_params(_read(pk))
    retrieve = ev.decode_retrieve_key(_read(rk))
    env = ev.decode_envelope(_read(env_path))
    ctp = ev.decode_transformed(_read(in_path))
    payload = ev.open_outsourced(pp, env.header(), ctp, retrieve, env.dem_part())
    _write(out, payload, force)
    if out != "-":
        click.echo(f"wrote {out}")


@main.command()
@click.option("--in", "in_path", required=True, metavar="FILE")
@click.option("--pk", metavar="FILE", help="If given, run key self-checks where possible.")
@handles_errors
def inspect(in_path, pk):
    """Describe any file this toolkit produces."""
    data = _read(in_path)
    pp = ev.decode_public_params(_read(pk)) if pk else None
    for line in _describe(data, pp):
        click.echo(line)


def _describe(data: bytes, pp):
    magic = data[:4]
    if magic == ev.ENVELOPE_MAGIC:
        env = ev.decode_envelope(data)
        yield "envelope"
        yield f"  policy: {env.policy_text}"
        yield f"  matrix: {env.ct.lsss.n_rows} rows x {env.ct.lsss.n_cols} cols"
        yield f"  sealed payload: {len(env.sealed)} bytes (incl. 16-byte tag)"
        yield f"  policy digest: {env.ct.lsss.digest().hex()}"
        return
    if magic == ev.CIPHERTEXT_MAGIC:
        ct = ev.decode_ciphertext(data)
        yield "ciphertext"
        yield ct.lsss.describe()
        return
    if magic == ev.TRANSFORMED_MAGIC:
        ctp = ev.decode_transformed(data)
        yield "transformed ciphertext"
        yield f"  key id: {ctp.key_id.hex()}"
        return
    if magic != ev.KEY_MAGIC:
        raise MalformedEncoding(f"unrecognized file magic {magic!r}")
    role = data[6] if len(data) > 6 else None
    if role == ev.ROLE_PUBLIC:
        ev.decode_public_params(data)
        yield "public parameters"
    elif role == ev.ROLE_MASTER:
        ev.decode_master_secret(data)
        yield "master secret"
    elif role == ev.ROLE_PRIVATE:
        sk = ev.decode_private_key(data)
        yield "private key"
        yield f"  attributes: {', '.join(sk.attrs)}"
        if pp is not None:
            ok = check_private_key(pp, sk)
            yield f"  consistency with public params: {'ok' if ok else 'FAILED'}"
    elif role == ev.ROLE_TRANSFORM:
        tk = ev.decode_transform_key(data)
        yield "transform key"
        yield f"  key id: {tk.key_id.hex()}"
        yield f"  attributes: {', '.join(tk.attrs)}"
    elif role == ev.ROLE_RETRIEVE:
        rk = ev.decode_retrieve_key(data)
        yield "retrieve key"
        yield f"  key id: {rk.key_id.hex()}"
    else:
        raise MalformedEncoding(f"unknown key role {role}")


@main.command()
@click.option("--pk", required=True, metavar="FILE")
@click.option("--listen", default="127.0.0.1:7700", show_default=True, metavar="HOST:PORT")
@click.option("--mode", default="honest", show_default=True,
              type=click.Choice(proxy_mod.MODES))
@handles_errors
def proxy(pk, listen, mode):
    """Run a transformation proxy (foreground)."""
    pp = ev.decode_public_params(_read(pk))
    host, _, port = listen.rpartition(":")
    proxy_mod.proxy_serve((host or "127.0.0.1", int(port)), mode, pp)


@main.command()
@click.option("--sizes", default=",".join(str(s) for s in bench_mod.DEFAULT_SIZES),
              show_default=True, metavar="N,N,..")
@click.option("--reps", default=bench_mod.DEFAULT_REPS, show_default=True)
@click.option("--seed", type=int, help="Seed for reproducible runs.")
@click.option("--csv", "csv_path", metavar="FILE", help="Also write rows as CSV.")
@handles_errors
def bench(sizes, reps, seed, csv_path):
    """Measure costs across policy/attribute sizes and verify op counts."""
    config = bench_mod.BenchConfig(
        sizes=tuple(int(s) for s in sizes.split(",") if s.strip()),
        reps=reps,
        seed=seed,
        csv_path=csv_path,
    )
    report = bench_mod.bench_run(config)
    click.echo(bench_mod.format_report(report))
    if report.counter_mismatches:
        sys.exit(1)


@main.command("check-policy")
@click.argument("policy_text", metavar="POLICY")
@handles_errors
def check_policy(policy_text):
    """Parse a policy and print its share matrix."""
    lsss = policy_to_lsss(parse_policy(policy_text))
    click.echo(lsss.describe())


if __name__ == "__main__":
    main()
