"""Regenerate the golden fixture files in this directory.

Run from the repository root:

    python3 tests/fixtures/generate.py

Generation is fully seeded, so a rerun on the same library version must
reproduce byte-identical files; test_envelope.py pins their SHA-256
digests and will flag any drift.
"""

import pathlib
import random

from vabe import abe_core, envelope, vout

HERE = pathlib.Path(__file__).resolve().parent

POLICY = "(dept:radiology and role:doctor) or role:admin"
ATTRS = ("dept:radiology", "role:doctor", "site:main")
PAYLOAD = b"golden fixture payload \x00\x01\x02" + bytes(range(64))


def main() -> None:
    rng = random.Random(0xF1C)
    pp, msk = abe_core.setup(rng)
    sk = abe_core.keygen(pp, msk, ATTRS, rng)
    tk, rk = vout.gen_tk(pp, sk, rng)
    env = envelope.seal(pp, POLICY, PAYLOAD, rng)
    ctp = vout.transform(pp, env.ct, tk)

    out = {
        "public.bin": envelope.encode_public_params(pp),
        "master.bin": envelope.encode_master_secret(msk),
        "private.bin": envelope.encode_private_key(sk),
        "transform.bin": envelope.encode_transform_key(tk),
        "retrieve.bin": envelope.encode_retrieve_key(rk),
        "ciphertext.bin": envelope.encode_ciphertext(env.ct),
        "transformed.bin": envelope.encode_transformed(ctp),
        "envelope.bin": envelope.encode_envelope(env),
        "payload.bin": PAYLOAD,
    }
    for name, blob in out.items():
        (HERE / name).write_bytes(blob)
        print(f"wrote {name}: {len(blob)} bytes")


if __name__ == "__main__":
    main()
