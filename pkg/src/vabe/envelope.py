"""File formats and hybrid payload encryption.

An envelope seals an arbitrary byte payload: a fresh target-group
element is encrypted under the access policy, a 256-bit key is derived
from it (HKDF-SHA256, info "VABE-KDF-v1"), and the payload goes through
AES-256-GCM. Only the 7 fixed header bytes are bound as AEAD associated
data; the policy-bound part authenticates itself through the scheme's
own commitment check, so tampering there surfaces as a verification
failure rather than an AEAD error.

Wire layouts (all length prefixes little-endian):

  envelope  "VABE" ver curve suite | u32+policy_text | u32+ciphertext |
            nonce(12) | u32+sealed_payload
  keys      "VABK" ver curve role key_id(16) | role-specific body
  ciphertext "VABC" ver curve | u32+matrix | c_hat | branch1 | branch2
  transformed "VABX" ver curve | key_id(16) | t_hat | t1 t2 t1' t2'

Group elements use tagged compressed points (50/98/578 bytes for
G1/G2/GT), scalars 32 bytes big-endian.
"""

from __future__ import annotations

from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .abe_core import CipherBranch, MasterSecret, PrivateKey, PublicParams
from .errors import (
    MalformedEncoding,
    MalformedEnvelope,
    PayloadAuthFailed,
    PolicyError,
    RetrieveKeyMismatch,
    WrongRole,
)
from .groups import (
    CURVE_ID,
    G1_ENC_LEN,
    G2_ENC_LEN,
    GT_ENC_LEN,
    SCALAR_ENC_LEN,
    SYSTEM_RNG,
    decode_g1,
    decode_g2,
    decode_gt,
    decode_scalar,
    random_bytes,
    random_gt,
)
from .policy import LsssPolicy, _validate_attr, lsss_from_bytes, parse_policy, policy_to_lsss
from .vout import (
    Ciphertext,
    CiphertextHeader,
    RetrieveKey,
    TransformKey,
    TransformedCiphertext,
    KEY_ID_LEN,
    decrypt as _vout_decrypt,
    encrypt as _vout_encrypt,
    extract_header,
    outdec as _vout_outdec,
)

ENVELOPE_MAGIC = b"VABE"
KEY_MAGIC = b"VABK"
CIPHERTEXT_MAGIC = b"VABC"
TRANSFORMED_MAGIC = b"VABX"
FORMAT_VERSION = 0x01
SUITE_AES256GCM_HKDF_SHA256 = 0x01

ROLE_PUBLIC = 1
ROLE_MASTER = 2
ROLE_PRIVATE = 3
ROLE_TRANSFORM = 4
ROLE_RETRIEVE = 5

ROLE_NAMES = {
    ROLE_PUBLIC: "public-params",
    ROLE_MASTER: "master-secret",
    ROLE_PRIVATE: "private-key",
    ROLE_TRANSFORM: "transform-key",
    ROLE_RETRIEVE: "retrieve-key",
}

_KDF_INFO = b"VABE-KDF-v1"
_NONCE_LEN = 12
_ZERO_ID = bytes(KEY_ID_LEN)


# ------------------------------------------------------------ byte helpers --

class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.pos = 0
        self.path = path

    def fail(self, msg: str):
        raise MalformedEncoding(msg, path=self.path)

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            self.fail(f"truncated {what}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def u16(self, what: str) -> int:
        return int.from_bytes(self.take(2, what), "little")

    def u32(self, what: str) -> int:
        return int.from_bytes(self.take(4, what), "little")

    def blob(self, what: str) -> bytes:
        return self.take(self.u32(f"{what} length"), what)

    def done(self):
        if self.pos != len(self.data):
            self.fail(f"{len(self.data) - self.pos} trailing bytes")


def _u16(n: int) -> bytes:
    return int(n).to_bytes(2, "little")


def _u32_blob(b: bytes) -> bytes:
    return len(b).to_bytes(4, "little") + b


def _g1(rd: _Reader, what: str):
    return decode_g1(rd.take(G1_ENC_LEN, what), path=f"{rd.path}.{what}")


def _g2(rd: _Reader, what: str):
    return decode_g2(rd.take(G2_ENC_LEN, what), path=f"{rd.path}.{what}")


def _gt(rd: _Reader, what: str):
    return decode_gt(rd.take(GT_ENC_LEN, what), path=f"{rd.path}.{what}")


def _scalar(rd: _Reader, what: str):
    return decode_scalar(rd.take(SCALAR_ENC_LEN, what), path=f"{rd.path}.{what}")


def _check_preamble(rd: _Reader, magic: bytes, kind: str) -> None:
    got = rd.take(4, "magic")
    if got != magic:
        raise MalformedEnvelope(f"not a {kind} file (magic {got!r})", path=rd.path)
    ver = rd.u8("version")
    if ver != FORMAT_VERSION:
        raise MalformedEnvelope(f"unsupported {kind} version {ver}", path=rd.path)
    curve = rd.u8("curve id")
    if curve != CURVE_ID:
        from .errors import WrongCurve

        raise WrongCurve(f"file uses curve id {curve:#04x}, expected {CURVE_ID:#04x}", path=rd.path)


def _attrs_block(attrs) -> bytes:
    out = bytearray(_u16(len(attrs)))
    for attr in attrs:
        raw = attr.encode("utf-8")
        out.append(len(raw))
        out += raw
    return bytes(out)


def _read_attrs(rd: _Reader):
    n = rd.u16("attribute count")
    attrs = []
    for i in range(n):
        alen = rd.u8(f"attribute {i} length")
        raw = rd.take(alen, f"attribute {i}")
        try:
            attr = raw.decode("utf-8")
            _validate_attr(attr)
        except (UnicodeDecodeError, PolicyError):
            rd.fail(f"invalid attribute {i}")
        attrs.append(attr)
    if len(set(attrs)) != len(attrs):
        rd.fail("duplicate attributes")
    return tuple(attrs)


# ---------------------------------------------------------------- key files --

def _key_preamble(role: int, key_id: bytes = _ZERO_ID) -> bytearray:
    out = bytearray(KEY_MAGIC)
    out += bytes((FORMAT_VERSION, CURVE_ID, role))
    out += key_id
    return out


def _open_key(data: bytes, want_role: int, path: str) -> tuple[_Reader, bytes]:
    rd = _Reader(data, path)
    _check_preamble(rd, KEY_MAGIC, "key")
    role = rd.u8("role")
    if role != want_role:
        raise WrongRole(
            f"expected {ROLE_NAMES.get(want_role, want_role)} but file holds "
            f"{ROLE_NAMES.get(role, role)}",
            path=path,
        )
    key_id = rd.take(KEY_ID_LEN, "key id")
    if role in (ROLE_PUBLIC, ROLE_MASTER, ROLE_PRIVATE) and key_id != _ZERO_ID:
        rd.fail("key id must be zero for this role")
    return rd, key_id


def encode_public_params(pp: PublicParams) -> bytes:
    out = _key_preamble(ROLE_PUBLIC)
    out += pp.g_a.to_bytes()
    out += pp.egg_alpha.to_bytes()
    out += pp.u.to_bytes()
    out += pp.v.to_bytes()
    out.append(len(pp.nonce))
    out += pp.nonce
    return bytes(out)


def decode_public_params(data: bytes, path: str = "public-params") -> PublicParams:
    rd, _ = _open_key(data, ROLE_PUBLIC, path)
    g_a = _g1(rd, "g_a")
    egg_alpha = _gt(rd, "egg_alpha")
    u = _g1(rd, "u")
    v = _g1(rd, "v")
    nonce = rd.take(rd.u8("nonce length"), "nonce")
    rd.done()
    return PublicParams(
        g_a=g_a._mark_hot(),
        egg_alpha=egg_alpha._mark_hot(),
        u=u._mark_hot(),
        v=v._mark_hot(),
        nonce=nonce,
    )


def encode_master_secret(msk: MasterSecret) -> bytes:
    out = _key_preamble(ROLE_MASTER)
    out += msk.alpha.to_bytes()
    out += msk.a.to_bytes()
    return bytes(out)


def decode_master_secret(data: bytes, path: str = "master-secret") -> MasterSecret:
    rd, _ = _open_key(data, ROLE_MASTER, path)
    alpha = _scalar(rd, "alpha")
    a = _scalar(rd, "a")
    rd.done()
    return MasterSecret(alpha=alpha, a=a)


def _encode_keyish(role: int, key_id: bytes, attrs, k, k0, k_attr) -> bytes:
    out = _key_preamble(role, key_id)
    out += _attrs_block(attrs)
    out += k.to_bytes()
    out += k0.to_bytes()
    for attr in attrs:
        out += k_attr[attr].to_bytes()
    return bytes(out)


def _decode_keyish(rd: _Reader):
    attrs = _read_attrs(rd)
    k = _g2(rd, "k")
    k0 = _g2(rd, "k0")
    k_attr = {attr: _g1(rd, f"k_attr[{attr}]") for attr in attrs}
    rd.done()
    return attrs, k, k0, k_attr


def encode_private_key(sk: PrivateKey) -> bytes:
    return _encode_keyish(ROLE_PRIVATE, _ZERO_ID, sk.attrs, sk.k, sk.k0, sk.k_attr)


def decode_private_key(data: bytes, path: str = "private-key") -> PrivateKey:
    rd, _ = _open_key(data, ROLE_PRIVATE, path)
    attrs, k, k0, k_attr = _decode_keyish(rd)
    return PrivateKey(attrs=attrs, k=k, k0=k0, k_attr=k_attr)


def encode_transform_key(tk: TransformKey) -> bytes:
    return _encode_keyish(ROLE_TRANSFORM, tk.key_id, tk.attrs, tk.k, tk.k0, tk.k_attr)


def decode_transform_key(data: bytes, path: str = "transform-key") -> TransformKey:
    rd, key_id = _open_key(data, ROLE_TRANSFORM, path)
    attrs, k, k0, k_attr = _decode_keyish(rd)
    return TransformKey(attrs=attrs, k=k, k0=k0, k_attr=k_attr, key_id=key_id)


def encode_retrieve_key(rk: RetrieveKey) -> bytes:
    out = _key_preamble(ROLE_RETRIEVE, rk.key_id)
    out += rk.z.to_bytes()
    return bytes(out)


def decode_retrieve_key(data: bytes, path: str = "retrieve-key") -> RetrieveKey:
    rd, key_id = _open_key(data, ROLE_RETRIEVE, path)
    z = _scalar(rd, "z")
    rd.done()
    if z.is_zero():
        rd.fail("retrieve key scalar must be nonzero")
    return RetrieveKey(z=z, key_id=key_id)


# --------------------------------------------------------------- ciphertext --

def _encode_branch(branch: CipherBranch) -> bytes:
    out = bytearray()
    out += branch.c.to_bytes()
    out += branch.c0.to_bytes()
    out += _u16(len(branch.rows))
    for c_i, d_i in branch.rows:
        out += c_i.to_bytes()
        out += d_i.to_bytes()
    return bytes(out)


def _decode_branch(rd: _Reader, n_rows: int, which: str) -> CipherBranch:
    c = _gt(rd, f"{which}.c")
    c0 = _g1(rd, f"{which}.c0")
    n = rd.u16(f"{which} row count")
    if n != n_rows:
        rd.fail(f"{which} has {n} rows, policy matrix has {n_rows}")
    rows = []
    for i in range(n):
        c_i = _g1(rd, f"{which}.rows[{i}].c")
        d_i = _g2(rd, f"{which}.rows[{i}].d")
        rows.append((c_i, d_i))
    return CipherBranch(c=c, c0=c0, rows=tuple(rows))


def encode_ciphertext(ct: Ciphertext) -> bytes:
    out = bytearray(CIPHERTEXT_MAGIC)
    out += bytes((FORMAT_VERSION, CURVE_ID))
    out += _u32_blob(ct.lsss.to_bytes())
    out += ct.c_hat.to_bytes()
    out += _encode_branch(ct.branch1)
    out += _encode_branch(ct.branch2)
    return bytes(out)


def decode_ciphertext(data: bytes, path: str = "ciphertext") -> Ciphertext:
    rd = _Reader(data, path)
    _check_preamble(rd, CIPHERTEXT_MAGIC, "ciphertext")
    lsss = lsss_from_bytes(rd.blob("policy matrix"), path=f"{path}.matrix")
    c_hat = _g1(rd, "c_hat")
    branch1 = _decode_branch(rd, lsss.n_rows, "branch1")
    branch2 = _decode_branch(rd, lsss.n_rows, "branch2")
    rd.done()
    return Ciphertext(lsss=lsss, branch1=branch1, branch2=branch2, c_hat=c_hat)


def encode_transformed(ctp: TransformedCiphertext) -> bytes:
    out = bytearray(TRANSFORMED_MAGIC)
    out += bytes((FORMAT_VERSION, CURVE_ID))
    out += ctp.key_id
    out += ctp.t_hat.to_bytes()
    out += ctp.t1.to_bytes()
    out += ctp.t2.to_bytes()
    out += ctp.t1_prime.to_bytes()
    out += ctp.t2_prime.to_bytes()
    return bytes(out)


def decode_transformed(data: bytes, path: str = "transformed") -> TransformedCiphertext:
    rd = _Reader(data, path)
    _check_preamble(rd, TRANSFORMED_MAGIC, "transformed ciphertext")
    key_id = rd.take(KEY_ID_LEN, "key id")
    t_hat = _g1(rd, "t_hat")
    t1 = _gt(rd, "t1")
    t2 = _gt(rd, "t2")
    t1p = _gt(rd, "t1_prime")
    t2p = _gt(rd, "t2_prime")
    rd.done()
    return TransformedCiphertext(t_hat=t_hat, t1=t1, t2=t2, t1_prime=t1p,
                                 t2_prime=t2p, key_id=key_id)


# ----------------------------------------------------------------- envelope --

@dataclass(frozen=True)
class DemPart:
    """The symmetric half of an envelope, enough to finish decryption."""

    nonce: bytes
    sealed: bytes
    aad: bytes


@dataclass(frozen=True)
class EnvelopeFile:
    policy_text: str
    ct: Ciphertext
    nonce: bytes
    sealed: bytes
    suite: int = SUITE_AES256GCM_HKDF_SHA256

    def header(self) -> CiphertextHeader:
        return extract_header(self.ct)

    def dem_part(self) -> DemPart:
        return DemPart(nonce=self.nonce, sealed=self.sealed, aad=_envelope_aad(self.suite))


def _envelope_aad(suite: int) -> bytes:
    return ENVELOPE_MAGIC + bytes((FORMAT_VERSION, CURVE_ID, suite))


def _derive_key(m) -> bytes:
    return HKDF(algorithm=SHA256(), length=32, salt=None, info=_KDF_INFO).derive(m.to_bytes())


def seal(pp: PublicParams, policy_text: str, payload: bytes, rng=SYSTEM_RNG) -> EnvelopeFile:
    """Encrypt payload so that keys satisfying the policy can open it."""
    lsss = policy_to_lsss(parse_policy(policy_text))
    m = random_gt(rng)
    ct = _vout_encrypt(pp, m, lsss, rng)
    nonce = random_bytes(rng, _NONCE_LEN)
    sealed = AESGCM(_derive_key(m)).encrypt(nonce, payload, _envelope_aad(SUITE_AES256GCM_HKDF_SHA256))
    return EnvelopeFile(policy_text=policy_text, ct=ct, nonce=nonce, sealed=sealed)


def encode_envelope(env: EnvelopeFile) -> bytes:
    out = bytearray(_envelope_aad(env.suite))
    out += _u32_blob(env.policy_text.encode("utf-8"))
    out += _u32_blob(encode_ciphertext(env.ct))
    out += env.nonce
    out += _u32_blob(env.sealed)
    return bytes(out)


def decode_envelope(data: bytes, path: str = "envelope") -> EnvelopeFile:
    rd = _Reader(data, path)
    got = rd.take(4, "magic")
    if got != ENVELOPE_MAGIC:
        raise MalformedEnvelope(f"not an envelope file (magic {got!r})", path=path)
    ver = rd.u8("version")
    if ver != FORMAT_VERSION:
        raise MalformedEnvelope(f"unsupported envelope version {ver}", path=path)
    curve = rd.u8("curve id")
    if curve != CURVE_ID:
        from .errors import WrongCurve

        raise WrongCurve(f"envelope uses curve id {curve:#04x}", path=path)
    suite = rd.u8("suite id")
    if suite != SUITE_AES256GCM_HKDF_SHA256:
        raise MalformedEnvelope(f"unknown cipher suite {suite:#04x}", path=path)
    try:
        policy_text = rd.blob("policy text").decode("utf-8")
    except UnicodeDecodeError:
        rd.fail("policy text is not valid UTF-8")
    ct = decode_ciphertext(rd.blob("ciphertext"), path=f"{path}.ciphertext")
    nonce = rd.take(_NONCE_LEN, "nonce")
    sealed = rd.blob("sealed payload")
    rd.done()
    return EnvelopeFile(policy_text=policy_text, ct=ct, nonce=nonce, sealed=sealed, suite=suite)


def _open_dem(m, dem: DemPart) -> bytes:
    try:
        return AESGCM(_derive_key(m)).decrypt(dem.nonce, dem.sealed, dem.aad)
    except InvalidTag:
        raise PayloadAuthFailed("payload failed authentication") from None


def open_local(pp: PublicParams, sk: PrivateKey, env: EnvelopeFile) -> bytes:
    """Decrypt an envelope with a private key held locally."""
    m = _vout_decrypt(pp, sk, env.ct)
    return _open_dem(m, env.dem_part())


def open_outsourced(pp: PublicParams, header: CiphertextHeader,
                    ct_prime: TransformedCiphertext, rk: RetrieveKey,
                    env_dem_part: DemPart) -> bytes:
    """Finish decryption from a proxy's transformed ciphertext.

    The transformed ciphertext must name the retrieve key's id; after
    that, verification failures surface exactly as in outdec.
    """
    if ct_prime.key_id != rk.key_id:
        raise RetrieveKeyMismatch(
            f"transformed ciphertext was made with key {ct_prime.key_id.hex()}, "
            f"retrieve key is {rk.key_id.hex()}"
        )
    m = _vout_outdec(pp, header, ct_prime, rk)
    return _open_dem(m, env_dem_part)
