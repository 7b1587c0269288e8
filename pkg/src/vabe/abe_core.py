"""Ciphertext-policy ABE core: setup, key generation, one encryption branch.

Messages are target-group elements blinded by e(g1, g2)^(alpha * s); the
secret s is split across the policy matrix rows. Decryption pairs the
ciphertext against a matching key and cancels everything but the blind.
recover_blinded evaluates the whole cancellation as a single product of
pairings, folding the reconstruction coefficients into G1 so no
target-group inversions are needed:

    e(C0, K) * prod_i e(C_i^(-w_i), K0) * e(K_attr^(-w_i), D_i)

Run under a key divided by z (see vout.gen_tk) the same routine returns
the blind raised to 1/z, which is what the transformation proxy emits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotSatisfied
from .groups import (
    G1Element,
    G2Element,
    GTElement,
    GroupDescription,
    SYSTEM_RNG,
    Scalar,
    default_group,
    hash_to_g1,
    pairing_product,
    random_bytes,
    random_scalar,
)
from .policy import LsssPolicy, _validate_attr, recon_coeffs, share_secret

# Labels for the commitment bases; "/" keeps them outside the attribute
# namespace, the suffix ties them to one setup run.
_U_LABEL_PREFIX = b"commit-u/"
_V_LABEL_PREFIX = b"commit-v/"
_NONCE_LEN = 16


@dataclass(frozen=True)
class PublicParams:
    """Published parameters: everything needed to encrypt and verify."""

    g_a: G1Element
    egg_alpha: GTElement
    u: G1Element
    v: G1Element
    nonce: bytes

    @property
    def group(self) -> GroupDescription:
        return default_group()


@dataclass(frozen=True)
class MasterSecret:
    alpha: Scalar
    a: Scalar


@dataclass(frozen=True)
class PrivateKey:
    """Decryption key for one attribute set.

    k = g2^(alpha + a*t), k0 = g2^t, and one G1 element per attribute:
    k_attr[x] = H(x)^t.
    """

    attrs: tuple
    k: G2Element
    k0: G2Element
    k_attr: dict

    def has_attrs(self, needed) -> bool:
        return set(needed) <= set(self.attrs)


@dataclass(frozen=True)
class CipherBranch:
    """One policy-bound encryption of a target-group element.

    rows[i] = (C_i, D_i) lines up with row i of the policy matrix the
    branch was produced for; the matrix itself travels separately.
    """

    c: GTElement
    c0: G1Element
    rows: tuple


def setup(rng=SYSTEM_RNG):
    """Generate (PublicParams, MasterSecret) for a fresh authority."""
    group = default_group()
    alpha = random_scalar(rng)
    a = random_scalar(rng)
    nonce = random_bytes(rng, _NONCE_LEN)
    pp = PublicParams(
        g_a=(group.g1 ** a)._mark_hot(),
        egg_alpha=(group.gt ** alpha)._mark_hot(),
        u=hash_to_g1(_U_LABEL_PREFIX + nonce),
        v=hash_to_g1(_V_LABEL_PREFIX + nonce),
        nonce=nonce,
    )
    return pp, MasterSecret(alpha=alpha, a=a)


def keygen(pp: PublicParams, msk: MasterSecret, attrs, rng=SYSTEM_RNG) -> PrivateKey:
    """Issue a key for an attribute set (order kept, duplicates dropped)."""
    attrs = tuple(dict.fromkeys(attrs))
    for attr in attrs:
        _validate_attr(attr)
    group = pp.group
    t = random_scalar(rng)
    k = group.g2 ** (msk.alpha + msk.a * t)
    k0 = group.g2 ** t
    k_attr = {attr: hash_to_g1(attr) ** t for attr in attrs}
    return PrivateKey(attrs=attrs, k=k, k0=k0, k_attr=k_attr)


def encrypt_branch(pp: PublicParams, m: GTElement, lsss: LsssPolicy, rng=SYSTEM_RNG,
                   *, secret: Scalar | None = None) -> CipherBranch:
    """Encrypt m under the policy matrix; secret s is drawn unless pinned."""
    if not isinstance(m, GTElement):
        raise TypeError("message must be a target-group element")
    group = pp.group
    s = random_scalar(rng) if secret is None else secret
    shares = share_secret(lsss, s, rng)
    c = m * (pp.egg_alpha ** s)
    c0 = group.g1 ** s
    rows = []
    for lam, attr in zip(shares, lsss.row_attrs):
        r_i = random_scalar(rng)
        c_i = (pp.g_a ** lam) * (hash_to_g1(attr) ** (-r_i))
        rows.append((c_i, group.g2 ** r_i))
    return CipherBranch(c=c, c0=c0, rows=tuple(rows))


def recover_blinded(pp: PublicParams, branch: CipherBranch, lsss: LsssPolicy,
                    key_side, coeffs: dict) -> GTElement:
    """Cancel the share structure, leaving the blinding factor.

    key_side is any object with k/k0/k_attr (a PrivateKey or a transform
    key); coeffs maps matrix row index to reconstruction coefficient.
    With a plain key the result is e(g1,g2)^(alpha*s); with a key scaled
    by 1/z it is the same value raised to 1/z.
    """
    if len(branch.rows) != lsss.n_rows:
        raise ValueError("ciphertext rows do not match policy matrix")
    pairs = [(branch.c0, key_side.k)]
    for i, w in coeffs.items():
        attr = lsss.row_attrs[i]
        c_i, d_i = branch.rows[i]
        pairs.append(((c_i ** w).inverse(), key_side.k0))
        pairs.append(((key_side.k_attr[attr] ** w).inverse(), d_i))
    return pairing_product(pairs)


def decrypt_basic(pp: PublicParams, sk: PrivateKey, lsss: LsssPolicy,
                  branch: CipherBranch) -> GTElement:
    """Recover the branch plaintext, or raise NotSatisfied."""
    coeffs = recon_coeffs(sk.attrs, lsss)
    blinded = recover_blinded(pp, branch, lsss, sk, coeffs)
    return branch.c / blinded


def check_private_key(pp: PublicParams, sk: PrivateKey) -> bool:
    """Structural self-check of a key against the public parameters."""
    from .groups import pairing

    group = pp.group
    lhs = pairing(group.g1, sk.k)
    rhs = pp.egg_alpha * pairing(pp.g_a, sk.k0)
    if lhs != rhs:
        return False
    for attr in sk.attrs:
        if pairing(sk.k_attr[attr], group.g2) != pairing(hash_to_g1(attr), sk.k0):
            return False
    return True
