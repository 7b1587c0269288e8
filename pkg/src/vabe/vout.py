"""Outsourced decryption with a verifiable transformation step.

Encryption produces two policy-bound branches: one carries the payload
element M, the other a fresh random element M'. A binding commitment

    c_hat = u^(H1(M)) * v^(H2(M'))

travels with the ciphertext. A transform key is a private key with every
component raised to 1/z; an untrusted proxy uses it to collapse the
pairing-heavy work into a transformed ciphertext

    (t_hat, t1, t2, t1', t2') = (c_hat, C1, C2, blind1^(1/z), blind2^(1/z))

and the client finishes with two target-group exponentiations, no
pairings. The client accepts only if the echoed components match its
retained header and the recovered pair (M, M') reopens the commitment;
any mismatch raises the same VerificationFailed, deliberately carrying
no hint about which check tripped.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abe_core import CipherBranch, PublicParams, PrivateKey, encrypt_branch, recover_blinded
from .errors import VerificationFailed
from .groups import (
    G1Element,
    G2Element,
    GTElement,
    SYSTEM_RNG,
    Scalar,
    hash_to_scalar,
    random_bytes,
    random_gt,
)
from .policy import LsssPolicy, recon_coeffs
from ._pairing.constants import R as _R

H1_TAG = "VABE-H1-v1"
H2_TAG = "VABE-H2-v1"
KEY_ID_LEN = 16


@dataclass(frozen=True)
class Ciphertext:
    """Two branches under one policy plus the binding commitment."""

    lsss: LsssPolicy
    branch1: CipherBranch
    branch2: CipherBranch
    c_hat: G1Element


@dataclass(frozen=True)
class CiphertextHeader:
    """What the client retains to later verify a transformed ciphertext."""

    c_hat: G1Element
    c1: GTElement
    c2: GTElement


@dataclass(frozen=True)
class TransformKey:
    """Private key scaled by 1/z; safe to hand to an untrusted proxy."""

    attrs: tuple
    k: G2Element
    k0: G2Element
    k_attr: dict
    key_id: bytes


@dataclass(frozen=True)
class RetrieveKey:
    """The client's share z matching one transform key."""

    z: Scalar
    key_id: bytes


@dataclass(frozen=True)
class TransformedCiphertext:
    """Proxy output (t_hat, t1, t2, t1', t2') plus the key id it used."""

    t_hat: G1Element
    t1: GTElement
    t2: GTElement
    t1_prime: GTElement
    t2_prime: GTElement
    key_id: bytes


def _commitment(pp: PublicParams, m: GTElement, m_prime: GTElement):
    h1 = hash_to_scalar(H1_TAG, m)
    h2 = hash_to_scalar(H2_TAG, m_prime)
    return (pp.u ** h1) * (pp.v ** h2)


def verify_commitment(pp: PublicParams, c_hat: G1Element, m: GTElement, m_prime: GTElement) -> bool:
    return _commitment(pp, m, m_prime) == c_hat


def _encrypt_explicit(pp: PublicParams, m: GTElement, lsss: LsssPolicy, rng,
                      m_prime: GTElement, s1: Scalar | None, s2: Scalar | None) -> Ciphertext:
    branch1 = encrypt_branch(pp, m, lsss, rng, secret=s1)
    branch2 = encrypt_branch(pp, m_prime, lsss, rng, secret=s2)
    return Ciphertext(lsss=lsss, branch1=branch1, branch2=branch2,
                      c_hat=_commitment(pp, m, m_prime))


def encrypt(pp: PublicParams, m: GTElement, lsss: LsssPolicy, rng=SYSTEM_RNG) -> Ciphertext:
    """Encrypt a target-group element under a policy matrix."""
    return _encrypt_explicit(pp, m, lsss, rng, random_gt(rng), None, None)


def extract_header(ct: Ciphertext) -> CiphertextHeader:
    return CiphertextHeader(c_hat=ct.c_hat, c1=ct.branch1.c, c2=ct.branch2.c)


def decrypt(pp: PublicParams, sk: PrivateKey, ct: Ciphertext) -> GTElement:
    """Local decryption; verifies the commitment like the outsourced path."""
    coeffs = recon_coeffs(sk.attrs, ct.lsss)
    m = ct.branch1.c / recover_blinded(pp, ct.branch1, ct.lsss, sk, coeffs)
    m_prime = ct.branch2.c / recover_blinded(pp, ct.branch2, ct.lsss, sk, coeffs)
    if not verify_commitment(pp, ct.c_hat, m, m_prime):
        raise VerificationFailed()
    return m


def gen_tk(pp: PublicParams, sk: PrivateKey, rng=SYSTEM_RNG):
    """Blind a private key for outsourcing; returns (TransformKey, RetrieveKey)."""
    z = Scalar(rng.randrange(1, _R))
    zinv = z.inverse()
    key_id = random_bytes(rng, KEY_ID_LEN)
    tk = TransformKey(
        attrs=sk.attrs,
        k=sk.k ** zinv,
        k0=sk.k0 ** zinv,
        k_attr={attr: el ** zinv for attr, el in sk.k_attr.items()},
        key_id=key_id,
    )
    return tk, RetrieveKey(z=z, key_id=key_id)


def transform(pp: PublicParams, ct: Ciphertext, tk: TransformKey) -> TransformedCiphertext:
    """Proxy-side partial decryption; raises NotSatisfied when tk cannot."""
    coeffs = recon_coeffs(tk.attrs, ct.lsss)
    b1 = recover_blinded(pp, ct.branch1, ct.lsss, tk, coeffs)
    b2 = recover_blinded(pp, ct.branch2, ct.lsss, tk, coeffs)
    return TransformedCiphertext(
        t_hat=ct.c_hat,
        t1=ct.branch1.c,
        t2=ct.branch2.c,
        t1_prime=b1,
        t2_prime=b2,
        key_id=tk.key_id,
    )


def outdec(pp: PublicParams, header: CiphertextHeader, ct_prime: TransformedCiphertext,
           rk: RetrieveKey) -> GTElement:
    """Finish an outsourced decryption, or raise VerificationFailed.

    All rejection paths raise the same bare error: a proxy that tampers
    learns nothing about which of the echo or commitment checks caught it.
    """
    if (
        ct_prime.t_hat != header.c_hat
        or ct_prime.t1 != header.c1
        or ct_prime.t2 != header.c2
    ):
        raise VerificationFailed()
    m = ct_prime.t1 / (ct_prime.t1_prime ** rk.z)
    m_prime = ct_prime.t2 / (ct_prime.t2_prime ** rk.z)
    if not verify_commitment(pp, header.c_hat, m, m_prime):
        raise VerificationFailed()
    return m
