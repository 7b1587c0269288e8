"""Attribute-based encryption with verifiable outsourced decryption.

Quick use:

    from vabe import abe_core, envelope, vout

    pp, msk = abe_core.setup()
    sk = abe_core.keygen(pp, msk, ["doctor", "cardiology"])
    env = envelope.seal(pp, "doctor and cardiology", b"records")
    assert envelope.open_local(pp, sk, env) == b"records"

The pairing-heavy part of decryption can be delegated: gen_tk blinds a
key for an untrusted proxy, transform runs there, and outdec verifies
the result before accepting it.
"""

from . import abe_core, bench, envelope, groups, policy, proxy, vout
from .errors import (
    MalformedEncoding,
    MalformedEnvelope,
    NotSatisfied,
    PayloadAuthFailed,
    PolicyError,
    PolicySyntaxError,
    PolicyTooLarge,
    ProxyError,
    RetrieveKeyMismatch,
    VabeError,
    VerificationFailed,
    WrongCurve,
    WrongRole,
)
from .groups import (
    G1Element,
    G2Element,
    GTElement,
    GroupDescription,
    OpCounter,
    Scalar,
    counted_scope,
    default_group,
    hash_to_g1,
    hash_to_scalar,
    pairing,
    pairing_product,
    random_gt,
    random_scalar,
)
from .policy import (
    And,
    Leaf,
    LsssPolicy,
    Or,
    Threshold,
    format_policy,
    parse_policy,
    policy_to_lsss,
    recon_coeffs,
    satisfies,
    share_secret,
)

__version__ = "0.1.0"

__all__ = [
    "abe_core", "bench", "envelope", "groups", "policy", "proxy", "vout",
    "VabeError", "PolicyError", "PolicySyntaxError", "PolicyTooLarge",
    "NotSatisfied", "VerificationFailed", "MalformedEncoding", "WrongCurve",
    "WrongRole", "MalformedEnvelope", "PayloadAuthFailed",
    "RetrieveKeyMismatch", "ProxyError",
    "Scalar", "G1Element", "G2Element", "GTElement", "GroupDescription",
    "OpCounter", "counted_scope", "default_group", "pairing",
    "pairing_product", "hash_to_g1", "hash_to_scalar", "random_scalar",
    "random_gt",
    "Leaf", "And", "Or", "Threshold", "LsssPolicy", "parse_policy",
    "format_policy", "policy_to_lsss", "satisfies", "share_secret",
    "recon_coeffs",
    "__version__",
]
