"""Exception hierarchy shared by every layer of the library.

The CLI maps these onto stable machine-parsable stderr prefixes and exit
codes, so changes here are interface changes.
"""

from __future__ import annotations


class VabeError(Exception):
    """Base class for all library errors."""


class PolicyError(VabeError):
    """Base class for policy parsing and compilation errors."""


class PolicySyntaxError(PolicyError):
    """Formula rejected by the parser.

    Carries the byte offset (into the UTF-8 encoding of the formula) where
    the problem was detected.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class PolicyTooLarge(PolicyError):
    """Compiled matrix would exceed the configured row/column cap."""


class NotSatisfied(VabeError):
    """The attribute set does not satisfy the ciphertext policy."""


class VerificationFailed(VabeError):
    """Decryption output failed its integrity checks.

    This is the scheme's bottom value: a commitment or echo check did not
    hold, so no plaintext is released.  Deliberately not distinguished
    further (a cheating proxy and a tampered ciphertext look identical).
    """


class MalformedEncoding(VabeError):
    """A serialized artifact failed structural validation.

    ``path`` locates the offending field, e.g. ``ciphertext.branch1.rows[3].ci``.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class WrongCurve(MalformedEncoding):
    """Artifact was produced for a different curve than the running one."""


class WrongRole(MalformedEncoding):
    """Key file holds a different role than the caller asked for."""


class MalformedEnvelope(MalformedEncoding):
    """Envelope file is truncated or structurally invalid."""


class PayloadAuthFailed(VabeError):
    """The AEAD tag over the payload did not verify."""


class RetrieveKeyMismatch(VabeError):
    """Retrieve key does not belong to the transform key that produced CT'."""


class ProxyError(VabeError):
    """Remote proxy returned an error response.

    ``code`` is one of the wire error codes (UNKNOWN_KEY, NOT_SATISFIED,
    MALFORMED).
    """

    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
