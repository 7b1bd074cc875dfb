"""Exception hierarchy shared across the toolkit.

Protocol-level failures derive from :class:`SapError` so callers (CLI,
scanners) can distinguish "this input is bad" from programming errors.
"""


class SapError(Exception):
    """Base class for all protocol and codec failures."""


# curve / scalar arithmetic -------------------------------------------------

class SumIsZero(SapError):
    """Scalar addition wrapped to zero, which is not a valid private key."""


class IdentityPoint(SapError):
    """The point at infinity appeared where a real group element is required."""


class DegenerateSharedSecret(SapError):
    """Hashed shared secret reduced to zero mod the group order."""


# Paillier ------------------------------------------------------------------

class MessageOutOfRange(SapError):
    """Plaintext is negative or at least the modulus n."""


class MalformedCiphertext(SapError):
    """Ciphertext is not a unit modulo n^2 (or fails basic range checks)."""


class PrimalityFailure(SapError):
    """Prime generation exhausted its retry budget."""


# BFV -----------------------------------------------------------------------

class UnknownProfile(SapError):
    """Requested parameter profile name is not defined."""


class ValueTooLarge(SapError):
    """Scalar does not fit the plaintext encoding capacity."""


class BudgetExceeded(SapError):
    """Ciphertext addition budget (exactly one) would be exceeded."""


class NoiseOverflow(SapError):
    """Estimated decryption noise violates the correctness bound."""


# shared by the HE backends -------------------------------------------------

class KeyMismatch(SapError):
    """Operands were produced under different keys or parameter sets."""


# engine --------------------------------------------------------------------

class AddressMismatch(SapError):
    """Recovered one-time key does not reproduce the announced address."""


# registry ------------------------------------------------------------------

class DuplicateLabel(SapError):
    """Meta-address label is already taken."""


class SchemaViolation(SapError):
    """Document does not match the announcement/bundle schema."""


class RangeOutOfBounds(SapError):
    """Requested log slice is outside [0, len]."""
