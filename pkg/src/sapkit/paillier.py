"""Paillier cryptosystem, additive-only usage.

Supports encryption of curve-sized (256-bit) integers and homomorphic
addition via ciphertext multiplication mod n^2.  Key generation enforces
n > 2^257 so that the sum of two curve scalars never wraps mod n.

Defaults use g = n + 1, which always satisfies the decryption-inverse
condition and saves one exponentiation per encryption; a general-g mode is
retained and passes the same test suite.

Big-integer exponentiation is delegated to gmpy2.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import gmpy2

from .errors import KeyMismatch, MalformedCiphertext, MessageOutOfRange, PrimalityFailure
from .keccak import keccak256

MIN_PRODUCTION_BITS = 2048
_MIN_MODULUS = 1 << 257  # two curve scalars must sum without wrapping
_PRIME_RETRIES = 100_000


def _powmod(base: int, exp: int, mod: int) -> int:
    return int(gmpy2.powmod(base, exp, mod))


@dataclass(frozen=True)
class PaillierPublicKey:
    n: int
    g: int
    key_id: str = field(init=False)

    def __post_init__(self):
        digest = keccak256(
            self.n.to_bytes((self.n.bit_length() + 7) // 8, "big")
            + self.g.to_bytes((self.g.bit_length() + 7) // 8, "big")
        )
        object.__setattr__(self, "key_id", digest[:8].hex())

    @property
    def n_sq(self) -> int:
        return self.n * self.n

    @property
    def ciphertext_bytes(self) -> int:
        """Serialized ciphertext width: ceil(2 * |n| / 8) bytes."""
        return (2 * self.n.bit_length() + 7) // 8


@dataclass(frozen=True)
class PaillierSecretKey:
    lam: int  # lcm(p-1, q-1)
    mu: int   # inverse of L(g^lam mod n^2) mod n


@dataclass(frozen=True)
class PaillierCiphertext:
    c: int
    key_id: str
    public: PaillierPublicKey = field(repr=False, compare=False)

    def to_bytes(self) -> bytes:
        return self.c.to_bytes(self.public.ciphertext_bytes, "big")

    @classmethod
    def from_bytes(cls, pk: PaillierPublicKey, data: bytes) -> "PaillierCiphertext":
        if len(data) != pk.ciphertext_bytes:
            raise MalformedCiphertext(
                f"expected {pk.ciphertext_bytes} bytes, got {len(data)}"
            )
        value = int.from_bytes(data, "big")
        if not 0 < value < pk.n_sq:
            raise MalformedCiphertext("ciphertext out of range")
        return cls(value, pk.key_id, pk)


def _lagrange(x: int, n: int) -> int:
    return (x - 1) // n


def _random_prime(bits: int, rng: random.Random) -> int:
    for _ in range(_PRIME_RETRIES):
        candidate = rng.getrandbits(bits)
        candidate |= (1 << (bits - 1)) | (1 << (bits - 2)) | 1  # full size, odd
        if gmpy2.is_prime(candidate, 40):
            return candidate
    raise PrimalityFailure(f"no {bits}-bit prime found in {_PRIME_RETRIES} draws")


def _keypair_from_primes(
    p: int, q: int, *, general_g_rng: random.Random | None = None
) -> tuple[PaillierPublicKey, PaillierSecretKey]:
    """Assemble a key pair from given primes (also used for tiny test keys)."""
    if p == q:
        raise ValueError("primes must be distinct")
    n = p * q
    if math.gcd(n, (p - 1) * (q - 1)) != 1:
        raise ValueError("gcd(pq, (p-1)(q-1)) != 1")
    lam = math.lcm(p - 1, q - 1)
    n_sq = n * n
    if general_g_rng is None:
        g = n + 1
    else:
        while True:
            g = general_g_rng.randrange(2, n_sq)
            if math.gcd(g, n_sq) != 1:
                continue
            ell = _lagrange(_powmod(g, lam, n_sq), n)
            if math.gcd(ell % n, n) == 1:
                break
    mu = pow(_lagrange(_powmod(g, lam, n_sq), n) % n, -1, n)
    return PaillierPublicKey(n, g), PaillierSecretKey(lam, mu)


def keygen(
    bits: int,
    rng: random.Random,
    *,
    general_g: bool = False,
    allow_small: bool = False,
) -> tuple[PaillierPublicKey, PaillierSecretKey]:
    """Generate a key pair with an exactly *bits*-sized modulus.

    Production keys require bits >= 2048 (and therefore n > 2^257, large
    enough for any sum of two curve scalars); pass allow_small=True only in
    tests.  Prime pairs failing the coprimality condition are redrawn.
    """
    if bits < MIN_PRODUCTION_BITS and not allow_small:
        raise ValueError(f"modulus below {MIN_PRODUCTION_BITS} bits needs allow_small=True")
    if bits < 16:
        raise ValueError("modulus too small to split into prime halves")
    for _ in range(_PRIME_RETRIES):
        p = _random_prime(bits // 2, rng)
        q = _random_prime(bits - bits // 2, rng)
        if p == q:
            continue
        if math.gcd(p * q, (p - 1) * (q - 1)) != 1:
            continue
        if not allow_small and p * q <= _MIN_MODULUS:
            continue
        return _keypair_from_primes(p, q, general_g_rng=rng if general_g else None)
    raise PrimalityFailure("keygen retry budget exhausted")


def encrypt(pk: PaillierPublicKey, m: int, rng: random.Random) -> PaillierCiphertext:
    """c = g^m * r^n mod n^2 with a fresh uniform unit r per call."""
    if not 0 <= m < pk.n:
        raise MessageOutOfRange(f"plaintext must be in [0, n), got {m}")
    while True:
        r = rng.randrange(1, pk.n)
        if math.gcd(r, pk.n) == 1:
            break
    n_sq = pk.n_sq
    if pk.g == pk.n + 1:
        g_to_m = (1 + m * pk.n) % n_sq  # binomial shortcut for g = n + 1
    else:
        g_to_m = _powmod(pk.g, m, n_sq)
    c = g_to_m * _powmod(r, pk.n, n_sq) % n_sq
    return PaillierCiphertext(c, pk.key_id, pk)


def decrypt(sk: PaillierSecretKey, pk: PaillierPublicKey, ct: PaillierCiphertext) -> int:
    """m = L(c^lam mod n^2) * mu mod n."""
    if ct.key_id != pk.key_id:
        raise KeyMismatch("ciphertext was produced under a different key")
    if not 0 < ct.c < pk.n_sq or math.gcd(ct.c, pk.n) != 1:
        raise MalformedCiphertext("ciphertext is not a unit mod n^2")
    return _lagrange(_powmod(ct.c, sk.lam, pk.n_sq), pk.n) * sk.mu % pk.n


def add(ct1: PaillierCiphertext, ct2: PaillierCiphertext) -> PaillierCiphertext:
    """Homomorphic plaintext addition: multiply ciphertexts mod n^2."""
    if ct1.key_id != ct2.key_id:
        raise KeyMismatch("ciphertexts were produced under different keys")
    pk = ct1.public
    return PaillierCiphertext(ct1.c * ct2.c % pk.n_sq, pk.key_id, pk)
