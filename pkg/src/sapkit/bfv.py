"""Additive-only BFV over a power-of-two negacyclic ring.

The scheme supports exactly one homomorphic addition per ciphertext pair,
which keeps the accumulated noise far below the decryption-failure threshold
without any bootstrapping machinery.  Component layout:

    pk = (b, a)            b = -(a*s + e) mod q, a uniform
    ct = (c0, c1)          c0 = a*u + e0,  c1 = b*u + e1 + delta*m
    dec: round(t * (c0*s + c1) / q) mod t

so that c0*s + c1 = delta*m + (e0*s - e*u + e1), the identity asserted by the
noise tests.  Secret/ephemeral polynomials are uniform ternary; error
polynomials come from a table-driven discrete Gaussian cut at 6 sigma.

256-bit wallet scalars are carried as base-B limbs in the plaintext slots;
2(B-1) < t guarantees one limb-wise addition never wraps mod t, so decoding
is plain positional arithmetic over the integers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    BudgetExceeded,
    KeyMismatch,
    MalformedCiphertext,
    NoiseOverflow,
    UnknownProfile,
    ValueTooLarge,
)
from .keccak import keccak256
from .ntt import NttContext

_SCALAR_CAP_BITS = 257  # largest value a protocol plaintext may take: sum of two 256-bit keys

_PROFILES = {
    # 128-bit-style desk parameters: NTT-friendly 55-bit prime, 17-bit
    # plaintext modulus, 16-bit limbs.
    "desk-128bit": dict(n=4096, q=18014398509506561, t=1 << 17, limb_base=1 << 16, sigma=3.2),
    # Tiny parameters for exhaustive ring-arithmetic and zero-noise checks.
    # Too small to carry a 256-bit scalar and too noisy for fresh-noise
    # decryption; protocol flows always use desk-128bit.
    "test-tiny": dict(n=16, q=65537, t=257, limb_base=16, sigma=3.2),
}


@dataclass(frozen=True)
class BfvParams:
    profile: str
    n: int
    q: int
    t: int
    delta: int
    limb_base: int
    sigma: float
    err_tail: int
    fingerprint: str
    ntt: NttContext = field(repr=False, compare=False)

    @property
    def limb_bits(self) -> int:
        return self.limb_base.bit_length() - 1

    @property
    def capacity_bits(self) -> int:
        """Total scalar bits the plaintext slots can hold."""
        return self.n * self.limb_bits

    @property
    def max_correct_noise(self) -> int:
        """floor(q/(2t) - t): noise infinity-norm that still guarantees exact
        decryption (negative for test-tiny, which relies on zero-noise hooks).
        """
        return (self.q - 2 * self.t * self.t) // (2 * self.t)


def setup(profile: str) -> BfvParams:
    """Build (and cache) the parameter set for a named profile."""
    if profile not in _PROFILES:
        raise UnknownProfile(f"unknown profile {profile!r}; choose from {sorted(_PROFILES)}")
    return _setup_cached(profile)


@lru_cache(maxsize=None)
def _setup_cached(profile: str) -> BfvParams:
    spec = _PROFILES[profile]
    n, q, t = spec["n"], spec["q"], spec["t"]
    limb_base, sigma = spec["limb_base"], spec["sigma"]
    if math.gcd(q, t) != 1:
        raise ValueError("q and t must be coprime")
    if 2 * (limb_base - 1) >= t:
        raise ValueError("one limb-wise addition must not wrap mod t")
    delta = q // t
    if delta < 1:
        raise ValueError("q must exceed t")
    ntt = NttContext(n, q)  # validates q = 1 mod 2n
    tag = f"{profile}|n={n}|q={q}|t={t}|B={limb_base}|sigma={sigma}"
    fingerprint = keccak256(tag.encode()).hex()[:16]
    return BfvParams(
        profile=profile, n=n, q=q, t=t, delta=delta, limb_base=limb_base,
        sigma=sigma, err_tail=int(6 * sigma), fingerprint=fingerprint, ntt=ntt,
    )


class RingElem:
    """Element of Z_m[X]/(X^n + 1): n canonically reduced coefficients."""

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs: np.ndarray, modulus: int):
        arr = np.ascontiguousarray(coeffs, dtype=np.uint64)
        if arr.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if arr.size and int(arr.max()) >= modulus:
            raise ValueError("coefficients must be reduced below the modulus")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    def __len__(self) -> int:
        return self.coeffs.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElem)
            and self.modulus == other.modulus
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __repr__(self) -> str:
        head = ", ".join(str(int(c)) for c in self.coeffs[:4])
        tail = ", ..." if len(self) > 4 else ""
        return f"RingElem([{head}{tail}], mod {self.modulus})"

    @classmethod
    def zeros(cls, n: int, modulus: int) -> "RingElem":
        return cls(np.zeros(n, dtype=np.uint64), modulus)

    @classmethod
    def from_ints(cls, values, modulus: int) -> "RingElem":
        return cls(np.asarray([v % modulus for v in values], dtype=np.uint64), modulus)

    def to_list(self) -> list[int]:
        return [int(c) for c in self.coeffs]


def centered(elem: RingElem) -> np.ndarray:
    """Signed representatives in (-m/2, m/2] as int64."""
    half = elem.modulus // 2
    c = elem.coeffs.astype(np.int64)
    return np.where(c > half, c - elem.modulus, c)


def infinity_norm(elem: RingElem) -> int:
    return int(np.abs(centered(elem)).max())


@dataclass(frozen=True)
class BfvPublicKey:
    b: RingElem
    a: RingElem
    params_fp: str
    key_id: str = field(init=False)
    _b_hat: np.ndarray = field(init=False, repr=False, compare=False)
    _a_hat: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        digest = keccak256(
            self.params_fp.encode() + self.b.coeffs.tobytes() + self.a.coeffs.tobytes()
        )
        object.__setattr__(self, "key_id", digest[:8].hex())
        params = _params_by_fp(self.params_fp)
        object.__setattr__(self, "_b_hat", params.ntt.forward(self.b.coeffs))
        object.__setattr__(self, "_a_hat", params.ntt.forward(self.a.coeffs))


@dataclass(frozen=True)
class BfvSecretKey:
    s: RingElem
    params_fp: str
    _s_hat: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        params = _params_by_fp(self.params_fp)
        object.__setattr__(self, "_s_hat", params.ntt.forward(self.s.coeffs))


@dataclass(frozen=True)
class BfvCiphertext:
    c0: RingElem
    c1: RingElem
    add_count: int
    key_id: str | None
    params_fp: str


def _params_by_fp(fingerprint: str) -> BfvParams:
    for profile in _PROFILES:
        params = _setup_cached(profile)
        if params.fingerprint == fingerprint:
            return params
    raise KeyMismatch(f"no known parameter set with fingerprint {fingerprint}")


# ---------------------------------------------------------------------------
# Randomness


def _random_words(count: int, rng: random.Random) -> np.ndarray:
    return np.frombuffer(rng.randbytes(8 * count), dtype=np.uint64)


def _sample_uniform(n: int, q: int, rng: random.Random) -> np.ndarray:
    """Uniform coefficients in [0, q) via rejection below the largest
    multiple of q that fits in 64 bits."""
    limit = np.uint64((1 << 64) // q * q)
    out = np.empty(n, dtype=np.uint64)
    filled = 0
    while filled < n:
        draw = _random_words(n - filled, rng)
        keep = draw[draw < limit]
        out[filled:filled + keep.size] = keep
        filled += keep.size
    return out % np.uint64(q)


def _sample_ternary(n: int, rng: random.Random) -> np.ndarray:
    """Uniform in {-1, 0, 1}, rejection-sampled from bytes (int64 output)."""
    out = np.empty(n, dtype=np.int64)
    filled = 0
    while filled < n:
        draw = np.frombuffer(rng.randbytes(n - filled), dtype=np.uint8)
        keep = draw[draw < 252]  # 252 = 3 * 84 keeps the residues unbiased
        out[filled:filled + keep.size] = keep.astype(np.int64) % 3 - 1
        filled += keep.size
    return out


@lru_cache(maxsize=8)
def _gaussian_cdf_table(sigma: float, tail: int) -> tuple:
    """64-bit fixed-point CDF over the support [-tail, tail]."""
    xs = list(range(-tail, tail + 1))
    weights = [math.exp(-(x * x) / (2.0 * sigma * sigma)) for x in xs]
    total = sum(weights)
    acc = 0.0
    thresholds = []
    for w in weights:
        acc += w
        thresholds.append(min(int(acc / total * (1 << 64)), (1 << 64) - 1))
    thresholds[-1] = (1 << 64) - 1
    return np.array(thresholds, dtype=np.uint64), np.array(xs, dtype=np.int64)


def _sample_gaussian(n: int, sigma: float, tail: int, rng: random.Random) -> np.ndarray:
    """Discrete Gaussian (sigma, cut at +/-tail) via inverse-CDF table lookup."""
    thresholds, xs = _gaussian_cdf_table(sigma, tail)
    draws = _random_words(n, rng)
    idx = np.searchsorted(thresholds, draws, side="right")
    return xs[np.minimum(idx, xs.size - 1)]


# ---------------------------------------------------------------------------
# Scheme operations


def keygen(params: BfvParams, rng: random.Random) -> tuple[BfvPublicKey, BfvSecretKey]:
    """Sample ternary s, uniform a, Gaussian e; publish (b, a) = (-(a*s+e), a)."""
    s = _sample_ternary(params.n, rng)
    e = _sample_gaussian(params.n, params.sigma, params.err_tail, rng)
    a = _sample_uniform(params.n, params.q, rng)
    return _keygen_with(params, s, e, a)


def _keygen_with(
    params: BfvParams, s_signed: np.ndarray, e_signed: np.ndarray, a_coeffs: np.ndarray
) -> tuple[BfvPublicKey, BfvSecretKey]:
    """Deterministic assembly from explicit randomness (test hook)."""
    q = params.q
    ntt = params.ntt
    s = (s_signed % q).astype(np.uint64)
    e = (e_signed % q).astype(np.uint64)
    a_s = ntt.inverse(ntt.mul_mod(ntt.forward(a_coeffs), ntt.forward(s)))
    b = (np.uint64(q) * 2 - a_s - e) % np.uint64(q)  # -(a*s + e) mod q
    pk = BfvPublicKey(RingElem(b, q), RingElem(a_coeffs, q), params.fingerprint)
    sk = BfvSecretKey(RingElem(s, q), params.fingerprint)
    return pk, sk


def encrypt(pk: BfvPublicKey, m: RingElem, params: BfvParams, rng: random.Random) -> BfvCiphertext:
    """(c0, c1) = (a*u + e0, b*u + e1 + delta*m) with fresh u, e0, e1."""
    u = _sample_ternary(params.n, rng)
    e0 = _sample_gaussian(params.n, params.sigma, params.err_tail, rng)
    e1 = _sample_gaussian(params.n, params.sigma, params.err_tail, rng)
    return _encrypt_with(pk, m, params, u, e0, e1)


def _encrypt_with(
    pk: BfvPublicKey,
    m: RingElem,
    params: BfvParams,
    u_signed: np.ndarray,
    e0_signed: np.ndarray,
    e1_signed: np.ndarray,
) -> BfvCiphertext:
    """Encryption from explicit randomness (test hook; zeros give a
    noise-free ciphertext with c1 = delta*m exactly)."""
    if pk.params_fp != params.fingerprint:
        raise KeyMismatch("public key belongs to a different parameter set")
    if m.modulus != params.t or len(m) != params.n:
        raise ValueError("plaintext must be a length-n ring element mod t")
    q = np.uint64(params.q)
    ntt = params.ntt
    u_hat = ntt.forward((u_signed % params.q).astype(np.uint64))
    e0 = (e0_signed % params.q).astype(np.uint64)
    e1 = (e1_signed % params.q).astype(np.uint64)
    c0 = (ntt.inverse(ntt.mul_mod(pk._a_hat, u_hat)) + e0) % q
    scaled = np.uint64(params.delta) * m.coeffs  # < delta*t <= q, no overflow
    c1 = ((ntt.inverse(ntt.mul_mod(pk._b_hat, u_hat)) + e1) % q + scaled) % q
    return BfvCiphertext(
        RingElem(c0, params.q), RingElem(c1, params.q),
        add_count=0, key_id=pk.key_id, params_fp=params.fingerprint,
    )


def add(ct1: BfvCiphertext, ct2: BfvCiphertext) -> BfvCiphertext:
    """Component-wise sum; consumes the single allowed addition."""
    if ct1.params_fp != ct2.params_fp:
        raise KeyMismatch("ciphertexts belong to different parameter sets")
    if ct1.key_id is None or ct2.key_id is None or ct1.key_id != ct2.key_id:
        raise KeyMismatch("ciphertexts were produced under different keys")
    if ct1.add_count or ct2.add_count:
        raise BudgetExceeded("additive budget is exactly one homomorphic addition")
    q = np.uint64(ct1.c0.modulus)
    c0 = (ct1.c0.coeffs + ct2.c0.coeffs) % q
    c1 = (ct1.c1.coeffs + ct2.c1.coeffs) % q
    return BfvCiphertext(
        RingElem(c0, ct1.c0.modulus), RingElem(c1, ct1.c0.modulus),
        add_count=1, key_id=ct1.key_id, params_fp=ct1.params_fp,
    )


def _noisy_phase(sk: BfvSecretKey, ct: BfvCiphertext, params: BfvParams) -> np.ndarray:
    """c0*s + c1 mod q: the scaled message plus noise."""
    ntt = params.ntt
    c0_s = ntt.inverse(ntt.mul_mod(ntt.forward(ct.c0.coeffs), sk._s_hat))
    return (c0_s + ct.c1.coeffs) % np.uint64(params.q)


def decrypt(
    sk: BfvSecretKey,
    ct: BfvCiphertext,
    params: BfvParams,
    *,
    expected: RingElem | None = None,
) -> RingElem:
    """Recover round(t * (c0*s + c1) / q) mod t, coefficient-wise.

    Noise overflow is undetectable from the ciphertext alone: rounding always
    lands on *some* plaintext.  Test builds that know the true plaintext may
    pass it as *expected*; the implied noise is then checked against the
    exact correctness condition and NoiseOverflow raised on violation.
    """
    if sk.params_fp != ct.params_fp or sk.params_fp != params.fingerprint:
        raise KeyMismatch("secret key, ciphertext, and parameters must match")
    if len(ct.c0) != params.n or len(ct.c1) != params.n:
        raise MalformedCiphertext("ciphertext polynomials have the wrong length")
    q, t = params.q, params.t
    phase = _noisy_phase(sk, ct, params)
    half_q = q // 2
    message = [((t * int(p) + half_q) // q) % t for p in phase]
    if expected is not None:
        noise = _implied_noise(phase, expected, params)
        residue = q - params.delta * t  # q mod t, since delta = floor(q/t)
        bound = q // 2
        worst = max(
            abs(t * int(nu) - residue * int(mc))
            for nu, mc in zip(noise, expected.coeffs)
        )
        if worst >= bound:
            raise NoiseOverflow(
                f"noise term reached {worst} >= q/2 = {bound}; decryption unreliable"
            )
    return RingElem.from_ints(message, t)


def _implied_noise(phase: np.ndarray, m: RingElem, params: BfvParams) -> np.ndarray:
    """Centered phase - delta*m mod q, assuming *m* is the true plaintext."""
    q = np.uint64(params.q)
    scaled = np.uint64(params.delta) * m.coeffs
    diff = (phase + q - scaled % q) % q
    return centered(RingElem(diff, params.q))


def noise_infinity_norm(
    sk: BfvSecretKey, ct: BfvCiphertext, m: RingElem, params: BfvParams
) -> int:
    """Measured noise norm against the known true plaintext (test builds)."""
    phase = _noisy_phase(sk, ct, params)
    return int(np.abs(_implied_noise(phase, m, params)).max())


# ---------------------------------------------------------------------------
# Scalar encoding


def encode_scalar(m: int, params: BfvParams) -> RingElem:
    """Spread a non-negative integer over base-B limbs in ascending slots."""
    if m < 0:
        raise ValueError("scalars are non-negative")
    if m.bit_length() > _SCALAR_CAP_BITS or m.bit_length() > params.capacity_bits:
        raise ValueTooLarge(
            f"{m.bit_length()}-bit scalar exceeds the encoding capacity "
            f"({min(_SCALAR_CAP_BITS, params.capacity_bits)} bits)"
        )
    mask = params.limb_base - 1
    shift = params.limb_bits
    limbs = []
    while m:
        limbs.append(m & mask)
        m >>= shift
    limbs.extend(0 for _ in range(params.n - len(limbs)))
    return RingElem.from_ints(limbs, params.t)


def decode_scalar(elem: RingElem, params: BfvParams) -> int:
    """Evaluate limbs at the base: integer arithmetic absorbs any carries
    produced by one limb-wise homomorphic addition."""
    if elem.modulus != params.t:
        raise ValueError("expected a plaintext ring element mod t")
    shift = params.limb_bits
    total = 0
    for i, c in enumerate(elem.to_list()):
        total += c << (shift * i)
    return total


# ---------------------------------------------------------------------------
# Serialization: fingerprint bytes || c0 || c1, little-endian 8-byte words


def _fp_bytes(fingerprint: str) -> bytes:
    return bytes.fromhex(fingerprint)


def ciphertext_to_bytes(ct: BfvCiphertext) -> bytes:
    return _fp_bytes(ct.params_fp) + ct.c0.coeffs.tobytes() + ct.c1.coeffs.tobytes()


def ciphertext_from_bytes(
    params: BfvParams, data: bytes, *, add_count: int = 0
) -> BfvCiphertext:
    """Parse a ciphertext blob.  The wire format does not carry the producing
    key, so the result cannot take part in further additions; *add_count*
    records the sender-side history (1 for combined announcements)."""
    header = len(_fp_bytes(params.fingerprint))
    expected_len = header + 2 * params.n * 8
    if len(data) != expected_len:
        raise MalformedCiphertext(f"expected {expected_len} bytes, got {len(data)}")
    if data[:header] != _fp_bytes(params.fingerprint):
        raise KeyMismatch("ciphertext was produced under different parameters")
    body = np.frombuffer(data[header:], dtype=np.uint64)
    c0, c1 = body[:params.n], body[params.n:]
    if int(c0.max()) >= params.q or int(c1.max()) >= params.q:
        raise MalformedCiphertext("coefficients exceed the modulus")
    return BfvCiphertext(
        RingElem(c0, params.q), RingElem(c1, params.q),
        add_count=add_count, key_id=None, params_fp=params.fingerprint,
    )


def pubkey_to_bytes(pk: BfvPublicKey) -> bytes:
    return _fp_bytes(pk.params_fp) + pk.b.coeffs.tobytes() + pk.a.coeffs.tobytes()


def pubkey_from_bytes(params: BfvParams, data: bytes) -> BfvPublicKey:
    header = len(_fp_bytes(params.fingerprint))
    expected_len = header + 2 * params.n * 8
    if len(data) != expected_len or data[:header] != _fp_bytes(params.fingerprint):
        raise KeyMismatch("public key blob does not match the parameter set")
    body = np.frombuffer(data[header:], dtype=np.uint64)
    return BfvPublicKey(
        RingElem(body[:params.n], params.q),
        RingElem(body[params.n:], params.q),
        params.fingerprint,
    )


def secretkey_to_bytes(sk: BfvSecretKey) -> bytes:
    return _fp_bytes(sk.params_fp) + sk.s.coeffs.tobytes()


def secretkey_from_bytes(params: BfvParams, data: bytes) -> BfvSecretKey:
    header = len(_fp_bytes(params.fingerprint))
    if len(data) != header + params.n * 8 or data[:header] != _fp_bytes(params.fingerprint):
        raise KeyMismatch("secret key blob does not match the parameter set")
    return BfvSecretKey(
        RingElem(np.frombuffer(data[header:], dtype=np.uint64), params.q),
        params.fingerprint,
    )
