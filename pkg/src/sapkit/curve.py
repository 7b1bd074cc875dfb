"""secp256k1 group arithmetic, wallet key generation, and address derivation.

Everything here is value-semantics: scalars, points, and key pairs are frozen
dataclasses, safe to share across threads.  Randomized operations take the
entropy source explicitly (any ``random.Random``, including
``secrets.SystemRandom``); there is no hidden global RNG.

The production scalar-multiplication path uses Jacobian coordinates with a
windowed fixed-base table for the generator and width-5 wNAF for arbitrary
bases.  The test suite cross-checks it against an independent naive affine
double-and-add oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import gmpy2

from .errors import IdentityPoint, SumIsZero
from .keccak import keccak256

# Curve y^2 = x^3 + 7 over GF(FIELD_PRIME); ORDER is the size of the group
# generated by GENERATOR.
FIELD_PRIME = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
_GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
_GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

SCALAR_BYTES = 32
COMPRESSED_BYTES = 33


@dataclass(frozen=True)
class CurveScalar:
    """Private-key scalar in [1, ORDER-1]."""

    value: int

    def __post_init__(self):
        if not 0 < self.value < ORDER:
            raise ValueError("scalar out of range [1, order-1]")

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(SCALAR_BYTES, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "CurveScalar":
        if len(data) != SCALAR_BYTES:
            raise ValueError(f"scalar must be {SCALAR_BYTES} bytes, got {len(data)}")
        return cls(int.from_bytes(data, "big"))

    def hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_hex(cls, text: str) -> "CurveScalar":
        return cls.from_bytes(bytes.fromhex(text))


@dataclass(frozen=True)
class CurvePoint:
    """Affine point on the curve, or the identity (point at infinity)."""

    x: int
    y: int
    infinity: bool = False

    def __post_init__(self):
        if self.infinity:
            if self.x or self.y:
                raise ValueError("identity point must carry zero coordinates")
            return
        if not (0 <= self.x < FIELD_PRIME and 0 <= self.y < FIELD_PRIME):
            raise ValueError("coordinate out of field range")
        if (self.y * self.y - (self.x * self.x * self.x + 7)) % FIELD_PRIME != 0:
            raise ValueError("point is not on the curve")

    @classmethod
    def identity(cls) -> "CurvePoint":
        return cls(0, 0, infinity=True)

    def to_bytes(self) -> bytes:
        """Serialize as 33-byte compressed SEC1 (transport form)."""
        if self.infinity:
            raise IdentityPoint("identity point has no compressed encoding")
        prefix = b"\x02" if self.y % 2 == 0 else b"\x03"
        return prefix + self.x.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "CurvePoint":
        if len(data) != COMPRESSED_BYTES or data[0] not in (2, 3):
            raise ValueError("expected 33-byte compressed point")
        x = int.from_bytes(data[1:], "big")
        if x >= FIELD_PRIME:
            raise ValueError("x coordinate out of range")
        y_sq = (pow(x, 3, FIELD_PRIME) + 7) % FIELD_PRIME
        y = pow(y_sq, (FIELD_PRIME + 1) // 4, FIELD_PRIME)
        if y * y % FIELD_PRIME != y_sq:
            raise ValueError("x is not on the curve")
        if y % 2 != data[0] - 2:
            y = FIELD_PRIME - y
        return cls(x, y)

    def hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_hex(cls, text: str) -> "CurvePoint":
        return cls.from_bytes(bytes.fromhex(text))

    def pair_hex(self) -> tuple[str, str]:
        """Render as the printed (0x<64 hex>, 0x<64 hex>) coordinate pair."""
        if self.infinity:
            raise IdentityPoint("identity point has no coordinate pair")
        return (f"0x{self.x:064x}", f"0x{self.y:064x}")

    def negate(self) -> "CurvePoint":
        if self.infinity:
            return self
        return CurvePoint(self.x, (-self.y) % FIELD_PRIME)


GENERATOR = CurvePoint(_GX, _GY)


@dataclass(frozen=True)
class WalletKeyPair:
    """Key pair with pk = sk * GENERATOR."""

    sk: CurveScalar
    pk: CurvePoint


@dataclass(frozen=True)
class EthAddress:
    """20-byte account address, rendered as 0x + 40 lowercase hex chars."""

    raw: bytes

    def __post_init__(self):
        if len(self.raw) != 20:
            raise ValueError("address must be exactly 20 bytes")

    def __str__(self) -> str:
        return "0x" + self.raw.hex()

    @classmethod
    def from_string(cls, text: str) -> "EthAddress":
        if not text.startswith("0x") or len(text) != 42:
            raise ValueError("address must be 0x followed by 40 hex chars")
        return cls(bytes.fromhex(text[2:]))


# ---------------------------------------------------------------------------
# Jacobian arithmetic (internal).  A point is (X, Y, Z) with x = X/Z^2,
# y = Y/Z^3; the identity is Z = 0.

_P = FIELD_PRIME
_JAC_IDENTITY = (0, 1, 0)


def _jac_double(pt):
    X1, Y1, Z1 = pt
    if not Z1 or not Y1:
        return _JAC_IDENTITY
    a = X1 * X1 % _P
    b = Y1 * Y1 % _P
    c = b * b % _P
    d = 2 * ((X1 + b) * (X1 + b) - a - c) % _P
    e = 3 * a % _P
    x3 = (e * e - 2 * d) % _P
    y3 = (e * (d - x3) - 8 * c) % _P
    z3 = 2 * Y1 * Z1 % _P
    return x3, y3, z3


def _jac_add(p1, p2):
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    if not Z1:
        return p2
    if not Z2:
        return p1
    z1z1 = Z1 * Z1 % _P
    z2z2 = Z2 * Z2 % _P
    u1 = X1 * z2z2 % _P
    u2 = X2 * z1z1 % _P
    s1 = Y1 * Z2 * z2z2 % _P
    s2 = Y2 * Z1 * z1z1 % _P
    h = (u2 - u1) % _P
    r = (s2 - s1) % _P
    if h == 0:
        if r == 0:
            return _jac_double(p1)
        return _JAC_IDENTITY
    hh = h * h % _P
    hhh = h * hh % _P
    v = u1 * hh % _P
    x3 = (r * r - hhh - 2 * v) % _P
    y3 = (r * (v - x3) - s1 * hhh) % _P
    z3 = Z1 * Z2 * h % _P
    return x3, y3, z3


def _jac_add_affine(p1, ax, ay):
    """Mixed addition: Jacobian p1 plus affine (ax, ay)."""
    X1, Y1, Z1 = p1
    if not Z1:
        return ax, ay, 1
    z1z1 = Z1 * Z1 % _P
    u2 = ax * z1z1 % _P
    s2 = ay * Z1 * z1z1 % _P
    h = (u2 - X1) % _P
    r = (s2 - Y1) % _P
    if h == 0:
        if r == 0:
            return _jac_double(p1)
        return _JAC_IDENTITY
    hh = h * h % _P
    hhh = h * hh % _P
    v = X1 * hh % _P
    x3 = (r * r - hhh - 2 * v) % _P
    y3 = (r * (v - x3) - Y1 * hhh) % _P
    z3 = Z1 * h % _P
    return x3, y3, z3


def _jac_to_point(pt) -> CurvePoint:
    X, Y, Z = pt
    if not Z:
        return CurvePoint.identity()
    zinv = int(gmpy2.invert(Z, _P))
    zinv2 = zinv * zinv % _P
    return CurvePoint(X * zinv2 % _P, Y * zinv2 * zinv % _P)


def _point_to_jac(p: CurvePoint):
    if p.infinity:
        return _JAC_IDENTITY
    return (p.x, p.y, 1)


# Fixed-base table for GENERATOR: 4-bit windows, entries stored affine so the
# walk uses cheap mixed additions.  Built lazily, normalized in one batch
# inversion.
_WINDOW_BITS = 4
_NUM_WINDOWS = 64
_g_table: list[list[tuple[int, int]]] | None = None


def _batch_to_affine(points):
    zs = [pt[2] for pt in points]
    prefix = [1] * (len(zs) + 1)
    for i, z in enumerate(zs):
        prefix[i + 1] = prefix[i] * z % _P
    inv_all = int(gmpy2.invert(prefix[-1], _P))
    out = [None] * len(points)
    for i in range(len(points) - 1, -1, -1):
        zinv = inv_all * prefix[i] % _P
        inv_all = inv_all * zs[i] % _P
        X, Y, _ = points[i]
        zinv2 = zinv * zinv % _P
        out[i] = (X * zinv2 % _P, Y * zinv2 * zinv % _P)
    return out


def _generator_table():
    global _g_table
    if _g_table is None:
        jac_entries = []
        base = (_GX, _GY, 1)
        for _ in range(_NUM_WINDOWS):
            acc = base
            row = [acc]
            for _ in range(14):
                acc = _jac_add(acc, base)
                row.append(acc)
            jac_entries.append(row)
            for _ in range(_WINDOW_BITS):
                base = _jac_double(base)
        flat = _batch_to_affine([pt for row in jac_entries for pt in row])
        _g_table = [flat[i * 15:(i + 1) * 15] for i in range(_NUM_WINDOWS)]
    return _g_table


def _mul_generator(k: int):
    table = _generator_table()
    acc = _JAC_IDENTITY
    for w in range(_NUM_WINDOWS):
        digit = (k >> (w * _WINDOW_BITS)) & 0xF
        if digit:
            ax, ay = table[w][digit - 1]
            acc = _jac_add_affine(acc, ax, ay)
    return acc


def _wnaf_digits(k: int, width: int):
    digits = []
    while k:
        if k & 1:
            d = k & ((1 << width) - 1)
            if d >= 1 << (width - 1):
                d -= 1 << width
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits


# Endomorphism split: lambda is a cube root of unity mod ORDER and
# (beta*x, y) = lambda * (x, y) on the curve, so a 256-bit multiple becomes
# two ~128-bit multiples sharing one doubling chain.  The basis solves
# A + B*lambda = 0 (mod ORDER); both identities are asserted below.
_LAMBDA = 0x5363AD4CC05C30E0A5261C028812645A122E22EA20816678DF02967C1B23BD72
_BETA = 0x7AE96A2B657C07106E64479EAC3434E99CF0497512F58995C1396C28719501EE
_GLV_A1 = 0x3086D221A7D46BCDE86C90E49284EB15
_GLV_B1 = -0xE4437ED6010E88286F547FA90ABFE4C3
_GLV_A2 = 0x114CA50F7A8E2F3F657C1108D9D44CFD8
_GLV_B2 = _GLV_A1

assert pow(_LAMBDA, 3, ORDER) == 1 and pow(_BETA, 3, FIELD_PRIME) == 1
assert (_GLV_A1 + _GLV_B1 * _LAMBDA) % ORDER == 0
assert (_GLV_A2 + _GLV_B2 * _LAMBDA) % ORDER == 0


def _glv_split(k: int) -> tuple[int, int]:
    """k = k1 + k2*lambda (mod ORDER) with |k1|, |k2| around 2^128."""
    c1 = (_GLV_B2 * k + ORDER // 2) // ORDER
    c2 = (-_GLV_B1 * k + ORDER // 2) // ORDER
    k1 = k - c1 * _GLV_A1 - c2 * _GLV_A2
    k2 = -c1 * _GLV_B1 - c2 * _GLV_B2
    return k1, k2


def _odd_multiples(base):
    """base, 3*base, ..., 15*base in Jacobian coordinates."""
    twice = _jac_double(base)
    table = [base]
    for _ in range(7):
        table.append(_jac_add(table[-1], twice))
    return table


def _mul_var_base(k: int, p: CurvePoint):
    """Split k via the endomorphism and scan both halves with width-5 wNAF
    over one shared doubling chain."""
    k1, k2 = _glv_split(k % ORDER)
    tables = []
    for part, point in (
        (k1, (p.x, p.y, 1)),
        (k2, (_BETA * p.x % _P, p.y, 1)),
    ):
        if part == 0:
            continue
        if part < 0:
            part = -part
            point = (point[0], (-point[1]) % _P, 1)
        odd = _odd_multiples(point)
        neg = [(x, (-y) % _P, z) for (x, y, z) in odd]
        tables.append((_wnaf_digits(part, 5), odd, neg))
    length = max((len(digits) for digits, _, _ in tables), default=0)
    acc = _JAC_IDENTITY
    for i in range(length - 1, -1, -1):
        acc = _jac_double(acc)
        for digits, odd, neg in tables:
            if i < len(digits):
                d = digits[i]
                if d > 0:
                    acc = _jac_add(acc, odd[d >> 1])
                elif d < 0:
                    acc = _jac_add(acc, neg[(-d) >> 1])
    return acc


# ---------------------------------------------------------------------------
# Public operations


def keygen(rng: random.Random) -> WalletKeyPair:
    """Draw a uniform scalar in [1, ORDER-1] and derive its public point.

    Out-of-range 256-bit draws (0 or >= ORDER) are rejected and resampled;
    callers never see an error from this path.
    """
    while True:
        candidate = int.from_bytes(rng.randbytes(SCALAR_BYTES), "big")
        if 0 < candidate < ORDER:
            break
    sk = CurveScalar(candidate)
    return WalletKeyPair(sk, scalar_mul(sk, GENERATOR))


def scalar_add(a: CurveScalar, b: CurveScalar) -> CurveScalar:
    """(a + b) mod ORDER; a zero result is rejected as an invalid key."""
    total = (a.value + b.value) % ORDER
    if total == 0:
        raise SumIsZero("scalar sum wrapped to zero")
    return CurveScalar(total)


def point_add(p: CurvePoint, q: CurvePoint) -> CurvePoint:
    """Group law; the identity is a valid operand and result."""
    return _jac_to_point(_jac_add(_point_to_jac(p), _point_to_jac(q)))


def scalar_mul(k: CurveScalar, point: CurvePoint) -> CurvePoint:
    """k * point via the group law (fixed-base table when point is GENERATOR)."""
    if point.infinity:
        return point
    if point.x == _GX and point.y == _GY:
        return _jac_to_point(_mul_generator(k.value))
    return _jac_to_point(_mul_var_base(k.value, point))


def pk_to_address(pk: CurvePoint) -> EthAddress:
    """keccak-256 over the 64-byte uncompressed x||y encoding, last 20 bytes."""
    if pk.infinity:
        raise IdentityPoint("cannot derive an address for the identity point")
    digest = keccak256(pk.x.to_bytes(32, "big") + pk.y.to_bytes(32, "big"))
    return EthAddress(digest[-20:])
