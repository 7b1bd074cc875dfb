"""Keccak-256 (the pre-FIPS padding variant used by Ethereum).

Pure-Python sponge over Keccak-f[1600], rate 1088 / capacity 512, with the
0x01 domain padding.  Note this is *not* SHA3-256, which pads with 0x06.

The permutation keeps the 25 lanes in local variables and runs a
straight-line round body (theta, combined rho+pi, chi, iota) because this
hash sits on the hot path of every address derivation; the index arithmetic
and rotation offsets are hoisted into the generated statements.

Self-check vectors (asserted in the test suite):
    keccak256(b"")    = c5d2...a470
    keccak256(b"abc") = 4e03...6c45
"""

from __future__ import annotations

import struct

_M = (1 << 64) - 1
_RATE = 136  # bytes, for 256-bit output

_ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)


def keccak256(data: bytes) -> bytes:
    """Return the 32-byte Keccak-256 digest of *data*."""
    M = _M
    padded = bytearray(data)
    padded += b"\x00" * (_RATE - len(padded) % _RATE)
    padded[len(data)] ^= 0x01
    padded[-1] ^= 0x80

    (s0, s1, s2, s3, s4, s5, s6, s7, s8, s9, s10, s11, s12,
     s13, s14, s15, s16, s17, s18, s19, s20, s21, s22, s23, s24) = (0,) * 25

    for off in range(0, len(padded), _RATE):
        (l0, l1, l2, l3, l4, l5, l6, l7, l8,
         l9, l10, l11, l12, l13, l14, l15, l16) = struct.unpack_from("<17Q", padded, off)
        s0 ^= l0; s1 ^= l1; s2 ^= l2; s3 ^= l3; s4 ^= l4; s5 ^= l5
        s6 ^= l6; s7 ^= l7; s8 ^= l8; s9 ^= l9; s10 ^= l10; s11 ^= l11
        s12 ^= l12; s13 ^= l13; s14 ^= l14; s15 ^= l15; s16 ^= l16

        for rc in _ROUND_CONSTANTS:
            c0 = s0 ^ s5 ^ s10 ^ s15 ^ s20
            c1 = s1 ^ s6 ^ s11 ^ s16 ^ s21
            c2 = s2 ^ s7 ^ s12 ^ s17 ^ s22
            c3 = s3 ^ s8 ^ s13 ^ s18 ^ s23
            c4 = s4 ^ s9 ^ s14 ^ s19 ^ s24
            d0 = c4 ^ ((c1 << 1 | c1 >> 63) & M)
            d1 = c0 ^ ((c2 << 1 | c2 >> 63) & M)
            d2 = c1 ^ ((c3 << 1 | c3 >> 63) & M)
            d3 = c2 ^ ((c4 << 1 | c4 >> 63) & M)
            d4 = c3 ^ ((c0 << 1 | c0 >> 63) & M)
            b0 = s0 ^ d0
            t = s6 ^ d1; b1 = (t << 44 | t >> 20) & M
            t = s12 ^ d2; b2 = (t << 43 | t >> 21) & M
            t = s18 ^ d3; b3 = (t << 21 | t >> 43) & M
            t = s24 ^ d4; b4 = (t << 14 | t >> 50) & M
            t = s3 ^ d3; b5 = (t << 28 | t >> 36) & M
            t = s9 ^ d4; b6 = (t << 20 | t >> 44) & M
            t = s10 ^ d0; b7 = (t << 3 | t >> 61) & M
            t = s16 ^ d1; b8 = (t << 45 | t >> 19) & M
            t = s22 ^ d2; b9 = (t << 61 | t >> 3) & M
            t = s1 ^ d1; b10 = (t << 1 | t >> 63) & M
            t = s7 ^ d2; b11 = (t << 6 | t >> 58) & M
            t = s13 ^ d3; b12 = (t << 25 | t >> 39) & M
            t = s19 ^ d4; b13 = (t << 8 | t >> 56) & M
            t = s20 ^ d0; b14 = (t << 18 | t >> 46) & M
            t = s4 ^ d4; b15 = (t << 27 | t >> 37) & M
            t = s5 ^ d0; b16 = (t << 36 | t >> 28) & M
            t = s11 ^ d1; b17 = (t << 10 | t >> 54) & M
            t = s17 ^ d2; b18 = (t << 15 | t >> 49) & M
            t = s23 ^ d3; b19 = (t << 56 | t >> 8) & M
            t = s2 ^ d2; b20 = (t << 62 | t >> 2) & M
            t = s8 ^ d3; b21 = (t << 55 | t >> 9) & M
            t = s14 ^ d4; b22 = (t << 39 | t >> 25) & M
            t = s15 ^ d0; b23 = (t << 41 | t >> 23) & M
            t = s21 ^ d1; b24 = (t << 2 | t >> 62) & M
            s0 = b0 ^ ((b1 ^ M) & b2)
            s1 = b1 ^ ((b2 ^ M) & b3)
            s2 = b2 ^ ((b3 ^ M) & b4)
            s3 = b3 ^ ((b4 ^ M) & b0)
            s4 = b4 ^ ((b0 ^ M) & b1)
            s5 = b5 ^ ((b6 ^ M) & b7)
            s6 = b6 ^ ((b7 ^ M) & b8)
            s7 = b7 ^ ((b8 ^ M) & b9)
            s8 = b8 ^ ((b9 ^ M) & b5)
            s9 = b9 ^ ((b5 ^ M) & b6)
            s10 = b10 ^ ((b11 ^ M) & b12)
            s11 = b11 ^ ((b12 ^ M) & b13)
            s12 = b12 ^ ((b13 ^ M) & b14)
            s13 = b13 ^ ((b14 ^ M) & b10)
            s14 = b14 ^ ((b10 ^ M) & b11)
            s15 = b15 ^ ((b16 ^ M) & b17)
            s16 = b16 ^ ((b17 ^ M) & b18)
            s17 = b17 ^ ((b18 ^ M) & b19)
            s18 = b18 ^ ((b19 ^ M) & b15)
            s19 = b19 ^ ((b15 ^ M) & b16)
            s20 = b20 ^ ((b21 ^ M) & b22)
            s21 = b21 ^ ((b22 ^ M) & b23)
            s22 = b22 ^ ((b23 ^ M) & b24)
            s23 = b23 ^ ((b24 ^ M) & b20)
            s24 = b24 ^ ((b20 ^ M) & b21)
            s0 ^= rc

    return struct.pack("<4Q", s0, s1, s2, s3)
