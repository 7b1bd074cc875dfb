"""Negacyclic number-theoretic transform over Z_q[X]/(X^n + 1).

Requires a prime q with q = 1 (mod 2n) so a primitive 2n-th root of unity
exists; premultiplying by its powers folds the negacyclic wrap into the
transform.  Tables are built once per (n, q) and read-only afterwards.

Coefficients are uint64 numpy arrays.  Products of two values below 2^55
need 110 bits, so per-element reduction uses a float64 quotient estimate
followed by an exact signed remainder; the estimate may be off by a few
units, which the int64 remainder absorbs (all intermediates stay well
inside int64 range for q < 2^57).
"""

from __future__ import annotations

import numpy as np


class NttContext:
    """Transform tables for one (n, q); instances are immutable."""

    def __init__(self, n: int, q: int):
        if n < 2 or n & (n - 1):
            raise ValueError("ring dimension must be a power of two >= 2")
        if q.bit_length() > 57:
            raise ValueError("modulus too large for the float64 reduction path")
        if q % (2 * n) != 1:
            raise ValueError("q must be 1 mod 2n for a negacyclic transform")
        self.n = n
        self.q = q
        self._qf = float(q)
        self._qu = np.uint64(q)

        psi = self._find_psi(n, q)
        bits = n.bit_length() - 1
        ipsi = pow(psi, -1, q)
        self._psis = np.array(
            [pow(psi, self._bitrev(i, bits), q) for i in range(n)], dtype=np.uint64
        )
        self._ipsis = np.array(
            [pow(ipsi, self._bitrev(i, bits), q) for i in range(n)], dtype=np.uint64
        )
        self._n_inv = np.uint64(pow(n, -1, q))
        for table in (self._psis, self._ipsis):
            table.setflags(write=False)

    @staticmethod
    def _bitrev(x: int, bits: int) -> int:
        y = 0
        for _ in range(bits):
            y = (y << 1) | (x & 1)
            x >>= 1
        return y

    @staticmethod
    def _find_psi(n: int, q: int) -> int:
        # psi^n = -1 certifies a primitive 2n-th root of unity
        for base in range(2, 10_000):
            psi = pow(base, (q - 1) // (2 * n), q)
            if pow(psi, n, q) == q - 1:
                return psi
        raise ValueError(f"no primitive 2n-th root of unity found for q={q}")

    def mul_mod(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact elementwise a*b mod q for uint64 operands below q."""
        quot = np.floor(a.astype(np.float64) * b.astype(np.float64) / self._qf)
        r = (a * b - quot.astype(np.uint64) * self._qu).view(np.int64)
        return (r % self.q).astype(np.uint64)

    def add_mod(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self._qu

    def sub_mod(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + self._qu - b) % self._qu

    def forward(self, coeffs: np.ndarray) -> np.ndarray:
        """Forward transform along the last axis (any leading batch axes)."""
        a = coeffs.copy()
        n = self.n
        t, m = n, 1
        while m < n:
            t //= 2
            twiddle = self._psis[m + np.arange(m)][:, None]
            blocks = a.reshape(*a.shape[:-1], m, 2 * t)
            lo = blocks[..., :t].copy()
            hi = self.mul_mod(blocks[..., t:], twiddle)
            blocks[..., :t] = self.add_mod(lo, hi)
            blocks[..., t:] = self.sub_mod(lo, hi)
            m *= 2
        return a

    def inverse(self, values: np.ndarray) -> np.ndarray:
        """Inverse transform along the last axis."""
        a = values.copy()
        n = self.n
        t, m = 1, n
        while m > 1:
            half = m // 2
            twiddle = self._ipsis[half + np.arange(half)][:, None]
            blocks = a.reshape(*a.shape[:-1], half, 2 * t)
            lo = blocks[..., :t].copy()
            hi = blocks[..., t:].copy()
            blocks[..., :t] = self.add_mod(lo, hi)
            blocks[..., t:] = self.mul_mod(self.sub_mod(lo, hi), twiddle)
            t *= 2
            m = half
        return self.mul_mod(a, np.broadcast_to(self._n_inv, a.shape))

    def negacyclic_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """a * b mod (X^n + 1, q), coefficient domain in and out."""
        return self.inverse(self.mul_mod(self.forward(a), self.forward(b)))
