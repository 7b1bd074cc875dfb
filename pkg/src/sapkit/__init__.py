"""Stealth-address protocol toolkit.

Three interoperating schemes over one announcement registry:

- ``dksap``: the plain dual-key scheme (ECDH shared secret, hash-derived
  one-time keys);
- ``engine`` + ``paillier``: one-time keys assembled by homomorphically
  adding encrypted curve scalars under Paillier;
- ``engine`` + ``bfv``: the same flow over additive-only BFV on a
  negacyclic ring.

``curve`` provides secp256k1 arithmetic and address derivation, ``registry``
the file-backed public channel, ``bench`` the timing/storage harness, and
``cli`` the ``sap`` command-line entry point.
"""

from . import bench, bfv, curve, dksap, engine, errors, keccak, ntt, paillier, registry
from .engine import SchemeId

__all__ = [
    "bench",
    "bfv",
    "curve",
    "dksap",
    "engine",
    "errors",
    "keccak",
    "ntt",
    "paillier",
    "registry",
    "SchemeId",
]

__version__ = "0.1.0"
