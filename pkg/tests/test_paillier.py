import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from sapkit import paillier
from sapkit.errors import KeyMismatch, MalformedCiphertext, MessageOutOfRange
from sapkit.paillier import PaillierCiphertext, add, decrypt, encrypt, keygen

from conftest import make_rng


# -- tiny key (p=5, q=7): exhaustive ground truth ------------------------------

def test_tiny_key_parameters(tiny_paillier_key):
    pk, sk = tiny_paillier_key
    assert pk.n == 35
    assert sk.lam == math.lcm(4, 6) == 12


def test_tiny_key_exhaustive_roundtrip(tiny_paillier_key, rng):
    pk, sk = tiny_paillier_key
    for m in range(35):
        assert decrypt(sk, pk, encrypt(pk, m, rng)) == m


def test_tiny_key_exhaustive_additive_law(tiny_paillier_key, rng):
    pk, sk = tiny_paillier_key
    for m1 in range(35):
        for m2 in range(35):
            total = add(encrypt(pk, m1, rng), encrypt(pk, m2, rng))
            assert decrypt(sk, pk, total) == (m1 + m2) % 35


def test_tiny_key_general_g(rng):
    pk, sk = paillier._keypair_from_primes(5, 7, general_g_rng=rng)
    assert pk.g != pk.n + 1
    for m in range(35):
        assert decrypt(sk, pk, encrypt(pk, m, rng)) == m
    total = add(encrypt(pk, 20, rng), encrypt(pk, 30, rng))
    assert decrypt(sk, pk, total) == 15


@settings(max_examples=200)
@given(st.integers(min_value=0, max_value=34), st.integers(min_value=0, max_value=34))
def test_tiny_additive_property(m1, m2):
    pk, sk = paillier._keypair_from_primes(5, 7)
    rng = make_rng(f"prop-{m1}-{m2}")
    total = add(encrypt(pk, m1, rng), encrypt(pk, m2, rng))
    assert decrypt(sk, pk, total) == (m1 + m2) % 35


# -- key generation ------------------------------------------------------------

def test_keygen_modulus_size(paillier_key_2048):
    pk, _ = paillier_key_2048
    assert 2**2047 <= pk.n < 2**2048
    assert pk.n > 2**257


def test_keygen_coprimality_condition(rng):
    for _ in range(3):
        pk, sk = keygen(2048, rng)
        # recover the gcd condition from published values: n coprime to lambda
        # implies gcd(pq, (p-1)(q-1)) = 1 for the generated primes
        assert math.gcd(pk.n, sk.lam) == 1


def test_keygen_rejects_small_without_flag(rng):
    with pytest.raises(ValueError):
        keygen(512, rng)
    pk, sk = keygen(512, rng, allow_small=True)
    m = rng.randrange(pk.n)
    assert decrypt(sk, pk, encrypt(pk, m, rng)) == m


def test_keygen_default_g(paillier_key_2048):
    pk, _ = paillier_key_2048
    assert pk.g == pk.n + 1


# -- encryption ----------------------------------------------------------------

def test_encrypt_zero_decrypts_to_zero(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    assert decrypt(sk, pk, encrypt(pk, 0, rng)) == 0


def test_fresh_randomness_per_encryption(paillier_key_2048, rng):
    pk, _ = paillier_key_2048
    seen = {encrypt(pk, 99, rng).c for _ in range(100)}
    assert len(seen) == 100


def test_boundary_plaintext_roundtrips(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    assert decrypt(sk, pk, encrypt(pk, pk.n - 1, rng)) == pk.n - 1


def test_message_out_of_range(paillier_key_2048, rng):
    pk, _ = paillier_key_2048
    with pytest.raises(MessageOutOfRange):
        encrypt(pk, pk.n, rng)
    with pytest.raises(MessageOutOfRange):
        encrypt(pk, -1, rng)


def test_random_roundtrips_256bit(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    for _ in range(1000):
        m = rng.getrandbits(256)
        assert decrypt(sk, pk, encrypt(pk, m, rng)) == m


def test_ciphertexts_are_units(paillier_key_2048, rng):
    pk, _ = paillier_key_2048
    for _ in range(20):
        ct = encrypt(pk, rng.getrandbits(256), rng)
        assert math.gcd(ct.c, pk.n) == 1


# -- decryption errors -----------------------------------------------------------

def test_malformed_ciphertext_rejected(paillier_key_2048):
    pk, sk = paillier_key_2048
    bogus = PaillierCiphertext(pk.n, pk.key_id, pk)  # gcd(n, n) != 1
    with pytest.raises(MalformedCiphertext):
        decrypt(sk, pk, bogus)


def test_decrypt_wrong_key_rejected(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    other_pk, _ = keygen(512, rng, allow_small=True)
    ct = encrypt(other_pk, 5, rng)
    with pytest.raises(KeyMismatch):
        decrypt(sk, pk, ct)


# -- homomorphic addition --------------------------------------------------------

def test_add_identity(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    x = rng.getrandbits(256)
    total = add(encrypt(pk, 0, rng), encrypt(pk, x, rng))
    assert decrypt(sk, pk, total) == x


def test_add_modular_wrap(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    m = rng.getrandbits(200)
    total = add(encrypt(pk, m, rng), encrypt(pk, pk.n - m, rng))
    assert decrypt(sk, pk, total) == 0


def test_add_random_256bit_no_wrap(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    for _ in range(50):
        m1, m2 = rng.getrandbits(256), rng.getrandbits(256)
        total = add(encrypt(pk, m1, rng), encrypt(pk, m2, rng))
        assert decrypt(sk, pk, total) == m1 + m2  # n >> 2^257: never wraps


def test_add_key_mismatch(paillier_key_2048, rng):
    pk, _ = paillier_key_2048
    other_pk, _ = keygen(512, rng, allow_small=True)
    with pytest.raises(KeyMismatch):
        add(encrypt(pk, 1, rng), encrypt(other_pk, 1, rng))


# -- serialization ----------------------------------------------------------------

def test_ciphertext_byte_encoding(paillier_key_2048, rng):
    pk, sk = paillier_key_2048
    ct = encrypt(pk, 123456789, rng)
    blob = ct.to_bytes()
    assert len(blob) == (2 * pk.n.bit_length() + 7) // 8 == 512
    restored = PaillierCiphertext.from_bytes(pk, blob)
    assert restored.c == ct.c
    assert decrypt(sk, pk, restored) == 123456789


def test_ciphertext_from_bytes_validates(paillier_key_2048):
    pk, _ = paillier_key_2048
    with pytest.raises(MalformedCiphertext):
        PaillierCiphertext.from_bytes(pk, b"\x00" * 10)
    with pytest.raises(MalformedCiphertext):
        PaillierCiphertext.from_bytes(pk, b"\x00" * 512)  # zero is out of range
