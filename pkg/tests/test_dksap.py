import random

import pytest

from sapkit import curve, dksap
from sapkit.curve import GENERATOR, CurvePoint, CurveScalar, scalar_mul
from sapkit.dksap import DkAnnouncement, DkReceiverKeys, receiver_keygen, scan
from sapkit.errors import SapError
from sapkit.keccak import keccak256


def fixed_keys(scan_sk: int, spend_sk: int) -> DkReceiverKeys:
    def pair(v):
        sk = CurveScalar(v)
        return curve.WalletKeyPair(sk, scalar_mul(sk, GENERATOR))

    return DkReceiverKeys(scan=pair(scan_sk), spend=pair(spend_sk))


def test_both_sides_derive_the_same_address(rng):
    keys = receiver_keygen(rng)
    announcement, one_time_pub = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
    one_time_sk, stealth = dksap.receiver_derive(announcement.ephemeral, keys)
    assert stealth == announcement.stealth
    # the receiver's scalar reproduces the sender's point exactly
    assert scalar_mul(one_time_sk, GENERATOR) == one_time_pub


def test_unit_ephemeral_hashes_scan_key_directly():
    # with ephemeral scalar 1 the DH point is the scan key itself
    keys = fixed_keys(1234567, 7654321)
    expected = int.from_bytes(keccak256(keys.scan.pk.to_bytes()), "big") % curve.ORDER
    c = dksap.shared_secret_scalar(scalar_mul(CurveScalar(1), keys.scan.pk))
    assert c.value == expected


def test_shared_secret_commutes(rng):
    keys = receiver_keygen(rng)
    ephemeral = curve.keygen(rng)
    via_sender = scalar_mul(ephemeral.sk, keys.scan.pk)
    via_receiver = scalar_mul(keys.scan.sk, ephemeral.pk)
    assert via_sender == via_receiver


def test_end_to_end_random_trials(rng):
    keys = receiver_keygen(rng)
    for _ in range(1000):
        announcement, _ = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
        _, stealth = dksap.receiver_derive(announcement.ephemeral, keys)
        assert stealth == announcement.stealth


def test_tampered_ephemeral_changes_address(rng):
    keys = receiver_keygen(rng)
    announcement, _ = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
    tampered = scalar_mul(CurveScalar(2), announcement.ephemeral)  # any other point
    _, stealth = dksap.receiver_derive(tampered, keys)
    assert stealth != announcement.stealth


def test_sender_rejects_identity_inputs(rng):
    keys = receiver_keygen(rng)
    with pytest.raises(SapError):
        dksap.sender_derive(rng, CurvePoint.identity(), keys.spend.pk)
    with pytest.raises(SapError):
        dksap.receiver_derive(CurvePoint.identity(), keys)


# -- scanning ----------------------------------------------------------------

def test_scan_empty():
    keys = fixed_keys(3, 4)
    result = scan([], keys)
    assert result.matches == [] and result.malformed == 0


def test_scan_picks_exactly_own_announcements(rng):
    mine = receiver_keygen(rng)
    other = receiver_keygen(rng)
    announcements = []
    my_indices = set()
    for i in range(100):
        target = mine if i % 14 == 3 else other  # 7 of 100 are mine
        announcement, _ = dksap.sender_derive(rng, target.scan.pk, target.spend.pk)
        if target is mine:
            my_indices.add(i)
        announcements.append(announcement)
    assert len(my_indices) == 7
    result = scan(announcements, mine)
    assert {m.index for m in result.matches} == my_indices
    for match in result.matches:
        _, stealth = dksap.receiver_derive(announcements[match.index].ephemeral, mine)
        assert stealth == announcements[match.index].stealth


def test_scan_foreign_only_is_empty(rng):
    mine = receiver_keygen(rng)
    other = receiver_keygen(rng)
    announcements = [
        dksap.sender_derive(rng, other.scan.pk, other.spend.pk)[0] for _ in range(50)
    ]
    result = scan(announcements, mine)
    assert result.matches == [] and result.malformed == 0


def test_scan_counts_malformed_entries(rng):
    keys = receiver_keygen(rng)
    good, _ = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
    bad = DkAnnouncement(CurvePoint.identity(), good.stealth)
    result = scan([bad, good], keys)
    assert result.malformed == 1
    assert [m.index for m in result.matches] == [1]


def test_scan_results_are_order_independent(rng):
    keys = receiver_keygen(rng)
    announcements = [
        dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)[0] for _ in range(20)
    ]
    full = scan(announcements, keys)
    # scanning partitions and merging by index reproduces the single pass
    first = scan(announcements[:10], keys)
    second = scan(announcements[10:], keys)
    merged = [(m.index, m.one_time_sk) for m in first.matches]
    merged += [(m.index + 10, m.one_time_sk) for m in second.matches]
    assert merged == [(m.index, m.one_time_sk) for m in full.matches]


def test_fresh_ephemerals_give_distinct_addresses(rng):
    keys = receiver_keygen(rng)
    seen = set()
    for _ in range(10_000):
        announcement, _ = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
        seen.add(announcement.stealth.raw)
    assert len(seen) == 10_000


# -- wire format ---------------------------------------------------------------

def test_announcement_json_shape(rng):
    keys = receiver_keygen(rng)
    announcement, _ = dksap.sender_derive(rng, keys.scan.pk, keys.spend.pk)
    doc = announcement.to_json()
    assert set(doc) == {"scheme", "R_a", "sa"}
    assert doc["scheme"] == "dksap"
    assert len(doc["R_a"]) == 66 and doc["R_a"][:2] in ("02", "03")
    assert doc["sa"].startswith("0x") and len(doc["sa"]) == 42
    assert DkAnnouncement.from_json(doc) == announcement


def test_announcement_json_rejects_bad_docs():
    with pytest.raises(ValueError):
        DkAnnouncement.from_json({"scheme": "other", "R_a": "02" + "00" * 32, "sa": "0x" + "0" * 40})
    with pytest.raises(ValueError):
        DkAnnouncement.from_json({"scheme": "dksap", "R_a": "zz", "sa": "0x" + "0" * 40})
