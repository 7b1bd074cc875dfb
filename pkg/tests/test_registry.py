import json

import pytest

from sapkit.registry import LOG_FILENAME, META_FILENAME, Registry, canonical_json
from sapkit.errors import DuplicateLabel, RangeOutOfBounds, SchemaViolation


def dk_doc(i: int) -> dict:
    return {"scheme": "dksap", "R_a": "02" + f"{i:064x}", "sa": "0x" + f"{i:040x}"}


def he_doc(i: int) -> dict:
    return {"scheme": "fhe-bfv", "v": 1, "c": f"{i:04x}", "sa": "0x" + f"{i:040x}",
            "created_at": "2026-01-01T00:00:00+00:00"}


BUNDLE = {"v": 1, "scheme": "fhe-bfv", "pk2": "02" + "aa" * 32, "pkb": {}, "c2": "00"}


# -- meta directory -----------------------------------------------------------

def test_publish_and_get_roundtrip():
    reg = Registry()
    reg.publish_meta("bob", BUNDLE)
    assert reg.get_meta("bob") == BUNDLE
    assert reg.labels() == ["bob"]


def test_duplicate_label_rejected():
    reg = Registry()
    reg.publish_meta("bob", BUNDLE)
    with pytest.raises(DuplicateLabel):
        reg.publish_meta("bob", BUNDLE)


def test_get_unknown_label():
    with pytest.raises(KeyError):
        Registry().get_meta("nobody")


# -- append-only log ------------------------------------------------------------

def test_first_append_is_index_zero():
    assert Registry().append(dk_doc(0)) == 0


def test_indices_are_dense_and_stable():
    reg = Registry()
    for i in range(1000):
        assert reg.append(dk_doc(i)) == i
    assert len(reg) == 1000
    assert reg.read_range(0, 1000) == [dk_doc(i) for i in range(1000)]


def test_read_range_slices():
    reg = Registry()
    docs = [he_doc(i) for i in range(10)]
    for doc in docs:
        reg.append(doc)
    assert reg.read_range(3, 7) == docs[3:7]
    assert reg.read_range(5, 5) == []
    assert reg.read_range(0, len(reg)) == docs


def test_read_range_bounds():
    reg = Registry()
    reg.append(dk_doc(1))
    for start, stop in ((-1, 0), (0, 2), (1, 0), (2, 2)):
        with pytest.raises(RangeOutOfBounds):
            reg.read_range(start, stop)


def test_schema_violations_rejected():
    reg = Registry()
    with pytest.raises(SchemaViolation):
        reg.append({"scheme": "unknown"})
    with pytest.raises(SchemaViolation):
        reg.append({"scheme": "dksap", "R_a": "02aa"})  # truncated point
    with pytest.raises(SchemaViolation):
        reg.append({"scheme": "fhe-bfv", "v": 1, "c": ""})  # empty ciphertext
    with pytest.raises(SchemaViolation):
        reg.append({"scheme": "fhe-bfv", "c": "00ff"})  # missing version
    with pytest.raises(SchemaViolation):
        reg.append({"scheme": "dksap", "R_a": "02" + "00" * 32, "sa": "0XABC"})
    assert len(reg) == 0


# -- file persistence --------------------------------------------------------------

def test_reload_reproduces_state_byte_for_byte(tmp_path):
    with Registry.open(tmp_path) as reg:
        reg.publish_meta("bob", BUNDLE)
        for i in range(25):
            reg.append(he_doc(i))
        original = [canonical_json(d) for d in reg.read_all()]
    with Registry.open(tmp_path) as reloaded:
        assert [canonical_json(d) for d in reloaded.read_all()] == original
        assert reloaded.get_meta("bob") == BUNDLE
        # appends continue from the persisted index
        assert reloaded.append(he_doc(99)) == 25


def test_log_file_is_line_oriented(tmp_path):
    with Registry.open(tmp_path) as reg:
        docs = [dk_doc(i) for i in range(5)]
        for doc in docs:
            reg.append(doc)
    lines = (tmp_path / LOG_FILENAME).read_text().strip().split("\n")
    assert len(lines) == 5
    # file tail equals the equivalent read_range slice
    assert [json.loads(line) for line in lines[2:]] == docs[2:]
    # canonical form: sorted keys, compact separators
    assert lines[0] == canonical_json(docs[0])


def test_corrupt_line_reported_with_line_number(tmp_path):
    with Registry.open(tmp_path) as reg:
        reg.append(dk_doc(1))
        reg.append(dk_doc(2))
    log_path = tmp_path / LOG_FILENAME
    content = log_path.read_text().split("\n")
    content[1] = content[1][:10] + "<<<corrupt>>>"
    log_path.write_text("\n".join(content))
    with pytest.raises(SchemaViolation, match=r":2:"):
        Registry.open(tmp_path)


def test_corrupt_meta_line_reported(tmp_path):
    with Registry.open(tmp_path) as reg:
        reg.publish_meta("bob", BUNDLE)
    meta_path = tmp_path / META_FILENAME
    meta_path.write_text(meta_path.read_text() + '{"not-a-meta-entry": 1}\n')
    with pytest.raises(SchemaViolation, match=r":2:"):
        Registry.open(tmp_path)


def test_append_only_no_mutation_surface():
    reg = Registry()
    reg.append(dk_doc(1))
    snapshot = reg.read_all()
    snapshot.append(dk_doc(2))  # mutating the returned list must not alter the log
    assert len(reg) == 1
    assert not hasattr(reg, "delete") and not hasattr(reg, "update")
