"""Container format: bit-exact load/save cycles, section and meta handling."""

import numpy as np
import pytest

from casetag.errors import ParseError
from casetag.nn import Container, Tensor, restore_params, store_params


def make_container():
    c = Container()
    c.meta["kind"] = "demo"
    c.meta["note"] = "value with spaces"
    c.sections["vocab"] = ["1\t97", "2\t32", "3\t935"]
    c.add_array("layer.W", np.arange(6, dtype=np.float64).reshape(2, 3))
    c.add_array("layer.b", np.array([0.25, -1.5]))
    return c


def test_save_load_save_is_byte_identical(tmp_path):
    p1, p2 = tmp_path / "a.ctr", tmp_path / "b.ctr"
    make_container().save(str(p1))
    Container.load(str(p1)).save(str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_load_restores_everything(tmp_path):
    p = tmp_path / "m.ctr"
    make_container().save(str(p))
    c = Container.load(str(p))
    assert c.meta == {"kind": "demo", "note": "value with spaces"}
    assert c.sections["vocab"] == ["1\t97", "2\t32", "3\t935"]
    assert c.arrays["layer.W"].shape == (2, 3)
    assert np.allclose(c.arrays["layer.W"], np.arange(6).reshape(2, 3))
    assert c.arrays["layer.b"].dtype == np.dtype("<f4")


def test_store_restore_params_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    w = Tensor(rng.normal(size=(3, 2)), requires_grad=True)
    b = Tensor(rng.normal(size=3), requires_grad=True)
    c = Container()
    store_params(c, [("w", w), ("b", b)])
    p = tmp_path / "p.ctr"
    c.save(str(p))
    w2 = Tensor(np.zeros((3, 2)), requires_grad=True)
    b2 = Tensor(np.zeros(3), requires_grad=True)
    restore_params(Container.load(str(p)), [("w", w2), ("b", b2)])
    # float32 storage: equal after casting the originals down
    assert np.array_equal(w2.data, w.data.astype(np.float32).astype(np.float64))
    assert np.array_equal(b2.data, b.data.astype(np.float32).astype(np.float64))


def test_restore_rejects_missing_and_misshapen(tmp_path):
    c = Container()
    c.add_array("w", np.ones((2, 2)))
    p = tmp_path / "x.ctr"
    c.save(str(p))
    loaded = Container.load(str(p))
    with pytest.raises(ParseError):
        restore_params(loaded, [("missing", Tensor(np.zeros(2), requires_grad=True))])
    with pytest.raises(ParseError):
        restore_params(loaded, [("w", Tensor(np.zeros((3, 2)), requires_grad=True))])


def test_load_rejects_bad_magic(tmp_path):
    p = tmp_path / "junk.ctr"
    p.write_bytes(b"who knows\n")
    with pytest.raises(ParseError):
        Container.load(str(p))


def test_load_rejects_truncated_payload(tmp_path):
    p = tmp_path / "t.ctr"
    make_container().save(str(p))
    data = p.read_bytes()
    p.write_bytes(data[:-4])
    with pytest.raises(ParseError):
        Container.load(str(p))
