import numpy as np
import pytest

from discrete_radon.grid import GridFunction


def test_text_roundtrip_complex(tmp_path):
    rng = np.random.default_rng(0)
    g = GridFunction((-2, 3), rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4)))
    path = tmp_path / "g.grid"
    g.save(path)
    h = GridFunction.load(path)
    assert h.lo == g.lo and np.array_equal(h.values, g.values)


def test_binary_roundtrip(tmp_path):
    g = GridFunction((5,), np.arange(7.0))
    path = tmp_path / "g.bin"
    g.save(path)
    assert path.read_bytes()[:4] == b"GRDF"
    h = GridFunction.load(path)
    assert h.lo == (5,) and np.array_equal(h.values.real, g.values)


def test_header_layout():
    text = GridFunction((-1, 0), np.ones((2, 1))).to_text()
    assert text.splitlines()[0] == "2 -1 0 0 0"


def test_value_outside_box_is_zero():
    g = GridFunction.delta((4, -1))
    assert g((4, -1)) == 1 and g((0, 0)) == 0


def test_embed_and_add():
    a = GridFunction((0,), np.array([1.0, 2.0]))
    b = GridFunction((3,), np.array([5.0]))
    s = a + b
    assert s.lo == (0,) and s.values.tolist() == [1, 2, 0, 5]
    with pytest.raises(ValueError):
        s.embed((1,), (2,))


def test_norms():
    g = GridFunction((0,), np.array([3.0, -4.0]))
    assert g.norm(2) == 5 and g.norm(1) == 7 and g.norm(np.inf) == 4


def test_bad_text_is_rejected():
    with pytest.raises(ValueError):
        GridFunction.from_text("1 0 2\n1 0\n")
