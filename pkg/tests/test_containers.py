import json

import numpy as np
import pytest

from dbar3d.containers import load_container, save_container


def test_round_trip(tmp_path):
    arrays = {
        "a": np.arange(24, dtype=np.float64).reshape(2, 3, 4),
        "b": (np.ones(5) + 2j * np.ones(5)),
        "mask": np.array([1, 0, 1], dtype=np.uint8),
    }
    path = save_container(tmp_path / "box", arrays, meta={"rho": 4.0})
    assert path.suffix == ".json"
    back, meta = load_container(tmp_path / "box")
    assert meta == {"rho": 4.0}
    for name, arr in arrays.items():
        assert back[name].dtype == arr.dtype
        assert np.array_equal(back[name], arr)


def test_version_guard(tmp_path):
    save_container(tmp_path / "box", {"a": np.zeros(2)})
    header = json.loads((tmp_path / "box.json").read_text())
    header["format_version"] = 99
    (tmp_path / "box.json").write_text(json.dumps(header))
    with pytest.raises(ValueError):
        load_container(tmp_path / "box")


def test_deterministic_bytes(tmp_path):
    arrays = {"a": np.linspace(0, 1, 7)}
    save_container(tmp_path / "one", arrays, meta={"s": 1})
    save_container(tmp_path / "two", arrays, meta={"s": 1})
    assert (tmp_path / "one.bin").read_bytes() == (tmp_path / "two.bin").read_bytes()
    assert ((tmp_path / "one.json").read_text()
            == (tmp_path / "two.json").read_text())
