import json

import numpy as np
import pytest

from fraclap.io import (sha256_file, write_json, write_matrix_csv,
                        write_matrix_mm, write_table_csv)


def test_matrix_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(0)
    A = rng.standard_normal((7, 7))
    p = tmp_path / "a.csv"
    write_matrix_csv(p, A)
    B = np.loadtxt(p, delimiter=",")
    assert np.array_equal(A, B)          # 17 significant digits round-trip


def test_matrix_csv_rejects_complex(tmp_path):
    with pytest.raises(ValueError):
        write_matrix_csv(tmp_path / "c.csv", np.eye(2) * (1 + 1j))


def test_matrix_mm_roundtrip(tmp_path):
    from scipy.io import mmread
    A = np.arange(12, dtype=float).reshape(3, 4) / 7.0
    p = tmp_path / "a.mtx"
    write_matrix_mm(p, A)
    B = mmread(p)
    if not isinstance(B, np.ndarray):
        B = B.toarray()
    assert np.array_equal(A, B)


def test_table_csv_formats_ints_plainly(tmp_path):
    p = tmp_path / "t.csv"
    write_table_csv(p, ["k", "value"],
                    [np.array([1, 2, 3]), np.array([0.5, 0.25, 0.125])])
    lines = p.read_text().splitlines()
    assert lines[0] == "k,value"
    assert lines[1].startswith("1,")
    assert "e" in lines[1].split(",")[1]


def test_write_json_deterministic(tmp_path):
    payload = {"b": np.float64(2.0), "a": np.arange(3), "c": "x"}
    p1, p2 = tmp_path / "1.json", tmp_path / "2.json"
    write_json(p1, payload)
    write_json(p2, dict(reversed(list(payload.items()))))
    assert p1.read_bytes() == p2.read_bytes()
    assert json.loads(p1.read_text())["a"] == [0, 1, 2]


def test_sha256_file(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"abc")
    digest = sha256_file(p)
    assert digest == ("ba7816bf8f01cfea414140de5dae2223"
                      "b00361a396177a9cb410ff61f20015ad")
