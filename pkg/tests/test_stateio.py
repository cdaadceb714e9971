"""JSON state files: round trips, format checks, validation errors."""

import json

import numpy as np
import pytest

from qedist.bipartite import hermitian, random_state
from qedist.stateio import (
    StateFormatError,
    load_state,
    matrix_from_json,
    matrix_to_json,
    save_state,
)


def test_round_trip_bit_identical(tmp_path):
    """Save then load reproduces every matrix entry exactly."""
    for seed, kind in enumerate(["haar_pure", "ginibre_mixed", "max_correlated"]):
        rho = random_state(kind, (3, 3), seed=seed)
        path = tmp_path / f"state_{kind}.json"
        save_state(path, rho)
        back = load_state(path)
        assert back.d_a == 3 and back.d_b == 3
        assert np.array_equal(back.mat, rho.mat)


def test_matrix_json_entries_are_pairs():
    mat = np.array([[1.0, 0.5 - 0.25j], [0.5 + 0.25j, 0.0]])
    rows = matrix_to_json(mat)
    assert rows[0][1] == [0.5, -0.25]
    assert np.array_equal(matrix_from_json(rows), mat)


def test_file_layout(tmp_path):
    rho = random_state("isotropic", (2, 2), seed=0, f=0.8)
    path = tmp_path / "iso.json"
    save_state(path, rho)
    doc = json.loads(path.read_text())
    assert doc["d_a"] == 2 and doc["d_b"] == 2
    assert len(doc["matrix"]) == 4 and len(doc["matrix"][0]) == 4


def test_load_rejects_bad_documents(tmp_path):
    path = tmp_path / "bad.json"

    path.write_text(json.dumps({"d_a": 2, "matrix": [[[1, 0]]]}))  # d_b missing
    with pytest.raises(StateFormatError):
        load_state(path)

    path.write_text("not json at all")
    with pytest.raises(StateFormatError):
        load_state(path)

    # valid Hermitian document that is not a state
    doc = {"d_a": 2, "d_b": 2, "matrix": matrix_to_json(np.eye(4))}
    path.write_text(json.dumps(doc))
    with pytest.raises(StateFormatError):
        load_state(path)
    w = load_state(path, density=False)  # but loads fine as a witness
    assert np.array_equal(w.mat, np.eye(4))


def test_save_witness_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    w = hermitian(2, 2, raw + raw.conj().T)
    path = tmp_path / "w.json"
    save_state(path, w)
    back = load_state(path, density=False)
    assert np.array_equal(back.mat, w.mat)
