import json

import numpy as np
import pytest

from phaseavg import io
from phaseavg.errors import InvalidArgumentError, InvalidNetworkError
from phaseavg.expectation import expect
from phaseavg.generators import random_factor_pair, random_phase_network
from phaseavg.ldoi import MatrixTriple


def test_network_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    net = random_phase_network(rng, 3, 2)
    path = tmp_path / "net.json"
    io.save_network(net, path)
    back = io.load_network(path)
    assert back.wires == net.wires and back.open_legs == net.open_legs
    assert np.array_equal(expect(back), expect(net))


def test_matrix_triple_factor_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    io.save_matrix(m, tmp_path / "m.json")
    assert np.array_equal(io.load_matrix(tmp_path / "m.json"), m)
    t = MatrixTriple(m, m, m)
    io.save_triple(t, tmp_path / "t.json")
    assert io.load_triple(tmp_path / "t.json").allclose(t, 0.0)
    p = random_factor_pair(rng, 3, 2)
    io.save_factors(p, tmp_path / "f.json")
    q = io.load_factors(tmp_path / "f.json")
    assert np.array_equal(q.V, p.V) and np.array_equal(q.W, p.W)


def write(tmp_path, obj):
    path = tmp_path / "x.json"
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return path


@pytest.mark.parametrize(
    "obj",
    [
        {"d": 2},
        {"d": 2, "nodes": ["T"]},
        {"d": 2, "tensors": {"T": {"shape": [2], "data": [[1, 0]]}}, "nodes": ["T"], "open": [[0, 0]]},
        {"d": 2, "tensors": {"T": {"shape": [2], "data": [1, 2]}}, "nodes": ["T"], "open": [[0, 0]]},
        {"d": 2, "nodes": [{"random": {"family": "f", "flavor": "w"}}], "open": [[0, 0]]},
        {"d": 2, "tensors": {"T": {"shape": [2], "data": [[1, 0], [0, 1]]}}, "nodes": ["T"]},
        {"d": 2, "nodes": [5]},
    ],
)
def test_malformed_networks(tmp_path, obj):
    with pytest.raises((InvalidArgumentError, InvalidNetworkError)):
        io.load_network(write(tmp_path, obj))


def test_malformed_files(tmp_path):
    with pytest.raises(InvalidArgumentError):
        io.load_json(write(tmp_path, "{not json"))
    with pytest.raises(InvalidArgumentError):
        io.load_json(tmp_path / "missing.json")
    with pytest.raises(InvalidArgumentError):
        io.load_matrix(write(tmp_path, {"A": []}))
    with pytest.raises(InvalidArgumentError):
        io.load_triple(write(tmp_path, {"A": [[[1, 0]]]}))
    with pytest.raises(InvalidArgumentError):
        io.load_matrix(write(tmp_path, {"matrix": [[1, 2]]}))
