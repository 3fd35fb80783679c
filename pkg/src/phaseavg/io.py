"""JSON file formats for networks, matrices, triples and factor pairs.

Complex numbers are written as ``[re, im]`` pairs.  Arrays are nested lists
of such pairs (row-major), or, for tensors in network files, a flat list with
an explicit ``shape``.

Network file::

    {"d": 2,
     "tensors": {"X": {"shape": [2, 2], "data": [[1, 0], [0, 0], ...]}},
     "nodes": ["X", {"random": {"family": "u", "flavor": "u"}}, ...],
     "wires": [[[0, 0], [1, 0]], ...],
     "open": [[0, 1]]}

A node is a tensor name (or ``{"tensor": name}``) or a random box.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, InvalidNetworkError
from .ldoi import FactorPair, MatrixTriple
from .tensor import Network, RandomBox


def _complex_array(obj, what: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{what}: entries must be numbers or [re, im] pairs") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise InvalidArgumentError(f"{what}: complex entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if not np.all(np.isfinite(out)):
        raise InvalidArgumentError(f"{what}: entries must be finite")
    return out


def encode_array(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path} is not valid JSON: {exc}") from exc


def save_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


# -- networks -----------------------------------------------------------------


def network_from_dict(obj: dict) -> Network:
    try:
        d = int(obj["d"])
        tensors = {}
        for name, entry in obj.get("tensors", {}).items():
            shape = tuple(int(s) for s in entry["shape"])
            data = _complex_array(entry["data"], f"tensor {name!r}").reshape(-1)
            if data.size != int(np.prod(shape)):
                raise InvalidNetworkError(f"tensor {name!r}: {data.size} entries for shape {shape}")
            tensors[name] = data.reshape(shape)
        net = Network(d)
        for k, node in enumerate(obj["nodes"]):
            if isinstance(node, str):
                node = {"tensor": node}
            if "random" in node:
                r = node["random"]
                net.add_random(str(r["family"]), str(r["flavor"]))
            elif "tensor" in node:
                if node["tensor"] not in tensors:
                    raise InvalidNetworkError(f"node {k}: unknown tensor {node['tensor']!r}")
                net.add(tensors[node["tensor"]])
            else:
                raise InvalidNetworkError(f"node {k}: expected a tensor name or a random box")
        for w in obj.get("wires", []):
            a, b = w
            net.connect((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))
        net.expose(*[(int(a), int(b)) for a, b in obj.get("open", [])])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (InvalidArgumentError, InvalidNetworkError)):
            raise
        raise InvalidNetworkError(f"malformed network description: {exc!r}") from exc
    net.validate()
    return net


def network_to_dict(net: Network) -> dict:
    tensors = {}
    nodes: list = []
    for i, obj in enumerate(net.nodes):
        if isinstance(obj, RandomBox):
            nodes.append({"random": {"family": obj.family, "flavor": obj.flavor}})
        else:
            name = f"T{i}"
            tensors[name] = {"shape": list(obj.shape), "data": encode_array(obj.reshape(-1))}
            nodes.append(name)
    return {
        "d": net.d,
        "tensors": tensors,
        "nodes": nodes,
        "wires": [[list(a), list(b)] for a, b in net.wires],
        "open": [list(leg) for leg in net.open_legs],
    }


def load_network(path) -> Network:
    return network_from_dict(load_json(path))


def save_network(net: Network, path) -> None:
    save_json(network_to_dict(net), path)


# -- matrices -----------------------------------------------------------------


def _matrix(obj, what: str) -> np.ndarray:
    m = _complex_array(obj, what)
    if m.ndim != 2:
        raise InvalidArgumentError(f"{what}: expected a matrix, got shape {m.shape}")
    return m


def load_matrix(path) -> np.ndarray:
    obj = load_json(path)
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise InvalidArgumentError(f"{path}: expected an object with key 'matrix'")
    return _matrix(obj["matrix"], "matrix")


def save_matrix(m: np.ndarray, path) -> None:
    save_json({"matrix": encode_array(m)}, path)


def load_triple(path) -> MatrixTriple:
    obj = load_json(path)
    try:
        return MatrixTriple(*(_matrix(obj[k], k) for k in "ABC"))
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"{path}: expected keys 'A', 'B', 'C'") from exc


def save_triple(t: MatrixTriple, path) -> None:
    save_json({"A": encode_array(t.A), "B": encode_array(t.B), "C": encode_array(t.C)}, path)


def load_factors(path) -> FactorPair:
    obj = load_json(path)
    try:
        return FactorPair(_matrix(obj["V"], "V"), _matrix(obj["W"], "W"))
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"{path}: expected keys 'V', 'W'") from exc


def save_factors(p: FactorPair, path) -> None:
    save_json({"V": encode_array(p.V), "W": encode_array(p.W)}, path)
