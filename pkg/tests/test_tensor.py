import numpy as np
import pytest

from phaseavg.errors import InvalidArgumentError, InvalidNetworkError, RandomBoxesPresentError
from phaseavg.tensor import (
    Network,
    as_bipartite,
    as_matrix,
    contract,
    delta_tensor,
    diag_embed,
    diag_project,
    diag_vector,
    partial_trace,
    partial_transpose,
    realign,
    transpose,
)


def rand(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_matrix_product():
    rng = np.random.default_rng(0)
    a, b = rand(rng, (3, 4)), rand(rng, (4, 2))
    net = Network(4)
    i, j = net.add(a), net.add(b)
    net.connect((i, 1), (j, 0))
    net.expose((i, 0), (j, 1))
    assert np.abs(contract(net) - a @ b).max() < 1e-12


def test_identity_loop_is_d():
    net = Network(3)
    k = net.add(np.eye(3))
    net.connect((k, 0), (k, 1))
    assert contract(net) == pytest.approx(3)


def test_trace_loop():
    rng = np.random.default_rng(1)
    a, b = rand(rng, (2, 2)), rand(rng, (2, 2))
    net = Network(2)
    i, j = net.add(a), net.add(b)
    net.connect((i, 1), (j, 0))
    net.connect((j, 1), (i, 0))
    assert abs(contract(net) - np.trace(a @ b)) < 1e-12


def test_empty_network_is_one():
    assert contract(Network(2)) == 1


def test_delta_tensor():
    assert np.array_equal(delta_tensor(2, 4), np.eye(4))
    g = delta_tensor(3, 2)
    assert np.count_nonzero(g) == 2 and g[0, 0, 0] == 1 and g[1, 1, 1] == 1
    # contracting two legs of a 4-leg delta leaves a 2-leg delta
    net = Network(3)
    k = net.add(delta_tensor(4, 3))
    net.connect((k, 1), (k, 2))
    net.expose((k, 0), (k, 3))
    assert np.array_equal(contract(net), np.eye(3))
    with pytest.raises(InvalidArgumentError):
        delta_tensor(0, 2)


def test_contract_errors():
    net = Network(2)
    a = net.add(np.ones((2, 3)))
    b = net.add(np.ones((2, 2)))
    net.connect((a, 1), (b, 0))
    net.expose((a, 0), (b, 1))
    with pytest.raises(InvalidNetworkError):
        contract(net)

    net = Network(2)
    a = net.add(np.ones((2, 2)))
    net.expose((a, 0))
    with pytest.raises(InvalidNetworkError, match="neither wired nor open"):
        contract(net)

    net = Network(2)
    a = net.add(np.ones((2, 2)))
    net.connect((a, 0), (a, 1))
    net.expose((a, 0))
    with pytest.raises(InvalidNetworkError, match="twice"):
        contract(net)

    net = Network(2)
    a = net.add(np.ones(2))
    r = net.add_random("f", "u")
    net.connect((a, 0), (r, 0))
    with pytest.raises(RandomBoxesPresentError):
        contract(net)


def test_rejects_nonfinite_and_bad_flavor():
    with pytest.raises(InvalidNetworkError):
        Network(2).add(np.array([np.nan, 1.0]))
    with pytest.raises(InvalidNetworkError):
        Network(2).add_random("f", "v")


def test_mixed_family_rejected():
    net = Network(2)
    t = net.add(np.ones((2, 2)))
    a, b = net.add_random("f", "u"), net.add_random("f", "s")
    net.connect((t, 0), (a, 0))
    net.connect((t, 1), (b, 0))
    with pytest.raises(InvalidNetworkError, match="mixes"):
        net.validate()


def test_substitute_rewires_boxes():
    net = Network(2)
    x = net.add(np.arange(4.0).reshape(2, 2))
    a, b = net.add_random("f", "u"), net.add_random("f", "ubar")
    net.connect((x, 0), (a, 0))
    net.connect((x, 1), (b, 0))
    out = net.substitute([a, b], [(delta_tensor(2, 2), [a, b])])
    assert contract(out) == pytest.approx(0 + 3)
    opened = net.substitute([a, b], [(delta_tensor(2, 2), [a, None]), (delta_tensor(2, 2), [b, None])])
    assert np.array_equal(contract(opened), np.arange(4.0).reshape(2, 2))
    with pytest.raises(InvalidNetworkError):
        net.substitute([a, b], [(delta_tensor(2, 2), [a, None])])


def test_juxtapose_is_outer_product():
    rng = np.random.default_rng(2)
    u, v = rand(rng, 3), rand(rng, 3)
    n1, n2 = Network(3), Network(3)
    n1.expose((n1.add(u), 0))
    n2.expose((n2.add(v), 0))
    assert np.abs(contract(n1.juxtapose(n2)) - np.outer(u, v)).max() < 1e-12


def test_random_diagonal_builder():
    net = Network(3)
    node = net.add_random_diagonal("f", "u")
    net.expose((node, 0), (node, 1))
    net.validate()
    assert net.output_shape == (3, 3)
    assert net.families() == {"f": {"u": [0], "ubar": [], "s": []}}


def test_bipartite_helpers():
    rng = np.random.default_rng(3)
    x = rand(rng, (3, 3, 3, 3))
    assert np.array_equal(partial_transpose(partial_transpose(x)), x)
    assert np.array_equal(as_bipartite(as_matrix(x)), x)
    a, b = rand(rng, (2, 2)), rand(rng, (2, 2))
    ab = np.kron(a, b)
    assert np.abs(partial_trace(ab) - a * np.trace(b)).max() < 1e-12
    assert np.abs(partial_trace(ab, 0) - b * np.trace(a)).max() < 1e-12
    # partial transpose acts on the second factor
    assert np.abs(as_matrix(partial_transpose(ab)) - np.kron(a, b.T)).max() < 1e-12
    # realignment of a product a (x) b is vec(a) vec(b)^T
    assert np.abs(as_matrix(realign(ab)) - np.outer(a.ravel(), b.ravel())).max() < 1e-12
    with pytest.raises(InvalidArgumentError):
        partial_trace(ab, 2)
    with pytest.raises(InvalidArgumentError):
        as_bipartite(np.ones((3, 3)))


def test_diag_helpers():
    rng = np.random.default_rng(4)
    a = rand(rng, (3, 3))
    p = diag_project(a)
    assert np.array_equal(np.diag(p), np.diag(a)) and np.count_nonzero(p - np.diag(np.diag(p))) == 0
    assert np.array_equal(diag_embed(diag_vector(a)), p)
    assert np.array_equal(transpose(a), a.T)
    with pytest.raises(InvalidArgumentError):
        diag_vector(np.ones((2, 3)))
