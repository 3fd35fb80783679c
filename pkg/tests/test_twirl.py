import numpy as np
import pytest

from phaseavg.errors import InvalidArgumentError
from phaseavg.expectation import expect
from phaseavg.oracle import exact
from phaseavg.twirl import (
    KINDS,
    LinearMapChoi,
    apply_map,
    apply_map_partial_trace,
    choi_from_function,
    schur_multiplier,
    twirl,
    twirl_cross,
    twirl_equal,
    twirl_network,
    twirl_parallel,
)


def rand(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_map(rng, d):
    return LinearMapChoi(d, rand(rng, (d * d, d * d)))


def test_apply_map_basic_maps():
    rng = np.random.default_rng(0)
    x = rand(rng, (2, 2))
    ident = choi_from_function(lambda e: e, 2)
    assert np.abs(apply_map(ident, x) - x).max() < 1e-12
    tr = choi_from_function(lambda e: e.T, 2)
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.array_equal(tr.J, swap)
    assert np.abs(apply_map(tr, x) - x.T).max() < 1e-12
    x3 = rand(rng, (3, 3))
    dep = choi_from_function(lambda e: np.trace(e) * np.eye(3), 3)
    assert np.array_equal(dep.J, np.eye(9))
    assert np.abs(apply_map(dep, x3) - np.trace(x3) * np.eye(3)).max() < 1e-12
    with pytest.raises(InvalidArgumentError):
        apply_map(dep, x)


def test_apply_map_partial_trace_formula():
    rng = np.random.default_rng(1)
    for d in (2, 3, 4):
        m = random_map(rng, d)
        x = rand(rng, (d, d))
        assert np.abs(apply_map(m, x) - apply_map_partial_trace(m, x)).max() < 1e-12


def test_choi_round_trip():
    rng = np.random.default_rng(2)
    m = random_map(rng, 3)
    assert choi_from_function(lambda e: apply_map(m, e), 3).allclose(m)


def test_closed_form_actions():
    rng = np.random.default_rng(3)
    d = 3
    m = random_map(rng, d)
    x = rand(rng, (d, d))
    phi = lambda y: apply_map(m, y)  # noqa: E731
    got = apply_map(twirl_equal(m), x)
    assert np.abs(got - np.diag(np.diag(phi(np.diag(np.diag(x)))))).max() < 1e-12
    assert np.count_nonzero(got - np.diag(np.diag(got))) == 0
    assert np.abs(apply_map(twirl_parallel(m), x) - schur_multiplier(m) * x).max() < 1e-12
    gamma = m.tensor.transpose(0, 3, 2, 1).reshape(d * d, d * d)
    mult = np.array([[gamma[a * d + a, b * d + b] for b in range(d)] for a in range(d)])
    assert np.abs(apply_map(twirl_cross(m), x) - mult * x.T).max() < 1e-12


def test_twirl_parallel_of_identity():
    ident = choi_from_function(lambda e: e, 2)
    assert np.array_equal(schur_multiplier(ident), np.ones((2, 2)))
    assert twirl_parallel(ident).allclose(ident)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("kind", KINDS)
def test_twirls_match_engine(d, kind):
    rng = np.random.default_rng(d)
    for _ in range(5):
        m = random_map(rng, d)
        closed = twirl(m, kind).tensor
        assert np.abs(expect(twirl_network(m, kind)) - closed).max() < 1e-12
        assert np.abs(exact(twirl_network(m, kind)) - closed).max() < 1e-12
        # sign vectors give the same twirls
        assert np.abs(exact(twirl_network(m, kind, random="s")) - closed).max() < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("kind", KINDS)
def test_idempotent(d, kind):
    rng = np.random.default_rng(10 + d)
    t = twirl(random_map(rng, d), kind)
    assert np.abs(twirl(t, kind).J - t.J).max() < 1e-12


def test_bad_inputs():
    rng = np.random.default_rng(4)
    with pytest.raises(InvalidArgumentError):
        LinearMapChoi(2, np.ones((3, 3)))
    with pytest.raises(InvalidArgumentError):
        LinearMapChoi.from_matrix(np.ones((5, 5)))
    with pytest.raises(InvalidArgumentError):
        twirl(random_map(rng, 2), "diagonal")
    with pytest.raises(InvalidArgumentError):
        twirl_network(random_map(rng, 2), "equal", random="x")
