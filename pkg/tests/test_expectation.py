from collections import Counter

import numpy as np
import pytest

from phaseavg import combinatorics as cb
from phaseavg.errors import InvalidArgumentError, ResourceLimitError
from phaseavg.expectation import (
    build_paired,
    eval_injective,
    eval_kernel,
    expand,
    expand_s,
    expand_u,
    expect,
)
from phaseavg.generators import random_phase_network, random_sign_network
from phaseavg.oracle import exact, exact_s, exact_u
from phaseavg.tensor import Network, contract, delta_tensor, diag_project


def rand(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def conjugation(x, flavor_left="u", flavor_right="ubar", family="u"):
    """diag(v) X diag(v)^* (or diag(s) X diag(s)) with open legs (row, column)."""
    d = x.shape[0]
    net = Network(d)
    a = net.add_random_diagonal(family, flavor_left)
    k = net.add(x)
    b = net.add_random_diagonal(family, flavor_right)
    net.connect((a, 1), (k, 0))
    net.connect((k, 1), (b, 0))
    net.expose((a, 0), (b, 1))
    return net


def boxed_tensor(t, flavors, family="f"):
    net = Network(t.shape[0])
    k = net.add(t)
    for leg, flavor in enumerate(flavors):
        box = net.add_random(family, flavor)
        net.connect((k, leg), (box, 0))
    return net


def test_conjugation_gives_diagonal():
    rng = np.random.default_rng(0)
    x = rand(rng, (3, 3))
    e = expand_u(conjugation(x), "u")
    assert len(e) == 1 and e.terms[0].weight == 1
    assert np.abs(e.value() - diag_project(x)).max() < 1e-12
    net = conjugation(x, "s", "s", "o")
    assert np.abs(expect(net) - diag_project(x)).max() < 1e-12


def test_n2_weights():
    rng = np.random.default_rng(1)
    net = boxed_tensor(rand(rng, (2,) * 4), ["u", "u", "ubar", "ubar"])
    assert sorted(w for _, w in expand_u(net, "f").symbolic()) == [-1, 1, 1]


def test_n3_weights():
    rng = np.random.default_rng(2)
    net = boxed_tensor(rand(rng, (2,) * 6), ["u"] * 3 + ["ubar"] * 3)
    e = expand_u(net, "f")
    assert len(e) == 16
    assert Counter(w for _, w in e.symbolic()) == Counter({1: 6, -1: 9, 4: 1})


def test_sign_expansions():
    rng = np.random.default_rng(3)
    e = expand_s(boxed_tensor(rand(rng, (3, 3)), ["s", "s"]), "f")
    assert e.symbolic() == [("12", 1)]
    e = expand_s(boxed_tensor(rand(rng, (2,) * 4), ["s"] * 4), "f")
    assert sorted(w for _, w in e.symbolic()) == [-2, 1, 1, 1]
    net = boxed_tensor(rand(rng, (2,) * 3), ["s"] * 3)
    e = expand_s(net, "f")
    assert len(e) == 0 and expect(net) == 0


def test_mismatched_counts_vanish():
    rng = np.random.default_rng(4)
    net = boxed_tensor(rand(rng, (3, 3, 3)), ["u", "u", "ubar"])
    net.expose()
    assert len(expand_u(net, "f")) == 0
    net = Network(3)
    k = net.add(rand(rng, (3, 3)))
    box = net.add_random("f", "u")
    net.connect((k, 0), (box, 0))
    net.expose((k, 1))
    assert np.array_equal(expect(net), np.zeros(3))
    assert np.abs(exact_u(net)).max() < 1e-12


def test_absent_family_and_wrong_pairing():
    rng = np.random.default_rng(5)
    net = boxed_tensor(rand(rng, (2, 2)), ["u", "ubar"])
    with pytest.raises(InvalidArgumentError):
        expand_u(net, "g")
    with pytest.raises(InvalidArgumentError):
        build_paired(net, "f", cb.UBP.parse("12/12"))
    with pytest.raises(InvalidArgumentError):
        build_paired(net, "f", cb.SetPartition.parse("12"))
    with pytest.raises(InvalidArgumentError):
        expand_s(net, "f")


def test_build_paired_example_block_structure():
    """UBP (12|3|4 / 23|1|4) on four u and four ubar boxes."""
    rng = np.random.default_rng(6)
    d = 2
    t = rand(rng, (d,) * 8)
    net = boxed_tensor(t, ["u"] * 4 + ["ubar"] * 4)
    x = cb.UBP.parse("12|3|4/23|1|4")
    paired = build_paired(net, "f", x)
    arities = sorted(node.ndim for node in paired.nodes[1:])
    assert arities == [2, 2, 4]
    # brute force: legs tied as u1=u2=ubar2=ubar3, u3=ubar1, u4=ubar4
    ref = sum(t[a, a, b, c, b, a, a, c] for a in range(d) for b in range(d) for c in range(d))
    assert abs(contract(paired) - ref) < 1e-12


def test_build_paired_sign_case():
    rng = np.random.default_rng(7)
    t = rand(rng, (3,) * 4)
    net = boxed_tensor(t, ["s"] * 4)
    paired = build_paired(net, "f", cb.SetPartition.parse("12|34"))
    assert [n.ndim for n in paired.nodes[1:]] == [2, 2]
    assert abs(contract(paired) - np.einsum("aabb->", t)) < 1e-12


def test_injective_vanishes_when_too_many_blocks():
    rng = np.random.default_rng(8)
    net = boxed_tensor(rand(rng, (2,) * 6), ["u"] * 3 + ["ubar"] * 3)
    x = cb.UBP.parse("1|2|3/1|2|3")
    assert np.array_equal(eval_injective(net, "f", x), 0)
    net1 = boxed_tensor(rand(rng, (1,) * 4), ["u", "u", "ubar", "ubar"])
    assert np.array_equal(eval_injective(net1, "f", cb.UBP.parse("1|2/1|2")), 0)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_sum_of_injective_is_expectation(n, d):
    rng = np.random.default_rng(10 * n + d)
    net = random_phase_network(rng, d, n)
    total = sum(eval_injective(net, "f", x) for x in cb.enumerate_ubps(n))
    assert np.abs(total - expand_u(net, "f").value()).max() < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_moebius_consistency(n):
    rng = np.random.default_rng(20 + n)
    net = random_phase_network(rng, 3, n)
    ubps = cb.enumerate_ubps(n)
    inj = {x: eval_injective(net, "f", x) for x in ubps}
    for x in ubps:
        coarser = sum(inj[y] for y in ubps if cb.refines_ubp(x, y))
        assert np.abs(contract(build_paired(net, "f", x)) - coarser).max() < 1e-10
        assert np.abs(eval_kernel(net, "f", x) - coarser).max() < 1e-10


def test_sign_injective_sum():
    rng = np.random.default_rng(30)
    for m in (2, 4):
        net = random_sign_network(rng, 3, m)
        total = sum(eval_injective(net, "f", a) for a in cb.enumerate_even_partitions(m))
        assert np.abs(total - expand_s(net, "f").value()).max() < 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_oracle_equivalence_random(seed):
    rng = np.random.default_rng(seed)
    d = 2 + seed % 3
    net = random_phase_network(rng, d, 1 + seed % 3)
    assert np.abs(expect(net) - exact_u(net)).max() < 1e-10
    net = random_sign_network(rng, d, 2 * (1 + seed % 2))
    assert np.abs(expect(net) - exact_s(net)).max() < 1e-10


def test_two_families_product():
    rng = np.random.default_rng(40)
    d = 3
    x = rand(rng, (d, d, d, d))
    net = Network(d)
    k = net.add(x)
    legs = []
    for leg, (fam, flavor) in enumerate([("u", "u"), ("v", "ubar"), ("u", "ubar"), ("v", "u")]):
        node = net.add_random_diagonal(fam, flavor)
        net.connect((k, leg), (node, 0))
        legs.append((node, 1))
    net.expose(*legs)
    e = expand(net)
    assert len(e) == 1 and e.terms[0].weight == 1
    assert set(e.terms[0].assignment) == {"u", "v"}
    assert np.abs(e.value() - exact(net)).max() < 1e-12


def test_mixed_phase_and_sign_families():
    rng = np.random.default_rng(41)
    d = 2
    net = Network(d)
    k = net.add(rand(rng, (d,) * 6))
    for leg, (fam, flavor) in enumerate([("u", "u"), ("u", "ubar"), ("o", "s"), ("o", "s"), ("o", "s"), ("o", "s")]):
        box = net.add_random(fam, flavor)
        net.connect((k, leg), (box, 0))
    e = expand(net)
    assert len(e) == 4
    assert sorted(t.weight for t in e.terms) == [-2, 1, 1, 1]
    assert abs(e.value() - exact(net)) < 1e-12


def test_budget():
    rng = np.random.default_rng(42)
    net = boxed_tensor(rand(rng, (2,) * 6), ["u"] * 3 + ["ubar"] * 3)
    with pytest.raises(ResourceLimitError, match="f: 16"):
        expand(net, budget=10)


def test_global_phase_invariance():
    rng = np.random.default_rng(43)
    d = 3
    t = rand(rng, (d,) * 4)
    net = boxed_tensor(t, ["u", "u", "ubar", "ubar"])
    # absorbing a fixed diagonal phase into every leg leaves the average unchanged
    w = np.exp(2j * np.pi * rng.random(d))
    t2 = np.einsum("abcd,a,b,c,d->abcd", t, w, w, w.conj(), w.conj())
    net2 = boxed_tensor(t2, ["u", "u", "ubar", "ubar"])
    assert abs(expect(net) - expect(net2)) < 1e-12


def test_deterministic_summation():
    rng = np.random.default_rng(44)
    net = random_phase_network(rng, 3, 3)
    assert np.array_equal(expect(net), expect(net))


def test_symbolic_multi_family_labels():
    rng = np.random.default_rng(45)
    net = Network(2)
    k = net.add(rand(rng, (2,) * 4))
    for leg, (fam, flavor) in enumerate([("a", "u"), ("a", "ubar"), ("b", "s"), ("b", "s")]):
        box = net.add_random(fam, flavor)
        net.connect((k, leg), (box, 0))
    assert expand(net).symbolic() == [("a=1/1; b=12", 1)]
