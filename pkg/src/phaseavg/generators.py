"""Random networks and matrices for property tests and the acceptance suite."""

from __future__ import annotations

import numpy as np

from .tensor import Network


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_network(
    rng: np.random.Generator,
    d: int,
    flavors: list[str],
    family: str = "f",
    max_tensors: int = 3,
    max_open: int = 2,
    max_wires: int = 2,
    box_wire_prob: float = 0.1,
) -> Network:
    """Random tensors carrying one random box per entry of ``flavors``.

    Box legs, a few internal wires (including self-traces) and at most
    ``max_open`` open legs are spread over 1..``max_tensors`` dense tensors.
    With probability ``box_wire_prob`` a ``u`` box is wired straight to a
    ``ubar`` box (or two ``s`` boxes to each other).  Node order is shuffled
    so boxes and tensors interleave.
    """
    flavors = list(flavors)
    n_open = int(rng.integers(0, max_open + 1))
    n_wires = int(rng.integers(0, max_wires + 1))

    direct: list[tuple[int, int]] = []
    if len(flavors) >= 2 and rng.random() < box_wire_prob:
        order = list(rng.permutation(len(flavors)))
        first = order[0]
        want = "s" if flavors[first] == "s" else ("ubar" if flavors[first] == "u" else "u")
        partner = next((k for k in order[1:] if flavors[k] == want), None)
        if partner is not None:
            direct.append((int(first), int(partner)))
    paired = {k for pair in direct for k in pair}
    tensor_boxes = [k for k in range(len(flavors)) if k not in paired]

    n_legs = len(tensor_boxes) + n_open + 2 * n_wires
    if n_legs == 0:
        n_open = 1
        n_legs = 1
    n_tensors = int(rng.integers(1, min(max_tensors, n_legs) + 1))
    # every tensor gets at least one leg
    owner = np.concatenate([np.arange(n_tensors), rng.integers(0, n_tensors, size=n_legs - n_tensors)])
    rng.shuffle(owner)
    ranks = np.bincount(owner, minlength=n_tensors)

    # node layout: tensors and boxes in shuffled order
    kinds = [("t", t) for t in range(n_tensors)] + [("b", k) for k in range(len(flavors))]
    perm = rng.permutation(len(kinds))
    net = Network(d)
    where: dict[tuple[str, int], int] = {}
    for p in perm:
        kind, idx = kinds[p]
        if kind == "t":
            where[(kind, idx)] = net.add(random_complex(rng, (d,) * int(ranks[idx])))
        else:
            where[(kind, idx)] = net.add_random(family, flavors[idx])

    next_leg = [0] * n_tensors
    legs = []
    for t in owner:
        legs.append((where[("t", int(t))], next_leg[t]))
        next_leg[t] += 1
    order = rng.permutation(len(legs))
    legs = [legs[i] for i in order]

    pos = 0
    for k in tensor_boxes:
        net.connect(legs[pos], (where[("b", k)], 0))
        pos += 1
    for a, b in direct:
        net.connect((where[("b", a)], 0), (where[("b", b)], 0))
    opened = legs[pos : pos + n_open]
    pos += n_open
    while pos < len(legs):
        net.connect(legs[pos], legs[pos + 1])
        pos += 2
    net.expose(*opened)
    net.validate()
    return net


def random_phase_network(rng: np.random.Generator, d: int, n: int, **kw) -> Network:
    """``n`` u boxes and ``n`` ubar boxes of one family."""
    return random_network(rng, d, ["u"] * n + ["ubar"] * n, **kw)


def random_sign_network(rng: np.random.Generator, d: int, m: int, **kw) -> Network:
    return random_network(rng, d, ["s"] * m, **kw)


def random_factor_pair(rng: np.random.Generator, d: int, dprime: int):
    from .ldoi import FactorPair

    return FactorPair(random_complex(rng, (d, dprime)), random_complex(rng, (d, dprime)))
