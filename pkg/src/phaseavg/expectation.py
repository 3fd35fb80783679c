"""Averages of networks over random phase and sign vectors.

A phase family with n ``u`` boxes and n ``ubar`` boxes averages to a sum over
uniform block permutations of [n]; a sign family with m boxes averages to a
sum over even partitions of [m].  Each term rewires the boxes' legs into copy
tensors and carries an exact integer weight.

Boxes are numbered by node order: the k-th ``u`` box of a family is element
k of the top row of a UBP, the k-th ``ubar`` box element k of the bottom row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Union

import numpy as np

from . import combinatorics as cb
from .errors import InvalidArgumentError, ResourceLimitError
from .tensor import Network, contract, delta_tensor

Pairing = Union[cb.UniformBlockPermutation, cb.SetPartition]

DEFAULT_BUDGET = 10**6


@dataclass
class Term:
    assignment: dict[str, Pairing]
    weight: int
    network: Network

    def label(self) -> str:
        if len(self.assignment) == 1:
            return str(next(iter(self.assignment.values())))
        return "; ".join(f"{fam}={p}" for fam, p in sorted(self.assignment.items()))


@dataclass
class PairingExpansion:
    """Weighted list of deterministic networks whose sum is the average."""

    output_shape: tuple[int, ...]
    terms: list[Term] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.terms)

    def value(self) -> np.ndarray:
        """Weighted sum of the contracted terms, accumulated in term order."""
        total = np.zeros(self.output_shape, dtype=complex)
        for term in self.terms:
            total = total + term.weight * contract(term.network)
        return total

    def symbolic(self) -> list[tuple[str, int]]:
        """``(pairing text, weight)`` pairs sorted by text."""
        return sorted((t.label(), t.weight) for t in self.terms)


def _family_boxes(net: Network, family: str) -> dict[str, list[int]]:
    fams = net.families()
    if family not in fams:
        raise InvalidArgumentError(f"family {family!r} does not occur in the network")
    return fams[family]


def _groups(net: Network, family: str, pairing: Pairing) -> list[list[int]]:
    """Box node indices merged by each block of ``pairing``."""
    boxes = _family_boxes(net, family)
    if net.family_kind(family) == "u":
        if not isinstance(pairing, cb.UniformBlockPermutation):
            raise InvalidArgumentError("phase families are paired by uniform block permutations")
        us, ubars = boxes["u"], boxes["ubar"]
        if not (len(us) == len(ubars) == pairing.n):
            raise InvalidArgumentError(
                f"pairing of order {pairing.n} does not match {len(us)} u / {len(ubars)} ubar boxes"
            )
        return [[us[x] for x in a] + [ubars[y] for y in b] for a, b in pairing.pairs()]
    if isinstance(pairing, cb.UniformBlockPermutation) or not pairing.is_even:
        raise InvalidArgumentError("sign families are paired by even partitions")
    ss = boxes["s"]
    if len(ss) != pairing.n:
        raise InvalidArgumentError(f"pairing of order {pairing.n} does not match {len(ss)} s boxes")
    return [[ss[x] for x in b] for b in pairing.blocks]


def build_paired(net: Network, family: str, pairing: Pairing) -> Network:
    """Remove the family's boxes and join each block's legs with one copy tensor."""
    groups = _groups(net, family, pairing)
    inserts = [(delta_tensor(len(g), net.d), g) for g in groups]
    return net.substitute([b for g in groups for b in g], inserts)


def _box_slots(net: Network, family: str) -> list[int]:
    boxes = _family_boxes(net, family)
    return boxes["s"] if net.family_kind(family) == "s" else boxes["u"] + boxes["ubar"]


def open_family(net: Network, family: str) -> Network:
    """Remove the family's boxes, leaving their legs open after the existing ones.

    Slots come in the order ``u`` boxes then ``ubar`` boxes (phase) or ``s``
    boxes (sign), each in node order.
    """
    slots = _box_slots(net, family)
    eye = delta_tensor(2, net.d)
    return net.substitute(slots, [(eye, [b, None]) for b in slots])


def _slot_labels(net: Network, family: str, pairing: Pairing) -> tuple[list[int], int]:
    groups = _groups(net, family, pairing)
    where = {b: k for k, g in enumerate(groups) for b in g}
    return [where[b] for b in _box_slots(net, family)], len(groups)


def _sum_over_labelings(net: Network, family: str, pairing: Pairing, injective: bool) -> np.ndarray:
    labels, k = _slot_labels(net, family, pairing)
    core = contract(open_family(net, family))
    nslots = len(labels)
    nout = core.ndim - nslots
    d = net.d
    if injective:
        if k > d:
            return np.zeros(core.shape[:nout], dtype=complex)
        assign = np.array(list(permutations(range(d), k)), dtype=int)
    else:
        assign = np.array(list(product(range(d), repeat=k)), dtype=int)
    idx = assign[:, labels]
    moved = np.moveaxis(core, list(range(nout, core.ndim)), list(range(nslots)))
    return moved[tuple(idx.T)].sum(axis=0)


def eval_injective(net: Network, family: str, pairing: Pairing) -> np.ndarray:
    """Index sum where distinct blocks carry distinct index values."""
    return _sum_over_labelings(net, family, pairing, injective=True)


def eval_kernel(net: Network, family: str, pairing: Pairing) -> np.ndarray:
    """Index sum over all labelings constant on blocks (the paired diagram, by enumeration)."""
    return _sum_over_labelings(net, family, pairing, injective=False)


def _expansion_size(net: Network, family: str) -> int:
    boxes = _family_boxes(net, family)
    if net.family_kind(family) == "u":
        n, m = len(boxes["u"]), len(boxes["ubar"])
        return 0 if n != m else cb.count_ubps(n)
    m = len(boxes["s"])
    return 0 if m % 2 else cb.count_even_partitions(m)


def _family_pairings(net: Network, family: str) -> list[tuple[Pairing, int]]:
    boxes = _family_boxes(net, family)
    if net.family_kind(family) == "u":
        n, m = len(boxes["u"]), len(boxes["ubar"])
        if n != m:
            return []
        if n > cb.MAX_UBP_N:
            raise InvalidArgumentError(f"family {family!r} has {n} u boxes; at most {cb.MAX_UBP_N} supported")
        return [(x, cb.cf_u(x)) for x in cb.enumerate_ubps(n)]
    m = len(boxes["s"])
    if m % 2:
        return []
    if m > cb.MAX_PARTITION_N:
        raise InvalidArgumentError(f"family {family!r} has {m} s boxes; at most {cb.MAX_PARTITION_N} supported")
    return [(a, cb.cf_pi(a)) for a in cb.enumerate_even_partitions(m)]


def expand(net: Network, families: list[str] | None = None, budget: int = DEFAULT_BUDGET) -> PairingExpansion:
    """Expand the listed families (default: all) into one product expansion."""
    net.validate()
    if families is None:
        families = sorted(net.families())
    sizes = {fam: _expansion_size(net, fam) for fam in families}
    total = math.prod(sizes.values())
    if total > budget:
        detail = ", ".join(f"{fam}: {size}" for fam, size in sizes.items())
        raise ResourceLimitError(f"expansion has {total} terms (budget {budget}); family sizes {detail}")
    out = PairingExpansion(net.output_shape)
    if total == 0:
        return out
    per_family = [_family_pairings(net, fam) for fam in families]
    for combo in product(*per_family):
        current = net
        weight = 1
        for fam, (pairing, w) in zip(families, combo):
            current = build_paired(current, fam, pairing)
            weight *= w
        out.terms.append(Term(dict(zip(families, (p for p, _ in combo))), weight, current))
    return out


def expand_u(net: Network, family: str, budget: int = DEFAULT_BUDGET) -> PairingExpansion:
    if net.family_kind(family) != "u":
        raise InvalidArgumentError(f"family {family!r} is a sign family")
    return expand(net, [family], budget)


def expand_s(net: Network, family: str, budget: int = DEFAULT_BUDGET) -> PairingExpansion:
    if net.family_kind(family) != "s":
        raise InvalidArgumentError(f"family {family!r} is a phase family")
    return expand(net, [family], budget)


def expect(net: Network, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Average over every random family in the network."""
    if not net.random_nodes():
        return contract(net)
    return expand(net, budget=budget).value()
