"""Dense tensors and tensor networks.

Tensors are plain complex ``numpy`` arrays, one axis per leg.  Bipartite
matrices in M_d (x) M_d are shape ``(d, d, d, d)`` with

    X[i, k, j, l] = <e_i (x) e_k | X | e_j (x) e_l>

so rows are ``(i, k)`` and columns ``(j, l)``; ``X.reshape(d*d, d*d)`` gives
the usual Kronecker-ordered matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import InvalidArgumentError, InvalidNetworkError, RandomBoxesPresentError

FLAVORS = ("u", "ubar", "s")

Leg = tuple[int, int]


@dataclass(frozen=True)
class RandomBox:
    """A one-leg node holding a random vector of a named family.

    ``flavor`` is ``"u"`` (phase vector), ``"ubar"`` (its conjugate) or ``"s"``
    (sign vector).
    """

    family: str
    flavor: str

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise InvalidNetworkError(f"unknown flavor {self.flavor!r}")


Node = Union[np.ndarray, RandomBox]


@dataclass
class Network:
    """Tensor nodes and random boxes joined by wires.

    A leg is addressed as ``(node index, leg index)``.  Every random box has
    a single leg of dimension ``d``.
    """

    d: int
    nodes: list[Node] = field(default_factory=list)
    wires: list[tuple[Leg, Leg]] = field(default_factory=list)
    open_legs: list[Leg] = field(default_factory=list)

    def add(self, tensor) -> int:
        arr = np.asarray(tensor, dtype=complex)
        if not np.all(np.isfinite(arr)):
            raise InvalidNetworkError("tensor entries must be finite")
        self.nodes.append(arr)
        return len(self.nodes) - 1

    def add_random(self, family: str, flavor: str) -> int:
        self.nodes.append(RandomBox(str(family), flavor))
        return len(self.nodes) - 1

    def add_random_diagonal(self, family: str, flavor: str) -> int:
        """Add ``diag(v)`` for a random box ``v``; returns the node whose legs 0, 1 are free."""
        box = self.add_random(family, flavor)
        node = self.add(delta_tensor(3, self.d))
        self.connect((node, 2), (box, 0))
        return node

    def connect(self, a: Leg, b: Leg) -> None:
        self.wires.append((tuple(a), tuple(b)))

    def expose(self, *legs: Leg) -> None:
        self.open_legs.extend(tuple(leg) for leg in legs)

    def copy(self) -> Network:
        return Network(self.d, list(self.nodes), list(self.wires), list(self.open_legs))

    def leg_dims(self, node: int) -> tuple[int, ...]:
        obj = self.nodes[node]
        if isinstance(obj, RandomBox):
            return (self.d,)
        return obj.shape

    def leg_dim(self, leg: Leg) -> int:
        return self.leg_dims(leg[0])[leg[1]]

    @property
    def output_shape(self) -> tuple[int, ...]:
        return tuple(self.leg_dim(leg) for leg in self.open_legs)

    def random_nodes(self) -> list[int]:
        return [i for i, obj in enumerate(self.nodes) if isinstance(obj, RandomBox)]

    def families(self) -> dict[str, dict[str, list[int]]]:
        """Map family -> flavor -> node indices, in node order."""
        out: dict[str, dict[str, list[int]]] = {}
        for i, obj in enumerate(self.nodes):
            if isinstance(obj, RandomBox):
                fam = out.setdefault(obj.family, {f: [] for f in FLAVORS})
                fam[obj.flavor].append(i)
        return out

    def family_kind(self, family: str) -> str:
        """``"u"`` for phase families, ``"s"`` for sign families."""
        fams = self.families()
        if family not in fams:
            raise InvalidArgumentError(f"family {family!r} does not occur in the network")
        return "s" if fams[family]["s"] else "u"

    def validate(self) -> None:
        if self.d < 1:
            raise InvalidNetworkError("dimension d must be positive")
        seen: set[Leg] = set()
        for a, b in self.wires:
            for leg in (a, b):
                self._check_leg(leg, seen)
            if self.leg_dim(a) != self.leg_dim(b):
                raise InvalidNetworkError(
                    f"wire {a}-{b} joins legs of dimension {self.leg_dim(a)} and {self.leg_dim(b)}"
                )
        for leg in self.open_legs:
            self._check_leg(leg, seen)
        for i, obj in enumerate(self.nodes):
            for k in range(len(self.leg_dims(i))):
                if (i, k) not in seen:
                    raise InvalidNetworkError(f"leg {(i, k)} is neither wired nor open")
        for name, fl in self.families().items():
            if fl["s"] and (fl["u"] or fl["ubar"]):
                raise InvalidNetworkError(f"family {name!r} mixes sign and phase boxes")

    def _check_leg(self, leg: Leg, seen: set[Leg]) -> None:
        node, k = leg
        if not (0 <= node < len(self.nodes)) or not (0 <= k < len(self.leg_dims(node))):
            raise InvalidNetworkError(f"leg {leg} does not exist")
        if leg in seen:
            raise InvalidNetworkError(f"leg {leg} is used twice")
        seen.add(leg)

    def juxtapose(self, other: Network) -> Network:
        """Disjoint union; open legs of ``self`` come first."""
        if other.d != self.d:
            raise InvalidNetworkError("networks have different dimensions")
        off = len(self.nodes)
        shift = lambda leg: (leg[0] + off, leg[1])  # noqa: E731
        return Network(
            self.d,
            self.nodes + other.nodes,
            self.wires + [(shift(a), shift(b)) for a, b in other.wires],
            self.open_legs + [shift(leg) for leg in other.open_legs],
        )

    def substitute(self, boxes: Iterable[int], inserts: Iterable[tuple[np.ndarray, list]]) -> Network:
        """Replace one-leg nodes by new tensors.

        Each insert is ``(tensor, owners)`` with one owner per tensor leg: a
        node index from ``boxes`` (that leg takes over the box's single leg)
        or ``None`` (the leg is appended to the open legs).  Every box must be
        owned exactly once.
        """
        boxes = set(boxes)
        keep = [i for i in range(len(self.nodes)) if i not in boxes]
        renum = {old: new for new, old in enumerate(keep)}
        out = Network(self.d, [self.nodes[i] for i in keep])
        takeover: dict[int, Leg] = {}
        extra_open: list[Leg] = []
        for tensor, owners in inserts:
            node = out.add(tensor)
            if len(owners) != out.nodes[node].ndim:
                raise InvalidNetworkError("one owner per leg is required")
            for pos, owner in enumerate(owners):
                if owner is None:
                    extra_open.append((node, pos))
                elif owner in takeover or owner not in boxes:
                    raise InvalidNetworkError(f"node {owner} cannot be substituted here")
                else:
                    takeover[owner] = (node, pos)
        if set(takeover) != boxes:
            raise InvalidNetworkError("every substituted node needs a replacement leg")

        def move(leg: Leg) -> Leg:
            if leg[0] in boxes:
                return takeover[leg[0]]
            return (renum[leg[0]], leg[1])

        out.wires = [(move(a), move(b)) for a, b in self.wires]
        out.open_legs = [move(leg) for leg in self.open_legs] + extra_open
        return out


def delta_tensor(arity: int, d: int) -> np.ndarray:
    """Copy tensor: 1 where all ``arity`` indices agree, else 0."""
    if arity < 1 or d < 1:
        raise InvalidArgumentError("arity and dimension must be positive")
    out = np.zeros((d,) * arity, dtype=complex)
    idx = np.arange(d)
    out[(idx,) * arity] = 1.0
    return out


_MAX_LABELS = 52


def contract(net: Network) -> np.ndarray:
    """Sum over all wired indices; the result has one axis per open leg."""
    if net.random_nodes():
        raise RandomBoxesPresentError("network holds random boxes; expand or average them first")
    net.validate()
    labels: dict[Leg, int] = {}
    for w, (a, b) in enumerate(net.wires):
        labels[a] = labels[b] = w
    nw = len(net.wires)
    for o, leg in enumerate(net.open_legs):
        labels[leg] = nw + o
    if nw + len(net.open_legs) > _MAX_LABELS:
        raise InvalidNetworkError(f"network needs more than {_MAX_LABELS} indices")

    operands: list = []
    for i, arr in enumerate(net.nodes):
        operands.append(arr)
        operands.append([labels[(i, k)] for k in range(arr.ndim)])
    out_labels = [nw + o for o in range(len(net.open_legs))]
    if not net.nodes:
        return np.array(1.0 + 0j)
    return np.asarray(np.einsum(*operands, out_labels, optimize="greedy"), dtype=complex)


# -- matrix utilities ---------------------------------------------------------


def _square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {a.shape}")
    return a


def _bipartite(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim == 2:
        d = int(round(np.sqrt(x.shape[0])))
        if x.shape != (d * d, d * d):
            raise InvalidArgumentError(f"shape {x.shape} is not (d^2, d^2)")
        return x.reshape(d, d, d, d)
    if x.ndim != 4 or len(set(x.shape)) != 1:
        raise InvalidArgumentError(f"bipartite tensor must be (d, d, d, d), got {x.shape}")
    return x


def as_bipartite(x: np.ndarray) -> np.ndarray:
    """Accept a ``(d^2, d^2)`` matrix or ``(d, d, d, d)`` tensor; return the tensor."""
    return _bipartite(x)


def as_matrix(x: np.ndarray) -> np.ndarray:
    x = _bipartite(x)
    d = x.shape[0]
    return x.reshape(d * d, d * d)


def transpose(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise InvalidArgumentError("transpose expects a matrix")
    return a.T


def partial_transpose(x: np.ndarray) -> np.ndarray:
    """Transpose on the second factor: ``X^G[i, k, j, l] = X[i, l, j, k]``."""
    return _bipartite(x).transpose(0, 3, 2, 1)


def partial_trace(x: np.ndarray, subsystem: int = 1) -> np.ndarray:
    """Trace out factor ``subsystem`` (0 or 1) of a bipartite tensor."""
    x = _bipartite(x)
    if subsystem == 1:
        return np.einsum("ikjk->ij", x)
    if subsystem == 0:
        return np.einsum("ikil->kl", x)
    raise InvalidArgumentError("subsystem must be 0 or 1")


def realign(x: np.ndarray) -> np.ndarray:
    """Realignment ``e_i e_j* (x) e_k e_l*  ->  e_i e_k* (x) e_j e_l*``."""
    return _bipartite(x).transpose(0, 2, 1, 3)


def diag_vector(a: np.ndarray) -> np.ndarray:
    return np.diagonal(_square(a)).copy()


def diag_embed(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1:
        raise InvalidArgumentError("diag_embed expects a vector")
    return np.diag(v)


def diag_project(a: np.ndarray) -> np.ndarray:
    """Zero the off-diagonal entries."""
    return np.diag(np.diagonal(_square(a)))
