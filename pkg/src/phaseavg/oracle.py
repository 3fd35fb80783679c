"""Reference evaluators used to check the pairing expansions.

``exact_u`` averages over every assignment of (n+1)-th roots of unity to the
d coordinates, which reproduces all phase moments up to degree n.
``exact_s`` averages over all 2^d sign vectors.  ``monte_carlo`` samples.

Seeding for ``monte_carlo``: ``SeedSequence(seed)`` is spawned into one child
per chunk; each chunk child is spawned again into one stream per random
family (families in sorted name order), each driving a ``PCG64`` generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError
from .expectation import open_family
from .tensor import Network, contract

MAX_SUPPORT = 10**6
# cap on (vectors in a chunk) * (entries of the moment tensor)
_CHUNK_ENTRIES = 2**21


def _support_u(d: int, degree: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(degree + 1) / (degree + 1))
    size = (degree + 1) ** d
    if size > MAX_SUPPORT:
        raise ResourceLimitError(f"design support ({degree}+1)^{d} = {size} exceeds {MAX_SUPPORT}")
    return np.array(list(product(roots, repeat=d)), dtype=complex).reshape(size, d)


def _support_s(d: int) -> np.ndarray:
    if 2**d > MAX_SUPPORT:
        raise ResourceLimitError(f"sign support 2^{d} exceeds {MAX_SUPPORT}")
    return np.array(list(product((1.0, -1.0), repeat=d)), dtype=complex).reshape(2**d, d)


def _slots_and_conj(net: Network, family: str) -> list[bool]:
    """For each slot of ``open_family``, whether the box is conjugated."""
    boxes = net.families()[family]
    if net.family_kind(family) == "s":
        return [False] * len(boxes["s"])
    return [False] * len(boxes["u"]) + [True] * len(boxes["ubar"])


def _moment_tensor(support: np.ndarray, conj: list[bool]) -> np.ndarray:
    """Mean over support rows w of the outer product of w or conj(w) per slot."""
    n, d = support.shape
    k = len(conj)
    total = np.zeros(d**k, dtype=complex)
    step = max(1, _CHUNK_ENTRIES // max(1, d**k))
    for start in range(0, n, step):
        w = support[start : start + step]
        acc = np.ones((len(w), 1), dtype=complex)
        for c in conj:
            f = w.conj() if c else w
            acc = (acc[:, :, None] * f[:, None, :]).reshape(len(w), -1)
        total += acc.sum(axis=0)
    return (total / n).reshape((d,) * k)


def _average_family(net: Network, family: str, support: np.ndarray) -> Network:
    conj = _slots_and_conj(net, family)
    opened = open_family(net, family)
    k = len(conj)
    if k == 0:
        return opened
    moment = _moment_tensor(support, conj)
    # the k slot legs are the last open legs; close them onto the moment tensor
    slots = opened.open_legs[-k:]
    opened.open_legs = opened.open_legs[:-k]
    node = opened.add(moment)
    for pos, leg in enumerate(slots):
        opened.connect(leg, (node, pos))
    return opened


def _check_family(net: Network, family: str, kind: str) -> None:
    fams = net.families()
    if family not in fams:
        raise InvalidArgumentError(f"family {family!r} does not occur in the network")
    if net.family_kind(family) != kind:
        raise InvalidArgumentError(f"family {family!r} is not a {'phase' if kind == 'u' else 'sign'} family")


def _degree(net: Network, family: str) -> int:
    boxes = net.families()[family]
    return max(len(boxes["u"]), len(boxes["ubar"]))


def design_average_u(net: Network, family: str, degree: int | None = None) -> Network:
    """Replace a phase family by its exact moment tensor over the root-of-unity design."""
    _check_family(net, family, "u")
    need = _degree(net, family)
    if degree is None:
        degree = need
    if degree < need:
        raise InvalidArgumentError(f"design degree {degree} below family degree {need}")
    return _average_family(net, family, _support_u(net.d, max(degree, 1)))


def design_average_s(net: Network, family: str) -> Network:
    """Replace a sign family by its exact moment tensor over all sign vectors."""
    _check_family(net, family, "s")
    return _average_family(net, family, _support_s(net.d))


def exact_u(net: Network, family: str | None = None, degree: int | None = None) -> np.ndarray:
    """Exact phase average of one family (default: the only family) and contraction.

    Any other random family must already be absent.
    """
    net.validate()
    if family is None:
        fams = list(net.families())
        if not fams:
            return contract(net)
        if len(fams) != 1:
            raise InvalidArgumentError("several families present; name one or use exact()")
        family = fams[0]
    return contract(design_average_u(net, family, degree))


def exact_s(net: Network, family: str | None = None) -> np.ndarray:
    """Exact sign average of one family (default: the only family) and contraction."""
    net.validate()
    if family is None:
        fams = list(net.families())
        if not fams:
            return contract(net)
        if len(fams) != 1:
            raise InvalidArgumentError("several families present; name one or use exact()")
        family = fams[0]
    return contract(design_average_s(net, family))


def exact(net: Network) -> np.ndarray:
    """Exact average over every family, each by its own design."""
    net.validate()
    current = net
    for fam in sorted(net.families()):
        if current.family_kind(fam) == "s":
            current = design_average_s(current, fam)
        else:
            current = design_average_u(current, fam)
    return contract(current)


@dataclass(frozen=True)
class SampleConfig:
    seed: int = 0
    samples: int = 10**5
    chunk_size: int = 10**4

    def __post_init__(self):
        if self.samples < 1:
            raise InvalidArgumentError("samples must be at least 1")
        if self.chunk_size < 1:
            raise InvalidArgumentError("chunk_size must be at least 1")


def _open_all(net: Network) -> tuple[Network, list[tuple[str, bool]]]:
    """Open every random box; returns the network and (family, conjugated) per slot."""
    slots: list[tuple[str, bool]] = []
    current = net
    for fam in sorted(net.families()):
        conj = _slots_and_conj(current, fam)
        current = open_family(current, fam)
        slots.extend((fam, c) for c in conj)
    return current, slots


def _draw(rng: np.random.Generator, kind: str, size: int, d: int) -> np.ndarray:
    if kind == "s":
        return rng.choice(np.array([-1.0, 1.0]), size=(size, d)).astype(complex)
    return np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=(size, d)))


def monte_carlo(net: Network, cfg: SampleConfig) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and per-entry standard error of the network value."""
    if cfg.samples < 2:
        raise InvalidArgumentError("monte_carlo needs at least 2 samples")
    net.validate()
    families = sorted(net.families())
    kinds = {fam: net.family_kind(fam) for fam in families}
    core_net, slots = _open_all(net)
    core = contract(core_net)
    nout = core.ndim - len(slots)
    out_shape = core.shape[:nout]
    if not slots:
        return core, np.zeros(out_shape)

    d = net.d
    n_chunks = -(-cfg.samples // cfg.chunk_size)
    chunk_seeds = np.random.SeedSequence(cfg.seed).spawn(n_chunks)
    total = np.zeros(out_shape, dtype=complex)
    total_sq = np.zeros(out_shape)
    sample_label = nout + len(slots)
    out_labels = [sample_label] + list(range(nout))
    core_labels = list(range(nout + len(slots)))
    for c, ss in enumerate(chunk_seeds):
        size = min(cfg.chunk_size, cfg.samples - c * cfg.chunk_size)
        streams = dict(zip(families, ss.spawn(len(families))))
        draws = {fam: _draw(np.random.Generator(np.random.PCG64(streams[fam])), kinds[fam], size, d) for fam in families}
        operands: list = [core, core_labels]
        for pos, (fam, conj) in enumerate(slots):
            v = draws[fam].conj() if conj else draws[fam]
            operands += [v, [sample_label, nout + pos]]
        values = np.einsum(*operands, out_labels, optimize="greedy")
        total += values.sum(axis=0)
        total_sq += (np.abs(values) ** 2).sum(axis=0)
    n = cfg.samples
    mean = total / n
    var = np.maximum(total_sq - n * np.abs(mean) ** 2, 0.0) / (n - 1)
    return mean, np.sqrt(var / n)
