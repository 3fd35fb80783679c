"""Diagonal twirls of linear maps M_d -> M_d, on Choi matrices.

The Choi matrix is J = sum_ij Phi(e_i e_j^*) (x) e_i e_j^*; as a bipartite
tensor ``J4[a, i, b, j] = Phi(E_ij)[a, b]``.  With U = diag(u), V = diag(v)
for independent random phase vectors:

    equal:     X -> E U Phi(V^* X V) U^*
    parallel:  X -> E U Phi(U^* X V^*) V
    cross:     X -> E U Phi(V^* X U^*) V
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .tensor import Network, _bipartite, _square

KINDS = ("equal", "parallel", "cross")


@dataclass
class LinearMapChoi:
    d: int
    J: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.J, dtype=complex)
        if j.ndim == 4:
            j = j.reshape(self.d**2, self.d**2)
        if j.shape != (self.d**2, self.d**2):
            raise InvalidArgumentError(f"Choi matrix must be {self.d**2} x {self.d**2}, got {j.shape}")
        if not np.all(np.isfinite(j)):
            raise InvalidArgumentError("Choi matrix has non-finite entries")
        self.J = j

    @property
    def tensor(self) -> np.ndarray:
        return self.J.reshape((self.d,) * 4)

    @classmethod
    def from_matrix(cls, j) -> LinearMapChoi:
        j = _square(np.asarray(j), "Choi matrix")
        d = int(round(np.sqrt(j.shape[0])))
        if d * d != j.shape[0]:
            raise InvalidArgumentError(f"Choi matrix size {j.shape[0]} is not a square")
        return cls(d, j)

    def allclose(self, other: LinearMapChoi, tol: float = 1e-12) -> bool:
        return self.d == other.d and bool(np.allclose(self.J, other.J, rtol=0, atol=tol))


def choi_from_function(phi: Callable[[np.ndarray], np.ndarray], d: int) -> LinearMapChoi:
    j4 = np.zeros((d,) * 4, dtype=complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            j4[:, i, :, j] = np.asarray(phi(e))
    return LinearMapChoi(d, j4)


def apply_map(m: LinearMapChoi, x) -> np.ndarray:
    x = np.asarray(_square(x, "X"))
    if x.shape[0] != m.d:
        raise InvalidArgumentError(f"X is {x.shape[0]} x {x.shape[0]}, map acts on {m.d} x {m.d}")
    return np.einsum("aibj,ij->ab", m.tensor, x)


def apply_map_partial_trace(m: LinearMapChoi, x) -> np.ndarray:
    """Phi(X) = [id (x) Tr](J (I (x) X^T)), evaluated literally."""
    x = np.asarray(_square(x, "X"))
    d = m.d
    if x.shape[0] != d:
        raise InvalidArgumentError(f"X is {x.shape[0]} x {x.shape[0]}, map acts on {d} x {d}")
    prod = (m.J @ np.kron(np.eye(d), x.T)).reshape((d,) * 4)
    return np.einsum("akbk->ab", prod)


def copy_isometry(d: int) -> np.ndarray:
    """V with V e_i = e_i (x) e_i, as a d^2 x d matrix."""
    v = np.zeros((d * d, d))
    for i in range(d):
        v[i * d + i, i] = 1.0
    return v


def schur_multiplier(m: LinearMapChoi) -> np.ndarray:
    """V^* J V, i.e. M[a, b] = J4[a, a, b, b]."""
    v = copy_isometry(m.d)
    return v.T @ m.J @ v


def twirl_equal(m: LinearMapChoi) -> LinearMapChoi:
    """Choi of X -> diag(Phi(diag X))."""
    d = m.d
    j4 = m.tensor
    out = np.zeros_like(j4)
    idx = np.arange(d)
    a, i = np.meshgrid(idx, idx, indexing="ij")
    out[a, i, a, i] = j4[a, i, a, i]
    return LinearMapChoi(d, out)


def twirl_parallel(m: LinearMapChoi) -> LinearMapChoi:
    """Choi of X -> (V^* J V) (Schur product) X."""
    d = m.d
    mult = schur_multiplier(m)
    out = np.zeros((d,) * 4, dtype=complex)
    a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    out[a, a, b, b] = mult
    return LinearMapChoi(d, out)


def twirl_cross(m: LinearMapChoi) -> LinearMapChoi:
    """Choi of X -> (V^* J^Gamma V) (Schur product) X^T."""
    d = m.d
    j_gamma = _bipartite(m.J).transpose(0, 3, 2, 1).reshape(d * d, d * d)
    v = copy_isometry(d)
    mult = v.T @ j_gamma @ v
    out = np.zeros((d,) * 4, dtype=complex)
    a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    out[a, b, b, a] = mult
    return LinearMapChoi(d, out)


def twirl(m: LinearMapChoi, kind: str) -> LinearMapChoi:
    if kind not in KINDS:
        raise InvalidArgumentError(f"unknown twirl {kind!r}; expected one of {KINDS}")
    return {"equal": twirl_equal, "parallel": twirl_parallel, "cross": twirl_cross}[kind](m)


# flavors attached to the Choi legs (a, i, b, j) of the integrand
_LEG_BOXES = {
    "equal": (("u", "u"), ("v", "ubar"), ("u", "ubar"), ("v", "u")),
    "parallel": (("u", "u"), ("u", "ubar"), ("v", "u"), ("v", "ubar")),
    "cross": (("u", "u"), ("v", "ubar"), ("v", "u"), ("u", "ubar")),
}


def twirl_network(m: LinearMapChoi, kind: str, random: str = "u") -> Network:
    """Network whose average is the twirled Choi tensor (legs a, i, b, j).

    ``random="s"`` uses sign vectors for both families instead of phases.
    """
    if kind not in KINDS:
        raise InvalidArgumentError(f"unknown twirl {kind!r}; expected one of {KINDS}")
    if random not in ("u", "s"):
        raise InvalidArgumentError("random must be 'u' or 's'")
    net = Network(m.d)
    core = net.add(m.tensor)
    opened = []
    for leg, (family, flavor) in enumerate(_LEG_BOXES[kind]):
        node = net.add_random_diagonal(family, "s" if random == "s" else flavor)
        net.connect((core, leg), (node, 0))
        opened.append((node, 1))
    net.expose(*opened)
    return net
