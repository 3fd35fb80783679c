"""Local diagonal unitary / orthogonal invariant bipartite matrices.

An LDOI matrix X on C^d (x) C^d is determined by three d x d matrices

    A[i, j] = X[i, j, i, j]    B[i, j] = X[i, i, j, j]    C[i, j] = X[i, j, j, i]

(bipartite index convention of :mod:`phaseavg.tensor`), which share their
diagonal.  LDUI matrices are the case B = diag(A), CLDUI the case C = diag(A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import InvalidArgumentError
from .tensor import _bipartite, _square, partial_transpose

TOL = 1e-10


@dataclass
class MatrixTriple:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(_square(self.A, "A"), dtype=complex)
        self.B = np.asarray(_square(self.B, "B"), dtype=complex)
        self.C = np.asarray(_square(self.C, "C"), dtype=complex)
        if not (self.A.shape == self.B.shape == self.C.shape):
            raise InvalidArgumentError("A, B, C must have the same shape")
        for f in fields(self):
            if not np.all(np.isfinite(getattr(self, f.name))):
                raise InvalidArgumentError(f"{f.name} has non-finite entries")

    @property
    def d(self) -> int:
        return self.A.shape[0]

    def diag_consistent(self, tol: float = TOL) -> bool:
        a = np.diagonal(self.A)
        return bool(np.allclose(a, np.diagonal(self.B), rtol=0, atol=tol)
                    and np.allclose(a, np.diagonal(self.C), rtol=0, atol=tol))

    def allclose(self, other: MatrixTriple, tol: float = TOL) -> bool:
        return all(np.allclose(x, y, rtol=0, atol=tol) for x, y in
                   ((self.A, other.A), (self.B, other.B), (self.C, other.C)))


@dataclass
class FactorPair:
    V: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=complex)
        self.W = np.asarray(self.W, dtype=complex)
        if self.V.ndim != 2 or self.W.ndim != 2:
            raise InvalidArgumentError("factors must be matrices")
        if self.V.shape != self.W.shape:
            raise InvalidArgumentError(f"factor shapes differ: {self.V.shape} vs {self.W.shape}")


# -- conversions --------------------------------------------------------------


def triple_of(x) -> MatrixTriple:
    x = _bipartite(x)
    d = x.shape[0]
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return MatrixTriple(x[i, j, i, j], x[i, i, j, j], x[i, j, j, i])


def _build(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    d = a.shape[0]
    x = np.zeros((d, d, d, d), dtype=complex)
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    # B and C first; the A pattern overwrites the shared diagonal i == j
    x[i, i, j, j] = b
    x[i, j, j, i] = c
    x[i, j, i, j] = a
    return x


def ldoi_from_triple(t: MatrixTriple, tol: float = TOL) -> np.ndarray:
    """The unique LDOI tensor (d, d, d, d) with triple ``t``."""
    if not t.diag_consistent(tol):
        raise InvalidArgumentError("A, B, C must share their diagonal")
    return _build(t.A, t.B, t.C)


def _pair(a, b, name: str, tol: float) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(_square(a, "A"), dtype=complex)
    b = np.asarray(_square(b, name), dtype=complex)
    if a.shape != b.shape:
        raise InvalidArgumentError("pair matrices must have the same shape")
    if not np.allclose(np.diagonal(a), np.diagonal(b), rtol=0, atol=tol):
        raise InvalidArgumentError(f"A and {name} must share their diagonal")
    return a, b


def ldui_from_pair(a, c, tol: float = TOL) -> np.ndarray:
    """LDUI tensor of the pair (A, C): triple (A, diag A, C)."""
    a, c = _pair(a, c, "C", tol)
    return _build(a, np.diag(np.diagonal(a)), c)


def cldui_from_pair(a, b, tol: float = TOL) -> np.ndarray:
    """CLDUI tensor of the pair (A, B): triple (A, B, diag A)."""
    a, b = _pair(a, b, "B", tol)
    return _build(a, b, np.diag(np.diagonal(a)))


def project_ldoi(x) -> np.ndarray:
    return _build(*_abc(x))


def project_ldui(x) -> np.ndarray:
    a, _, c = _abc(x)
    return _build(a, np.diag(np.diagonal(a)), c)


def project_cldui(x) -> np.ndarray:
    a, b, _ = _abc(x)
    return _build(a, b, np.diag(np.diagonal(a)))


def _abc(x):
    t = triple_of(x)
    return t.A, t.B, t.C


# -- positivity ---------------------------------------------------------------


def _is_psd(m: np.ndarray, tol: float) -> bool:
    if not np.allclose(m, m.conj().T, rtol=0, atol=tol):
        return False
    return bool(np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -tol)


def _entrywise_nonneg(a: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(a.imag) <= tol) and np.all(a.real >= -tol))


def _two_by_two(a: np.ndarray, m: np.ndarray, tol: float) -> bool:
    """A_ij A_ji >= |M_ij|^2 for every pair i != j."""
    prod = (a * a.T).real
    return bool(np.all(prod - np.abs(m) ** 2 >= -tol))


def _psd_conditions(t: MatrixTriple, b: np.ndarray, c: np.ndarray, tol: float) -> bool:
    return (
        t.diag_consistent(tol)
        and _entrywise_nonneg(t.A, tol)
        and _is_psd(b, tol)
        and np.allclose(c, c.conj().T, rtol=0, atol=tol)
        and _two_by_two(t.A, c, tol)
    )


def is_psd_triple(t: MatrixTriple, tol: float = TOL) -> bool:
    """Whether the LDOI matrix of ``t`` is positive semidefinite."""
    return bool(_psd_conditions(t, t.B, t.C, tol))


def is_ppt_triple(t: MatrixTriple, tol: float = TOL) -> bool:
    """Whether the partial transpose of the LDOI matrix of ``t`` is positive semidefinite."""
    return bool(_psd_conditions(t, t.C, t.B, tol))


def is_selfadjoint_triple(t: MatrixTriple, tol: float = TOL) -> bool:
    """Whether the LDOI matrix is self-adjoint: A real, B and C Hermitian."""
    return bool(
        np.all(np.abs(t.A.imag) <= tol)
        and np.allclose(t.B, t.B.conj().T, rtol=0, atol=tol)
        and np.allclose(t.C, t.C.conj().T, rtol=0, atol=tol)
    )


def exact_sum(values) -> complex:
    """Correctly rounded sum of complex values."""
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))


def trace_triple(t: MatrixTriple) -> complex:
    """Trace of the LDOI matrix: the sum of the entries of A."""
    return exact_sum(t.A)


# -- realignment --------------------------------------------------------------


def realign_blocks(t: MatrixTriple) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Diagonal blocks of the realigned matrix and of its partial transpose."""
    a, b, c = t.A, t.B, t.C
    d = t.d
    r = [a.copy()]
    rg = [a.copy()]
    for i in range(d):
        for j in range(i + 1, d):
            r.append(np.array([[b[i, j], c[i, j]], [c[j, i], b[j, i]]]))
            rg.append(np.array([[c[i, j], b[i, j]], [b[j, i], c[j, i]]]))
    return r, rg


def trace_norm(m: np.ndarray) -> float:
    return float(np.linalg.svd(m, compute_uv=False).sum())


def entrywise_norm(m: np.ndarray) -> float:
    return float(np.abs(m).sum())


def realignment_gaps(t: MatrixTriple) -> tuple[float, float]:
    """(||A||_1 - ||A||_Tr) - (||M||_1 - ||M||_Tr) for M = B and M = C."""
    base = entrywise_norm(t.A) - trace_norm(t.A)
    return (
        base - (entrywise_norm(t.B) - trace_norm(t.B)),
        base - (entrywise_norm(t.C) - trace_norm(t.C)),
    )


def realignment_criterion(t: MatrixTriple, tol: float = TOL) -> bool:
    gb, gc = realignment_gaps(t)
    return bool(gb >= -tol and gc >= -tol)


# -- factor constructions -----------------------------------------------------


def triple_from_factors(p: FactorPair) -> MatrixTriple:
    """Triple of the separable matrix sum_k v_k v_k^* (x) w_k w_k^* (columns v_k, w_k)."""
    v, w = p.V, p.W
    vv = v * v.conj()
    ww = w * w.conj()
    vw = v * w
    vwc = v * w.conj()
    return MatrixTriple(vv @ ww.conj().T, vw @ vw.conj().T, vwc @ vwc.conj().T)


def separable_from_factors(p: FactorPair) -> np.ndarray:
    """sum_k v_k v_k^* (x) w_k w_k^* as a (d, d, d, d) tensor."""
    return np.einsum("ik,jk,lk,mk->iljm", p.V, p.V.conj(), p.W, p.W.conj())


def add_nonnegative(t: MatrixTriple, p: np.ndarray) -> MatrixTriple:
    """(A + P, B + diag P, C + diag P) for entrywise nonnegative P."""
    p = np.asarray(_square(p, "P"))
    if p.shape != t.A.shape:
        raise InvalidArgumentError("P must match the triple's dimension")
    if not _entrywise_nonneg(np.asarray(p, dtype=complex), 0.0):
        raise InvalidArgumentError("P must be entrywise nonnegative")
    dp = np.diag(np.diagonal(p))
    return MatrixTriple(t.A + p, t.B + dp, t.C + dp)


def absorb_phases(p: FactorPair) -> FactorPair:
    """Move the phases of W into V, leaving W entrywise nonnegative.

    The pair (A, B) is unchanged and the new factors give the triple (A, B, B).
    """
    mod = np.abs(p.W)
    phase = np.where(mod > 0, p.W / np.where(mod > 0, mod, 1), 1)
    return FactorPair(p.V * phase, mod)


def pair_from_factors(p: FactorPair) -> tuple[np.ndarray, np.ndarray]:
    """The (A, B) pair of the factors."""
    t = triple_from_factors(p)
    return t.A, t.B


# -- complete positivity checks -----------------------------------------------


@dataclass
class TCPReport:
    shared_diagonal: bool
    positivity: bool
    two_by_two: bool
    realignment: bool

    @property
    def passed(self) -> bool:
        return self.shared_diagonal and self.positivity and self.two_by_two and self.realignment

    def lines(self) -> list[str]:
        names = {
            "shared_diagonal": "diag(A) = diag(B) = diag(C)",
            "positivity": "A >= 0 entrywise, B and C PSD",
            "two_by_two": "A_ij A_ji >= |B_ij|^2, |C_ij|^2",
            "realignment": "||A||_1 - ||A||_Tr >= ||B||_1 - ||B||_Tr, same for C",
        }
        out = [f"{'pass' if getattr(self, k) else 'fail'}  {v}" for k, v in names.items()]
        out.append(f"overall {'pass' if self.passed else 'fail'}")
        return out


def tcp_necessary(t: MatrixTriple, tol: float = TOL) -> TCPReport:
    """Necessary conditions for (A, B, C) to be triplewise completely positive."""
    return TCPReport(
        shared_diagonal=t.diag_consistent(tol),
        positivity=_entrywise_nonneg(t.A, tol) and _is_psd(t.B, tol) and _is_psd(t.C, tol),
        two_by_two=_two_by_two(t.A, t.B, tol) and _two_by_two(t.A, t.C, tol),
        realignment=realignment_criterion(t, tol),
    )


def pcp_necessary(a, b, tol: float = TOL) -> TCPReport:
    """Necessary conditions for the pair (A, B): those of the triple (A, B, B)."""
    a = np.asarray(_square(a, "A"), dtype=complex)
    b = np.asarray(_square(b, "B"), dtype=complex)
    return tcp_necessary(MatrixTriple(a, b, b), tol)


def comparison_matrix(b: np.ndarray) -> np.ndarray:
    b = np.asarray(_square(b, "B"))
    m = -np.abs(b)
    np.fill_diagonal(m, np.abs(np.diagonal(b)))
    return m


def _conditions_2_to_4(t: MatrixTriple, tol: float) -> bool:
    r = tcp_necessary(t, tol)
    return r.shared_diagonal and r.positivity and r.two_by_two


def tcp_sufficient_comparison(a, b, tol: float = TOL) -> bool:
    """Certificate that (A, B, B) is TCP: true when the comparison matrix of B is PSD.

    A false result is inconclusive.
    """
    t = MatrixTriple(a, b, b)
    if not _conditions_2_to_4(t, tol):
        raise InvalidArgumentError("(A, B, B) fails the diagonal, positivity or 2x2 conditions")
    return bool(np.linalg.eigvalsh(comparison_matrix(t.B)).min() >= -tol)


def d2_tcp_decision(t: MatrixTriple, tol: float = TOL) -> bool:
    """Complete TCP decision for 2 x 2 triples."""
    if t.d != 2:
        raise InvalidArgumentError(f"d2_tcp_decision needs d = 2, got d = {t.d}")
    return bool(_conditions_2_to_4(t, tol))


def min_eig(x) -> float:
    """Smallest eigenvalue of the Hermitian part of a bipartite matrix."""
    x = _bipartite(x)
    d = x.shape[0]
    m = x.reshape(d * d, d * d)
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())


def is_psd_bipartite(x, tol: float = TOL) -> bool:
    x = _bipartite(x)
    d = x.shape[0]
    return _is_psd(x.reshape(d * d, d * d), tol)


def is_ppt_bipartite(x, tol: float = TOL) -> bool:
    return is_psd_bipartite(partial_transpose(x), tol)
