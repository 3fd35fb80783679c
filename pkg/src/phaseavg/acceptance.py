"""Acceptance checks, shared by the test suite and ``phaseavg selftest``.

Each ``check_*`` function returns ``(passed, detail)``.  Reference values come
from independent oracles (recursive Moebius functions, design and sign
enumeration, eigenvalue tests) rather than from the code under test.
"""

from __future__ import annotations

import time
from functools import lru_cache
from typing import Callable

import numpy as np

from . import combinatorics as cb
from . import ldoi
from .expectation import build_paired, eval_injective, eval_kernel, expand_s, expand_u, expect
from .generators import random_complex, random_factor_pair, random_phase_network, random_sign_network
from .oracle import SampleConfig, exact, exact_s, exact_u, monte_carlo
from .tensor import Network, as_matrix, contract, partial_transpose
from .twirl import KINDS, LinearMapChoi, twirl, twirl_network

Result = tuple[bool, str]

UBP_COUNTS = [1, 3, 16, 131, 1496, 22482]
EVEN_COUNTS = [1, 4, 31, 379, 6556]
CF_U = [1, -1, 4, -33, 456, -9460, 274800]
CF_PI = [1, -2, 16, -272, 7936, -353792]


# -- oracles ------------------------------------------------------------------


def recursive_moebius(elements, leq) -> Callable:
    """Moebius function of a finite poset from mu(x,x)=1, sum_{x<=z<=y} mu(x,z)=0."""
    elements = list(elements)

    @lru_cache(maxsize=None)
    def mu(i: int, j: int) -> int:
        if i == j:
            return 1
        x, y = elements[i], elements[j]
        return -sum(mu(i, k) for k, z in enumerate(elements) if k != j and leq(x, z) and leq(z, y))

    index = {e: k for k, e in enumerate(elements)}
    return lambda x, y: mu(index[x], index[y])


def brute_force_cf_u(n: int) -> dict:
    """Cf_U(x) = sum over y finer than x of mu(y, x), with a recursive mu."""
    ubps = cb.enumerate_ubps(n)
    mu = recursive_moebius(ubps, cb.refines_ubp)
    return {x: sum(mu(y, x) for y in ubps if cb.refines_ubp(y, x)) for x in ubps}


def _max_dev(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.abs(a - b).max()) if a.size else 0.0


# -- criteria -----------------------------------------------------------------


def check_sequences() -> Result:
    t0 = time.perf_counter()
    ubp = [cb.count_ubps(n) for n in range(1, 7)]
    ubp_enum = [len(cb.enumerate_ubps(n)) for n in range(1, 7)]
    even = [cb.count_even_partitions(2 * n) for n in range(1, 6)]
    even_enum = [len(cb.enumerate_even_partitions(2 * n)) for n in range(1, 6)]
    cfu = [cb.cf_u_block(n) for n in range(1, 8)]
    cfp = [cb.cf_pi_block(2 * n) for n in range(1, 7)]
    elapsed = time.perf_counter() - t0
    ok = (
        ubp == ubp_enum == UBP_COUNTS
        and even == even_enum == EVEN_COUNTS
        and cfu == CF_U
        and cfp == CF_PI
        and elapsed < 30
    )
    return ok, f"|UBP|={ubp} even={even} Cf_U={cfu} Cf_Pi={cfp} ({elapsed:.1f}s)"


def check_moebius() -> Result:
    bad = 0
    checked = 0
    for n in range(1, 6):
        parts = cb.enumerate_set_partitions(n)
        mu = recursive_moebius(parts, cb.refines)
        for x in parts:
            for y in parts:
                if cb.refines(x, y):
                    checked += 1
                    bad += cb.moebius_partition(x, y) != mu(x, y)
    ubps = cb.enumerate_ubps(3)
    mu = recursive_moebius(ubps, cb.refines_ubp)
    for x in ubps:
        for y in ubps:
            if cb.refines_ubp(x, y):
                checked += 1
                bad += cb.moebius_ubp(x, y) != mu(x, y)
    # weights as sums of Moebius values over refinements
    for n in range(1, 4):
        for x, w in brute_force_cf_u(n).items():
            checked += 1
            bad += cb.cf_u(x) != w
    return bad == 0, f"{checked} comparable pairs and weights, {bad} mismatches"


def check_generating_functions() -> Result:
    ok_u = cb.verify_generating_functions(7, "ubp")
    ok_s = cb.verify_generating_functions(6, "even")
    return ok_u and ok_s, f"phase series order 7: {ok_u}; sign series order 6: {ok_s}"


def check_phase_oracle(per_case: int = 50, seed: int = 1) -> Result:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (1, 2, 3):
        for d in (2, 3, 4):
            for _ in range(per_case):
                net = random_phase_network(rng, d, n)
                worst = max(worst, _max_dev(expand_u(net, "f").value(), exact_u(net, "f")))
    elapsed = time.perf_counter() - t0
    return worst < 1e-10 and elapsed < 120, f"max deviation {worst:.2e} ({elapsed:.1f}s)"


def check_sign_oracle(per_case: int = 50, seed: int = 2) -> Result:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in (2, 4):
        for d in (2, 3, 4):
            for _ in range(per_case):
                net = random_sign_network(rng, d, m)
                worst = max(worst, _max_dev(expand_s(net, "f").value(), exact_s(net, "f")))
    return worst < 1e-10, f"max deviation {worst:.2e}"


def check_injective(per_case: int = 3, seed: int = 3) -> Result:
    rng = np.random.default_rng(seed)
    sum_dev = 0.0
    kernel_dev = 0.0
    paired_dev = 0.0
    for n in (2, 3):
        ubps = cb.enumerate_ubps(n)
        for d in (2, 3):
            for _ in range(per_case):
                net = random_phase_network(rng, d, n)
                inj = {x: eval_injective(net, "f", x) for x in ubps}
                total = sum(inj.values())
                sum_dev = max(sum_dev, _max_dev(total, expand_u(net, "f").value()))
                for x in ubps:
                    kernel = eval_kernel(net, "f", x)
                    coarser = sum(inj[y] for y in ubps if cb.refines_ubp(x, y))
                    kernel_dev = max(kernel_dev, _max_dev(kernel, coarser))
                    paired_dev = max(paired_dev, _max_dev(kernel, contract(build_paired(net, "f", x))))
    worst = max(sum_dev, kernel_dev, paired_dev)
    return worst < 1e-10, (
        f"sum of injective {sum_dev:.2e}; paired vs coarser injective {kernel_dev:.2e}; "
        f"paired network vs labeling sum {paired_dev:.2e}"
    )


def three_pair_network(d: int = 2, seed: int = 7) -> Network:
    """A generic 6-leg tensor with three u and three ubar boxes."""
    rng = np.random.default_rng(seed)
    net = Network(d)
    t = net.add(random_complex(rng, (d,) * 6))
    for k, flavor in enumerate(["u"] * 3 + ["ubar"] * 3):
        box = net.add_random("u", flavor)
        net.connect((t, k), (box, 0))
    return net


def check_three_pair_symbolic() -> Result:
    sym = expand_u(three_pair_network(), "u").symbolic()
    weights = sorted(w for _, w in sym)
    oracle = brute_force_cf_u(3)
    agree = all(oracle[cb.UBP.parse(text)] == w for text, w in sym)
    ok = len(sym) == 16 and weights == sorted([1] * 6 + [-1] * 9 + [4]) and agree
    top = [text for text, w in sym if w == 4]
    return ok, f"{len(sym)} terms, weights {weights}, +4 on {top}, oracle agreement {agree}"


def _projector_rank(proj, d: int) -> int:
    basis = np.eye(d**4).reshape((d**4,) + (d,) * 4)
    return int(np.linalg.matrix_rank(np.array([proj(e).ravel() for e in basis])))


def random_ldoi_triple(rng: np.random.Generator, d: int) -> ldoi.MatrixTriple:
    """Triples near the PSD / PPT boundary from three mixed families."""
    kind = rng.integers(3)
    if kind == 0:
        g = random_complex(rng, (d * d, d * d))
        rho = g @ g.conj().T
        rho -= rng.uniform(0, 1.5) * np.trace(rho).real / d**2 * np.eye(d * d)
        return ldoi.triple_of(ldoi.project_ldoi(rho))
    if kind == 1:
        t = ldoi.triple_from_factors(random_factor_pair(rng, d, int(rng.integers(1, 2 * d))))
        g = random_complex(rng, (d, d))
        h = g + g.conj().T
        s = rng.uniform(0, 1) * np.abs(t.A).mean()
        which = rng.integers(2)
        b = t.B + s * h * (which == 0)
        c = t.C + s * h * (which == 1)
        np.fill_diagonal(b, np.diagonal(t.A))
        np.fill_diagonal(c, np.diagonal(t.A))
        return ldoi.MatrixTriple(t.A, b, c)
    a = np.abs(rng.normal(size=(d, d)))
    g = random_complex(rng, (d, d))
    b = g @ g.conj().T
    h = random_complex(rng, (d, d))
    c = (h + h.conj().T) / 2
    np.fill_diagonal(c, np.diagonal(b))
    np.fill_diagonal(a, np.diagonal(b).real)
    return ldoi.MatrixTriple(a, b, c)


def check_ldoi(samples: int = 200, seed: int = 8) -> Result:
    d = 3
    ranks = (_projector_rank(ldoi.project_ldoi, d), _projector_rank(ldoi.project_ldui, d),
             _projector_rank(ldoi.project_cldui, d))
    rng = np.random.default_rng(seed)
    disagreements = 0
    psd_true = ppt_true = 0
    trace_dev = 0.0
    swap_ok = True
    for _ in range(samples):
        t = random_ldoi_triple(rng, d)
        x = ldoi.ldoi_from_triple(t)
        psd = ldoi.is_psd_bipartite(x)
        ppt = ldoi.is_ppt_bipartite(x)
        psd_true += psd
        ppt_true += ppt
        disagreements += (ldoi.is_psd_triple(t) != psd) + (ldoi.is_ppt_triple(t) != ppt)
        trace_dev = max(trace_dev, abs(ldoi.trace_triple(t) - ldoi.exact_sum(np.diagonal(as_matrix(x)))))
        tx = ldoi.triple_of(x)
        tg = ldoi.triple_of(partial_transpose(x))
        swap_ok &= bool(np.array_equal(tg.A, tx.A) and np.array_equal(tg.B, tx.C) and np.array_equal(tg.C, tx.B))
    # trace and swap on generic matrices as well
    for _ in range(20):
        x = random_complex(rng, (d,) * 4)
        t = ldoi.triple_of(x)
        trace_dev = max(trace_dev, abs(ldoi.trace_triple(t) - ldoi.exact_sum(np.diagonal(as_matrix(ldoi.project_ldoi(x))))))
        tg = ldoi.triple_of(partial_transpose(x))
        swap_ok &= bool(np.array_equal(tg.A, t.A) and np.array_equal(tg.B, t.C) and np.array_equal(tg.C, t.B))
    ok = ranks == (21, 15, 15) and disagreements == 0 and trace_dev == 0.0 and swap_ok
    return ok, (
        f"ranks (LDOI, LDUI, CLDUI) = {ranks}; {disagreements} disagreements "
        f"({psd_true} PSD, {ppt_true} PPT of {samples}); trace dev {trace_dev:.1e}; swap exact {swap_ok}"
    )


def diagonally_dominant_instance(rng: np.random.Generator, d: int):
    """(A, B) with explicit factors (V, W) for (A, B, B); M(B) is PSD by dominance."""
    off = random_complex(rng, (d, d)) * (rng.random((d, d)) < 0.7)
    off = np.triu(off, 1)
    off = off + off.conj().T
    slack = rng.exponential(size=d) * (rng.random(d) < 0.7)
    diag = np.abs(off).sum(axis=1) + slack
    b = off + np.diag(diag)
    extra = rng.exponential(size=(d, d)) * (rng.random((d, d)) < 0.5)
    np.fill_diagonal(extra, 0)

    vcols, wcols = [], []
    for i in range(d):
        for j in range(i + 1, d):
            if b[i, j] != 0:
                r = np.abs(b[i, j])
                v = np.zeros(d, dtype=complex)
                v[i], v[j] = np.sqrt(r), np.sqrt(r) * np.conj(b[i, j] / r)
                w = np.zeros(d)
                w[i] = w[j] = 1.0
                vcols.append(v)
                wcols.append(w)
        if slack[i] > 0:
            v = np.zeros(d, dtype=complex)
            v[i] = np.sqrt(slack[i])
            w = np.zeros(d)
            w[i] = 1.0
            vcols.append(v)
            wcols.append(w)
        for j in range(d):
            if extra[i, j] > 0:
                v = np.zeros(d, dtype=complex)
                v[i] = np.sqrt(extra[i, j])
                w = np.zeros(d)
                w[j] = 1.0
                vcols.append(v)
                wcols.append(w)
    factors = ldoi.FactorPair(np.array(vcols).T, np.array(wcols).T)
    a = ldoi.triple_from_factors(factors).A
    return a, b, factors


def check_tcp(samples: int = 100, seed: int = 9) -> Result:
    rng = np.random.default_rng(seed)
    necessary_fail = 0
    for _ in range(samples):
        p = random_factor_pair(rng, 4, int(rng.integers(2, 9)))
        necessary_fail += not ldoi.tcp_necessary(ldoi.triple_from_factors(p)).passed

    comparison_fail = 0
    for _ in range(samples):
        d = int(rng.integers(2, 6))
        a, b, factors = diagonally_dominant_instance(rng, d)
        built = ldoi.triple_from_factors(factors)
        reproduces = built.allclose(ldoi.MatrixTriple(a, b, b))
        comparison_fail += not (reproduces and ldoi.tcp_sufficient_comparison(a, b))

    d2_fail = 0
    d2_true = 0
    for k in range(samples):
        if k % 2 == 0:
            t = ldoi.triple_from_factors(random_factor_pair(rng, 2, int(rng.integers(1, 5))))
            truth = True
        else:
            t = random_ldoi_triple(rng, 2)
            x = ldoi.ldoi_from_triple(t)
            # 2 x 2 systems: separable iff PSD and PPT
            truth = ldoi.is_psd_bipartite(x) and ldoi.is_ppt_bipartite(x)
        got = ldoi.d2_tcp_decision(t)
        d2_true += got
        d2_fail += got != truth
    ok = necessary_fail == 0 and comparison_fail == 0 and d2_fail == 0
    return ok, (
        f"necessary failures {necessary_fail}/{samples}; comparison certificate failures "
        f"{comparison_fail}/{samples}; d=2 disagreements {d2_fail}/{samples} ({d2_true} TCP)"
    )


def check_twirls(samples: int = 20, seed: int = 10) -> Result:
    rng = np.random.default_rng(seed)
    engine_dev = 0.0
    idem_dev = 0.0
    for d in (2, 3):
        for _ in range(samples):
            m = LinearMapChoi(d, random_complex(rng, (d * d, d * d)))
            for kind in KINDS:
                closed = twirl(m, kind)
                avg = expect(twirl_network(m, kind))
                engine_dev = max(engine_dev, _max_dev(avg, closed.tensor))
                idem_dev = max(idem_dev, _max_dev(twirl(closed, kind).J, closed.J))
    ok = engine_dev < 1e-12 and idem_dev < 1e-12
    return ok, f"closed form vs engine {engine_dev:.2e}; idempotence {idem_dev:.2e}"


def check_monte_carlo(samples: int = 10**5, seed: int = 11) -> Result:
    rng = np.random.default_rng(seed)
    worst = 0.0
    nets = []
    for k in range(10):
        d = 2 + k % 2
        if k < 5:
            nets.append(random_phase_network(rng, d, 1 + k % 2))
        else:
            nets.append(random_sign_network(rng, d, 2 + 2 * (k % 2)))
    bad = 0
    for k, net in enumerate(nets):
        mean, stderr = monte_carlo(net, SampleConfig(seed=1000 + k, samples=samples))
        ref = exact(net)
        diff = np.abs(mean - ref)
        bad += int(np.any(diff > 5 * stderr + 1e-12))
        z = diff / np.where(stderr > 0, stderr, np.inf)
        worst = max(worst, float(np.max(z)) if z.size else 0.0)
    return bad == 0, f"{bad}/10 networks outside 5 stderr; largest z-score {worst:.2f}"


CRITERIA: list[tuple[str, Callable[[], Result]]] = [
    ("1 combinatorial sequences", check_sequences),
    ("2 Moebius closed form vs recursion", check_moebius),
    ("3 generating-function identities", check_generating_functions),
    ("4 phase expansion vs design oracle", check_phase_oracle),
    ("5 sign expansion vs sign enumeration", check_sign_oracle),
    ("6 injective-diagram identities", check_injective),
    ("7 symbolic expansion at n=3", check_three_pair_symbolic),
    ("8 LDOI layer", check_ldoi),
    ("9 TCP checks", check_tcp),
    ("10 twirls", check_twirls),
    ("11 Monte Carlo sanity", check_monte_carlo),
]


def run_all(print_fn=print) -> bool:
    all_ok = True
    for name, fn in CRITERIA:
        t0 = time.perf_counter()
        ok, detail = fn()
        all_ok &= ok
        print_fn(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} [{time.perf_counter() - t0:.1f}s]")
    return all_ok
