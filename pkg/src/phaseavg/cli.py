"""Command-line interface: ``phaseavg <command> ...``.

Exit codes: 0 success, 2 input error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import combinatorics as cb
from . import io, ldoi
from .errors import InvalidArgumentError, InvalidNetworkError, ResourceLimitError
from .expectation import DEFAULT_BUDGET, expand
from .oracle import SampleConfig, exact, monte_carlo
from .tensor import as_bipartite, as_matrix, contract
from .twirl import KINDS, LinearMapChoi, twirl

EXIT_INPUT = 2
EXIT_RESOURCE = 3


def _fmt(z: complex, tol: float) -> str:
    re = 0.0 if abs(z.real) <= tol else z.real
    im = 0.0 if abs(z.imag) <= tol else z.imag
    return f"{re:.12g} {im:+.12g}j"


def _print_tensor(t: np.ndarray, tol: float, label: str = "") -> None:
    t = np.asarray(t)
    head = f"{label} " if label else ""
    print(f"{head}shape {list(t.shape)}")
    for idx in np.ndindex(*t.shape):
        print(f"{list(idx)} {_fmt(complex(t[idx]), tol)}")


def _print_matrix(name: str, m: np.ndarray, tol: float) -> None:
    print(f"{name}:")
    for row in np.asarray(m):
        print("  " + "  ".join(_fmt(complex(z), tol) for z in row))


def _print_triple(t: ldoi.MatrixTriple, tol: float) -> None:
    for name in "ABC":
        _print_matrix(name, getattr(t, name), tol)


# -- commands -----------------------------------------------------------------


def cmd_enumerate(args) -> int:
    n = args.n
    if args.kind == "partitions":
        items = cb.enumerate_set_partitions(n)
    elif args.kind == "even":
        items = cb.enumerate_even_partitions(n)
    else:
        items = cb.enumerate_ubps(n)
    for item in items:
        print(item)
    print(f"total {len(items)}")
    return 0


def _check_oracle_kinds(net, oracle: str) -> None:
    kinds = {net.family_kind(f) for f in net.families()}
    if oracle == "design" and "s" in kinds:
        raise InvalidArgumentError("--oracle design applies to phase families only; use --oracle exact")
    if oracle == "signs" and "u" in kinds:
        raise InvalidArgumentError("--oracle signs applies to sign families only; use --oracle exact")


def cmd_expect(args) -> int:
    net = io.load_network(args.file)
    if args.mode == "symbolic":
        exp = expand(net, budget=args.budget)
        for text, weight in exp.symbolic():
            print(f"{text} {weight:+d}")
        print(f"total {len(exp)}")
        return 0
    value = expand(net, budget=args.budget).value() if net.random_nodes() else contract(net)
    _print_tensor(value, args.tol, "expectation")
    if args.oracle:
        _check_oracle_kinds(net, args.oracle)
        ref = exact(net)
        _print_tensor(ref, args.tol, f"oracle[{args.oracle}]")
        dev = float(np.abs(value - ref).max()) if value.size else 0.0
        print(f"max deviation {dev:.3e}")
        if dev > args.tol:
            print(f"deviation exceeds tolerance {args.tol:g}")
            return 1
    if args.mc:
        mean, stderr = monte_carlo(net, SampleConfig(seed=args.seed, samples=args.mc))
        _print_tensor(mean, args.tol, "monte-carlo")
        diff = np.abs(mean - value)
        print(f"max |mc - expectation| {float(diff.max()) if diff.size else 0.0:.3e}")
        print(f"max stderr {float(stderr.max()) if stderr.size else 0.0:.3e}")
    return 0


def cmd_mc(args) -> int:
    net = io.load_network(args.file)
    mean, stderr = monte_carlo(net, SampleConfig(seed=args.seed, samples=args.samples))
    _print_tensor(mean, args.tol, "mean")
    _print_tensor(stderr, args.tol, "stderr")
    return 0


def _load_ldoi_input(path):
    """A triple, a matrix (converted to its triple) or a factor pair."""
    obj = io.load_json(path)
    if not isinstance(obj, dict):
        raise InvalidArgumentError(f"{path}: expected a JSON object")
    if "A" in obj:
        return "triple", io.load_triple(path)
    if "matrix" in obj:
        return "matrix", io.load_matrix(path)
    if "V" in obj:
        return "factors", io.load_factors(path)
    raise InvalidArgumentError(f"{path}: expected a matrix, triple (A, B, C) or factor (V, W) file")


def _as_triple(kind: str, obj) -> ldoi.MatrixTriple:
    if kind == "triple":
        return obj
    if kind == "matrix":
        return ldoi.triple_of(as_bipartite(obj))
    return ldoi.triple_from_factors(obj)


def cmd_ldoi(args) -> int:
    kind, obj = _load_ldoi_input(args.file)
    tol = args.tol
    sub = args.sub
    if sub == "from-factors":
        if kind != "factors":
            raise InvalidArgumentError("from-factors needs a factor (V, W) file")
        t = ldoi.triple_from_factors(obj)
        if args.out:
            io.save_triple(t, args.out)
        _print_triple(t, tol)
        return 0
    if sub == "project":
        if kind != "matrix":
            raise InvalidArgumentError("project needs a matrix file")
        proj = {"ldoi": ldoi.project_ldoi, "ldui": ldoi.project_ldui, "cldui": ldoi.project_cldui}[args.family]
        out = as_matrix(proj(as_bipartite(obj)))
        if args.out:
            io.save_matrix(out, args.out)
        _print_matrix("projection", out, tol)
        return 0
    t = _as_triple(kind, obj)
    if sub == "triple":
        if args.out:
            io.save_triple(t, args.out)
        _print_triple(t, tol)
    elif sub == "psd":
        print(f"psd {str(ldoi.is_psd_triple(t, tol)).lower()}")
    elif sub == "ppt":
        print(f"ppt {str(ldoi.is_ppt_triple(t, tol)).lower()}")
    elif sub == "trace":
        print(f"trace {_fmt(ldoi.trace_triple(t), tol)}")
    elif sub == "realign":
        r, rg = ldoi.realign_blocks(t)
        print(f"trace norm R(X) {sum(ldoi.trace_norm(b) for b in r):.12g}")
        print(f"trace norm R(X^G) {sum(ldoi.trace_norm(b) for b in rg):.12g}")
        gb, gc = ldoi.realignment_gaps(t)
        print(f"gap B {gb:.12g}")
        print(f"gap C {gc:.12g}")
        print(f"realignment {'pass' if ldoi.realignment_criterion(t, tol) else 'fail'}")
    elif sub == "tcp-check":
        for line in ldoi.tcp_necessary(t, tol).lines():
            print(line)
        if t.d == 2:
            print(f"d=2 decision {'tcp' if ldoi.d2_tcp_decision(t, tol) else 'not tcp'}")
        if np.allclose(t.B, t.C, rtol=0, atol=tol):
            try:
                cert = ldoi.tcp_sufficient_comparison(t.A, t.B, tol)
                print(f"comparison certificate {'tcp' if cert else 'inconclusive'}")
            except InvalidArgumentError:
                pass
    return 0


def cmd_twirl(args) -> int:
    m = LinearMapChoi.from_matrix(io.load_matrix(args.file))
    out = twirl(m, args.kind)
    if args.out:
        io.save_matrix(out.J, args.out)
    _print_matrix(f"twirl {args.kind}", out.J, args.tol)
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    return 0 if run_all() else 1


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phaseavg", description="Averages of tensor networks over random phases and signs.")
    p.add_argument("--tol", type=float, default=1e-10, help="numerical tolerance (default 1e-10)")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed (default 0)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum number of expansion terms")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="list partitions, even partitions or uniform block permutations")
    e.add_argument("kind", choices=["partitions", "even", "ubps"])
    e.add_argument("n", type=int)
    e.set_defaults(func=cmd_enumerate)

    x = sub.add_parser("expect", help="average a network file over its random boxes")
    x.add_argument("file")
    x.add_argument("--mode", choices=["numeric", "symbolic"], default="numeric")
    x.add_argument("--oracle", choices=["design", "signs", "exact"], help="compare with exact enumeration")
    x.add_argument("--mc", type=int, metavar="SAMPLES", help="also run Monte Carlo with this many samples")
    x.set_defaults(func=cmd_expect)

    m = sub.add_parser("mc", help="Monte Carlo estimate of a network average")
    m.add_argument("file")
    m.add_argument("--samples", type=int, default=10**5)
    m.set_defaults(func=cmd_mc)

    ld = sub.add_parser("ldoi", help="LDOI matrices, triples and factor pairs")
    ld.add_argument("sub", choices=["triple", "project", "psd", "ppt", "trace", "realign", "tcp-check", "from-factors"])
    ld.add_argument("file")
    ld.add_argument("--family", choices=["ldoi", "ldui", "cldui"], default="ldoi", help="projection target")
    ld.add_argument("--out", help="write the result to this file")
    ld.set_defaults(func=cmd_ldoi)

    tw = sub.add_parser("twirl", help="twirl a map given by its Choi matrix")
    tw.add_argument("file")
    tw.add_argument("--kind", choices=list(KINDS), required=True)
    tw.add_argument("--out", help="write the twirled Choi matrix to this file")
    tw.set_defaults(func=cmd_twirl)

    st = sub.add_parser("selftest", help="run the acceptance checks")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidArgumentError, InvalidNetworkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
