"""Command-line front end.

Every emitted file starts with a provenance header (version, full config,
seed) and is byte-identical across runs with the same configuration.
Rationals print as p/q, reals with 17 significant digits.  Exit codes:
0 success, 2 flag errors, 3 budget exceeded, 4 solver non-convergence.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .errors import BudgetExceededError, SolverError

DEFAULT_BUDGET = int(os.environ.get("SOUVLAKI_BUDGET", 4_000_000))


@dataclass
class RunConfig:
    subcommand: str
    args: dict

    def provenance(self) -> list:
        cfg = " ".join(f"{k}={v}" for k, v in sorted(self.args.items())
                       if v is not None and k != "out")
        lines = [f"# souvlaki v{__version__}", f"# config: {self.subcommand} {cfg}"]
        if self.args.get("seed") is not None:
            lines.append(f"# seed: {self.args['seed']}")
        return lines


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _emit(cfg: RunConfig, lines: list, out: str | None) -> None:
    text = "\n".join(cfg.provenance() + lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_graph(args) -> "Graph":
    from .assembly import assemble_tn, sample_limit_ball, spine_truncation
    budget = args.budget
    if args.K is not None:
        return spine_truncation(args.K, d=args.d, budget=budget)
    if args.n is not None:
        return assemble_tn(args.n, d=args.d, budget=budget)
    if args.r is not None:
        if args.seed is None:
            raise SystemExit2("--seed is required when sampling a limit ball")
        sample = sample_limit_ball(args.r, d=args.d, seed=args.seed, budget=budget)
        g = sample.graph
        g.meta.update(kind="limit-ball", root=sample.root, **sample.meta)
        return g
    raise SystemExit2("build needs one of --K, --n, --r")


class SystemExit2(Exception):
    pass


def cmd_build(cfg: RunConfig, args) -> None:
    from .assembly import export_edge_lines, format_address
    g = _build_graph(args)
    fmt = args.format or "edges"
    if fmt == "edges":
        lines = export_edge_lines(g)
    elif fmt == "csv":
        lines = ["vertex,degree"]
        for vid, lab in enumerate(g.labels):
            lines.append(f'"{format_address(lab)}",{g.degree(vid)}')
    elif fmt == "jsonl":
        import json
        lines = [json.dumps({"vertex": format_address(lab), "degree": g.degree(vid)},
                            sort_keys=True)
                 for vid, lab in enumerate(g.labels)]
    else:
        raise SystemExit2(f"unknown format {fmt!r}")
    _emit(cfg, lines, args.out)


def cmd_census(cfg: RunConfig, args) -> None:
    from .census import (limit_level_probability, ownership_count,
                         root_level_probability, volume_left)
    n = args.n or 2
    tol = Fraction(1, 10 ** 9) if args.tol is None else Fraction(args.tol).limit_denominator(10 ** 15)
    scale = max(10 ** 12, 4 * (1 // tol + 1))
    lines = ["k,v_k,u_k,p_k_n,p_k_lo,p_k_hi"]
    for k in range(1, n + 1):
        lo, hi = limit_level_probability(k, args.d, tol)
        # round outward to keep a readable but still valid enclosure
        lo = Fraction(lo.numerator * scale // lo.denominator, scale)
        hi = Fraction(-(hi.numerator * -scale // hi.denominator), scale)
        lines.append(",".join([
            str(k), str(volume_left(k)), str(ownership_count(k, args.d)),
            _fmt(root_level_probability(k, n, args.d)), _fmt(lo), _fmt(hi)]))
    _emit(cfg, lines, args.out)


def cmd_flow(cfg: RunConfig, args) -> None:
    from .flow import build_unit_flow, energy_analytic, energy_exact
    if args.k is None:
        raise SystemExit2("flow needs --k")
    mode = args.mode or "analytic"
    if mode == "analytic":
        report = energy_analytic(args.k)
        flow = None
    elif mode == "exact":
        flow = build_unit_flow(args.k, budget=args.budget)
        report = energy_exact(flow)
    else:
        raise SystemExit2(f"unknown mode {mode!r}")
    emit = args.emit or "csv"
    if emit == "csv":
        row = report.as_row()
        lines = [",".join(row), ",".join(_fmt(v) for v in row.values())]
    elif emit == "edges":
        if flow is None:
            flow = build_unit_flow(args.k, budget=args.budget)
        from .topology import format_coordinate
        lines = sorted(
            f"{format_coordinate(u)} {format_coordinate(v)} {_fmt(val)}"
            for (u, v), val in flow.values.items())
    else:
        raise SystemExit2(f"unknown emit {emit!r}")
    _emit(cfg, lines, args.out)


def cmd_resist(cfg: RunConfig, args) -> None:
    from .electrical import junction_resistance_profile
    if args.K is None:
        raise SystemExit2("resist needs --K")
    tol = args.tol if args.tol is not None else 1e-10
    prof = junction_resistance_profile(args.K, tol=tol, d=args.d, budget=args.budget)
    lines = ["K,k,R,residual,iters"]
    for k, rr in prof:
        lines.append(",".join([str(args.K), str(k), _fmt(rr.value),
                               _fmt(rr.residual), str(rr.iterations)]))
    _emit(cfg, lines, args.out)


def cmd_walk(cfg: RunConfig, args) -> None:
    from .assembly import assemble_tn, format_address, parse_address, spine_truncation
    from .walk import simulate_spine_hitting
    if args.seed is None:
        raise SystemExit2("walk needs --seed")
    if args.n is not None:
        g = assemble_tn(args.n, d=args.d, budget=args.budget)
    elif args.K is not None:
        g = spine_truncation(args.K, d=args.d, budget=args.budget)
    else:
        raise SystemExit2("walk needs --n or --K")
    spine = set(g.meta["spine"])
    if args.start:
        start = g.index[parse_address(args.start)]
    else:
        comp = g.bfs_distances(g.meta["spine"][0])
        start = min(v for v in comp if v not in spine)
    runs = args.runs or 10_000
    horizon = args.horizon or 100_000
    stats = simulate_spine_hitting(g, start, runs=runs, horizon=horizon,
                                   seed=args.seed)
    lines = ["start,runs,horizon,hits,frequency,q50,q90,q99",
             ",".join([f'"{format_address(g.labels[start])}"', str(runs),
                       str(horizon), str(stats.hits), _fmt(stats.hit_frequency),
                       str(stats.hit_time_quantiles.get(0.5, -1)),
                       str(stats.hit_time_quantiles.get(0.9, -1)),
                       str(stats.hit_time_quantiles.get(0.99, -1))])]
    _emit(cfg, lines, args.out)


def cmd_mtp(cfg: RunConfig, args) -> None:
    from .assembly import assemble_tn
    from .diagnostics import mtp_check, random_transport_functions
    if args.seed is None:
        raise SystemExit2("mtp needs --seed")
    n = args.n or 2
    g = assemble_tn(n, d=args.d, budget=args.budget)
    fns = random_transport_functions(args.count or 10, args.r or 1, args.seed)
    lines = ["index,lhs,rhs,equal"]
    for i, fn in enumerate(fns):
        lhs, rhs = mtp_check(g, fn)
        lines.append(f"{i},{_fmt(lhs)},{_fmt(rhs)},{int(lhs == rhs)}")
    _emit(cfg, lines, args.out)


def cmd_lwc(cfg: RunConfig, args) -> None:
    from .assembly import assemble_tn
    from .diagnostics import lwc_diagnostic
    if args.seed is None:
        raise SystemExit2("lwc needs --seed")
    n1, n2 = args.n1 or 1, args.n2 or 2
    g1 = assemble_tn(n1, d=args.d, budget=args.budget)
    g2 = assemble_tn(n2, d=args.d, budget=args.budget)
    rep = lwc_diagnostic(g1, g2, args.r or 1, samples=args.samples or 0,
                         seed=args.seed)
    lines = ["r,tv,confidence_radius,size_a,size_b",
             f"{rep.radius},{_fmt(rep.tv)},{_fmt(rep.confidence_radius)},"
             f"{rep.sizes[0]},{rep.sizes[1]}"]
    _emit(cfg, lines, args.out)


def cmd_delta(cfg: RunConfig, args) -> None:
    from .diagnostics import gromov_delta_exact, gromov_delta_sampled
    from .topology import FULL, MeatballSpec, materialize_meatball
    if args.k is None:
        raise SystemExit2("delta needs --k (meatball parameter)")
    g = materialize_meatball(MeatballSpec(args.k), FULL, budget=args.budget)
    mode = args.mode or "exact"
    if mode == "exact":
        st = gromov_delta_exact(g, instance=f"meatball-{args.k}")
    elif mode == "sampled":
        if args.seed is None:
            raise SystemExit2("sampled delta needs --seed")
        st = gromov_delta_sampled(g, args.quadruples or 10_000, seed=args.seed,
                                  instance=f"meatball-{args.k}")
    else:
        raise SystemExit2(f"unknown mode {mode!r}")
    lines = ["instance,mode,delta,quadruples",
             f"{st.instance},{mode},{_fmt(st.delta)},{st.quadruples_scanned}"]
    _emit(cfg, lines, args.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="souvlaki",
                                 description="canopy-tree souvlaki toolkit")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    common: dict = {}

    def add(name, fn):
        p = sub.add_parser(name)
        p.set_defaults(fn=fn)
        p.add_argument("--k", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--K", type=int)
        p.add_argument("--d", type=int, default=7)
        p.add_argument("--r", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--out")
        p.add_argument("--format", "--export", dest="format")
        p.add_argument("--mode")
        p.add_argument("--emit")
        p.add_argument("--count", type=int)
        p.add_argument("--runs", type=int)
        p.add_argument("--horizon", type=int)
        p.add_argument("--start")
        p.add_argument("--n1", type=int)
        p.add_argument("--n2", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--quadruples", type=int)
        common[name] = p
        return p

    add("build", cmd_build)
    add("export", cmd_build)
    add("census", cmd_census)
    add("flow", cmd_flow)
    add("resist", cmd_resist)
    add("walk", cmd_walk)
    add("mtp", cmd_mtp)
    add("lwc", cmd_lwc)
    add("delta", cmd_delta)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.subcommand == "export" and not args.out:
        ap.print_usage(sys.stderr)
        sys.stderr.write("export requires --out\n")
        return 2
    if args.d <= 6:
        ap.print_usage(sys.stderr)
        sys.stderr.write("branching --d must exceed 6\n")
        return 2
    cfg = RunConfig(subcommand=args.subcommand,
                    args={k: v for k, v in vars(args).items()
                          if k not in ("fn", "subcommand")})
    try:
        args.fn(cfg, args)
    except SystemExit2 as exc:
        ap.print_usage(sys.stderr)
        sys.stderr.write(f"{exc}\n")
        return 2
    except BudgetExceededError as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return 3
    except SolverError as exc:
        sys.stderr.write(f"solver failed: {exc}\n")
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
