"""Command-line interface.

Exit codes: 0 positive verdict / valid / verified, 1 negative verdict,
2 input error, 3 capacity or overflow, 4 internal verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import formats
from .cstn import DEFAULT_MAX_EXPANDED_NODES, wd_warnings
from .dc import (
    as_epsilon,
    check_dc,
    check_edc,
    construct_h_epsilon,
    estimate_epsilon_hat,
    verify_strategy,
)
from .errors import CapacityError, InputError, VerificationError
from .generators import (
    GammaNParams,
    gen_from_3cnf,
    gen_gamma_n,
    gen_gamma_n_strategy,
    gen_random_cstn,
    parse_dimacs,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAPACITY, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _load(path):
    return formats.parse_cstn(_read(path), source=str(path))


def _emit(args, out, report, lines):
    if args.json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")


def _split_stats(stats):
    stats = dict(stats)
    timing = {"wall_time": stats.pop("wall_time")} if "wall_time" in stats else {}
    return stats, timing


def cmd_validate(args, out):
    g = _load(args.file)
    warnings = [str(v) for v in wd_warnings(g)]
    report = {
        "valid": True,
        "propositions": len(g.propositions),
        "nodes": len(g.nodes),
        "constraints": len(g.constraints),
        "warnings": warnings,
    }
    lines = [f"valid: {len(g.propositions)} propositions, {len(g.nodes)} nodes, {len(g.constraints)} constraints"]
    lines += [f"warning: {w}" for w in warnings]
    _emit(args, out, report, lines)
    return EXIT_OK


def _dc_report(args, out, g, report):
    stats, timing = _split_stats(report.stats)
    doc = {
        "verdict": report.verdict.value,
        "epsilon": formats.format_rational(report.epsilon),
        "stats": stats,
        "timing": timing,
    }
    lines = [f"{report.verdict.value} (epsilon {report.epsilon})"]
    lines.append(
        f"  {stats['scenarios']} scenarios, {stats['hytn_nodes']} HyTN nodes, "
        f"{stats['hyperarcs']} hyperarcs, {stats['iterations']} lifts"
    )
    if report.positive and getattr(args, "strategy", None):
        _write(args.strategy, formats.serialize_strategy(g, report.strategy))
        lines.append(f"  strategy written to {args.strategy}")
    if not report.positive:
        losing = sorted(report.certificate)
        doc["losing_nodes"] = losing
        lines.append(f"  {len(losing)} HyTN nodes with infinite energy, e.g. {', '.join(losing[:5])}")
        if getattr(args, "cert", None):
            _write(args.cert, json.dumps({"losing_nodes": losing}, indent=2) + "\n")
            lines.append(f"  certificate written to {args.cert}")
    _emit(args, out, doc, lines)
    return EXIT_OK if report.positive else EXIT_NEGATIVE


def cmd_check_dc(args, out):
    g = _load(args.file)
    return _dc_report(args, out, g, check_dc(g, max_nodes=args.max_nodes))


def cmd_check_edc(args, out):
    g = _load(args.file)
    return _dc_report(args, out, g, check_edc(g, as_epsilon(args.epsilon), max_nodes=args.max_nodes))


def cmd_verify(args, out):
    g = _load(args.file)
    sigma = formats.parse_strategy(_read(args.strategy), g)
    eps = as_epsilon(args.epsilon) if args.epsilon else None
    rep = verify_strategy(g, sigma, eps)
    doc = {
        "viable": rep.viable,
        "dynamic": rep.dynamic,
        "eps_dynamic": rep.eps_dynamic,
        "epsilon": formats.format_rational(eps) if eps else None,
        "verified": rep.ok,
        "failures": {
            "viability": [list(map(str, f)) for f in rep.viability_failures],
            "dynamic": [list(map(str, f)) for f in rep.dynamic_failures],
            "eps": [list(map(str, f)) for f in rep.eps_failures],
        },
    }
    _emit(args, out, doc, [("verified: " if rep.ok else "rejected: ") + rep.summary()])
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_epsilon_hat(args, out):
    g = _load(args.file)
    started = time.perf_counter()
    b = estimate_epsilon_hat(g, resolution=args.resolution, max_nodes=args.max_nodes)
    fmt = lambda x: None if x is None else formats.format_rational(x)  # noqa: E731
    doc = {
        "dc": b.dc,
        "lo": fmt(b.lo),
        "hi": fmt(b.hi),
        "probes": [[formats.format_rational(e), ok] for e, ok in b.probes],
        "timing": {"wall_time": time.perf_counter() - started},
    }
    if not b.dc:
        lines = ["NotDC: no epsilon works"]
    elif b.hi is None:
        lines = [f"epsilon-hat >= {b.lo}"]
    else:
        lines = [f"{b.lo} <= epsilon-hat < {b.hi}"]
    _emit(args, out, doc, lines)
    return EXIT_OK if b.dc else EXIT_NEGATIVE


def _gen_output(args, out, g, sigma=None):
    text = formats.serialize_cstn(g)
    if args.output:
        _write(args.output, text)
    else:
        out.write(text)
    if sigma is not None and getattr(args, "strategy", None):
        _write(args.strategy, formats.serialize_strategy(g, sigma))
    return EXIT_OK


def cmd_gen(args, out):
    if args.family == "gamma-n":
        params = GammaNParams(args.n)
        return _gen_output(args, out, gen_gamma_n(params), gen_gamma_n_strategy(params))
    if args.family == "cnf":
        return _gen_output(args, out, gen_from_3cnf(parse_dimacs(_read(args.dimacs))))
    g = gen_random_cstn(args.nodes, args.props, args.density, args.weights, args.seed)
    return _gen_output(args, out, g)


def cmd_simulate(args, out):
    from .simulate import SimulationAborted, run

    g = _load(args.file)
    sigma = formats.parse_strategy(_read(args.strategy), g)
    read = input
    if args.input:
        def read():
            line = args.input.readline()
            if not line:
                raise EOFError
            out.write(line if line.endswith("\n") else line + "\n")
            return line

    try:
        run(g, sigma, read=read, write=out.write)
    except SimulationAborted:
        out.write("aborted\n")
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_export_dot(args, out):
    g = _load(args.file)
    obj = construct_h_epsilon(g, as_epsilon(args.epsilon), args.max_nodes) if args.epsilon else g
    out.write(formats.export_dot(obj))
    return EXIT_OK


def cmd_bench(args, out):
    if not Path(args.dir).is_dir():
        raise InputError(f"{args.dir} is not a directory")
    files = sorted(Path(args.dir).glob("*.cstn"))
    rows = []
    for path in files:
        row = {"file": path.name}
        try:
            report = check_dc(_load(path), max_nodes=args.max_nodes)
            stats, timing = _split_stats(report.stats)
            row.update(verdict=report.verdict.value, stats=stats, timing=timing)
        except CapacityError as exc:
            row.update(verdict="capacity", error=str(exc))
        except InputError as exc:
            row.update(verdict="input-error", error=str(exc))
        rows.append(row)
    lines = []
    for r in rows:
        if "stats" in r:
            s = r["stats"]
            lines.append(
                f"{r['file']:<30} {r['verdict']:<8} nodes={s['hytn_nodes']:<8} "
                f"hyperarcs={s['hyperarcs']:<8} lifts={s['iterations']:<10} "
                f"time={r['timing']['wall_time']:.3f}s"
            )
        else:
            lines.append(f"{r['file']:<30} {r['verdict']}: {r['error']}")
    _emit(args, out, {"instances": rows}, lines)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cstndc", description="Dynamic consistency of conditional simple temporal networks.")
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, file_arg=True):
        sp = sub.add_parser(name, help=help_text)
        if file_arg:
            sp.add_argument("file")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sp.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_EXPANDED_NODES,
                        help="refuse expansions with more nodes than this")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "parse and check well-definedness")
    sp = add("check-dc", cmd_check_dc, "decide dynamic consistency")
    sp.add_argument("--strategy", help="write the strategy here when DC")
    sp.add_argument("--cert", help="write the losing HyTN nodes here when not DC")
    sp = add("check-edc", cmd_check_edc, "decide epsilon-dynamic consistency")
    sp.add_argument("--epsilon", required=True, help="reaction time as N/D")
    sp.add_argument("--strategy")
    sp.add_argument("--cert")
    sp = add("verify", cmd_verify, "check a strategy document against a network")
    sp.add_argument("--strategy", required=True)
    sp.add_argument("--epsilon")
    sp = add("epsilon-hat", cmd_epsilon_hat, "bracket the largest workable reaction time")
    sp.add_argument("--resolution", type=int, default=64)
    sp = add("simulate", cmd_simulate, "step through a strategy interactively")
    sp.add_argument("--strategy", required=True)
    sp.add_argument("--input", type=argparse.FileType("r"), help="read answers from this file")
    sp = add("export-dot", cmd_export_dot, "Graphviz rendering of the network or of H_eps")
    sp.add_argument("--epsilon", help="render the HyTN H_eps instead of the network")
    sp = add("bench", cmd_bench, "run check-dc on every *.cstn in a directory", file_arg=False)
    sp.add_argument("dir")

    gp = sub.add_parser("gen", help="generate instances")
    gsub = gp.add_subparsers(dest="family", required=True)
    g1 = gsub.add_parser("gamma-n", help="the Gamma^n family")
    g1.add_argument("--n", type=int, required=True)
    g1.add_argument("--strategy", help="also write the closed-form strategy here")
    g2 = gsub.add_parser("cnf", help="the network of a 3-CNF formula")
    g2.add_argument("--dimacs", required=True)
    g3 = gsub.add_parser("random", help="a random well-defined CSTN")
    g3.add_argument("--nodes", type=int, required=True)
    g3.add_argument("--props", type=int, required=True)
    g3.add_argument("--seed", type=int, required=True)
    g3.add_argument("--density", type=float, default=0.3)
    g3.add_argument("--weights", type=int, default=10)
    for sp in (g1, g2, g3):
        sp.add_argument("-o", "--output", help="write the network here instead of stdout")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    gp.set_defaults(func=cmd_gen)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except CapacityError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CAPACITY
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except VerificationError as exc:
        err.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
