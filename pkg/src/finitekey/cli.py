"""Command-line interface.

    finitekey rate   --n-signals 1e15 --qber 0.02
    finitekey sweep  --grid 1e4..1e15 --qber 0.02 --out q2.csv
    finitekey hash   key.bin --degree 128 --seed-hex 0123... --ell 64
    finitekey verify --count 1000 --seed 0

``--config FILE`` reads flat ``key = value`` lines (``#`` starts a comment)
using the long flag names with dashes or underscores; flags given on the
command line win. Exit status 0 covers "no key extractable"; input errors
exit with 2 and a lemma violation with 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .chsh import ChannelObservation, EstimationError
from .core import DomainError
from .entropy_oracle import run_lemma_suite
from .hashing import UnsupportedDegreeError, hash_bytes
from .optimize import ConfigurationError, OptimizationProblem, evaluate, optimize_rate, sweep

SWEEP_HEADER = ["N", "r", "p_a0", "p_b1", "eps_pe", "eps_bar", "eps_pa",
                "xi", "delta", "leak", "ell"]

# config key -> (parser, default)
_RUN_KEYS = {
    "n_signals": (lambda s: int(float(s)), None),
    "qber": (float, None),
    "correlators": (str, None),
    "eps": (float, 1e-5),
    "eps_ec": (float, 1e-10),
    "ec_efficiency": (float, 1.2),
    "p_a0": (float, None),
    "p_b1": (float, None),
    "eps_pe": (float, None),
    "eps_bar": (float, None),
    "union_bound": (lambda s: s.strip().lower() in ("1", "true", "yes", "on"), False),
    "grid": (str, None),
    "out": (str, None),
}


class UsageError(Exception):
    pass


def read_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _RUN_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def effective_config(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    raw = read_config(args.config) if args.config else {}
    cfg = {}
    for key, (parse, default) in _RUN_KEYS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
        elif key in raw:
            try:
                cfg[key] = parse(raw[key])
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {raw[key]!r}") from exc
        else:
            cfg[key] = default
    return cfg


def write_config(cfg: dict, path: str):
    with open(path, "w") as fh:
        for key in _RUN_KEYS:
            if key in ("out",) or cfg.get(key) is None:
                continue
            fh.write(f"{key} = {cfg[key]!r}\n" if isinstance(cfg[key], float)
                     else f"{key} = {cfg[key]}\n")


def parse_grid(text: str) -> list[int]:
    """``1e4,1e5,3e5`` or the decade range ``1e4..1e15``."""
    text = text.strip()
    if not text:
        raise UsageError("empty N grid")
    if ".." in text:
        lo, hi = (int(float(v)) for v in text.split(".."))
        grid = []
        n = lo
        while n <= hi:
            grid.append(n)
            n *= 10
        return grid
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _observation(cfg) -> ChannelObservation:
    corr = cfg["correlators"]
    if corr is not None:
        values = tuple(float(v) for v in str(corr).split(","))
        if len(values) != 4:
            raise UsageError("--correlators needs four values e11,e12,e21,e22")
        return ChannelObservation(qber=cfg["qber"], correlators=values)
    if cfg["qber"] is None:
        raise UsageError("need --qber or --correlators")
    return ChannelObservation(qber=cfg["qber"])


def _problem(cfg, n_signals=None) -> OptimizationProblem:
    n = n_signals if n_signals is not None else cfg["n_signals"]
    if n is None:
        raise UsageError("need --n-signals")
    return OptimizationProblem(
        n_signals=n,
        observation=_observation(cfg),
        eps_total=cfg["eps"],
        eps_ec=cfg["eps_ec"],
        f=cfg["ec_efficiency"],
        union_bound=cfg["union_bound"],
        p_a0=cfg["p_a0"],
        p_b1=cfg["p_b1"],
    )


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def format_report(report) -> str:
    c = report.counts
    b = report.budget
    lines = [
        f"N          {report.n_signals}",
        f"C          {report.chsh:.6f}",
        f"p_a0 p_b1  {report.p_a0:.6f} {report.p_b1:.6f}",
        f"n          {c.n_key}",
        f"m_ij       {c.m11} {c.m12} {c.m21} {c.m22}  (discarded {c.discarded})",
        f"eps split  pe={b.eps_pe:.3e} bar={b.eps_bar:.3e} ec={b.eps_ec:.3e} pa={b.eps_pa:.3e}",
        f"xi         {report.xi_total:.6g}",
        f"S_xi       {report.s_xi:.6f}",
        f"delta      {report.delta:.6g}",
        f"leak       {report.leak_bits:.6g} bits",
        f"ell        {report.key_bits} bits",
        f"r          {report.rate:.6g}",
    ]
    if report.reason:
        lines.append(f"reason     {report.reason}")
    return "\n".join(lines)


def cmd_rate(cfg, out=None) -> int:
    out = out or sys.stdout
    problem = _problem(cfg)
    fixed = [cfg[k] for k in ("p_a0", "p_b1", "eps_pe", "eps_bar")]
    if all(v is not None for v in fixed):
        eps_pa = problem.eps_total - problem.eps_ec - cfg["eps_pe"] - cfg["eps_bar"]
        report = evaluate(problem, (*fixed, eps_pa))
    else:
        report = optimize_rate(problem).best_report
    out.write(format_report(report) + "\n")
    record = json.dumps(report.as_dict(), sort_keys=True)
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(record + "\n")
    else:
        out.write(record + "\n")
    return 0


def sweep_table(cfg) -> str:
    if not cfg["grid"]:
        raise UsageError("need --grid")
    grid = parse_grid(cfg["grid"])
    if not grid:
        raise UsageError("empty N grid")
    results = sweep(_problem(cfg, n_signals=grid[0]), grid)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for opt in results:
        r = opt.best_report
        b = r.budget
        writer.writerow([_fmt(v) for v in (
            r.n_signals, r.rate, r.p_a0, r.p_b1, b.eps_pe, b.eps_bar, b.eps_pa,
            r.xi_total, r.delta, r.leak_bits, r.key_bits)])
    return buf.getvalue()


def cmd_sweep(cfg, out=None) -> int:
    out = out or sys.stdout
    table = sweep_table(cfg)
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(table)
    else:
        out.write(table)
    return 0


def cmd_hash(args, out=None) -> int:
    out = out or sys.stdout
    if args.input == "-":
        data = sys.stdin.buffer.read()
    else:
        with open(args.input, "rb") as fh:
            data = fh.read()
    out.write(hash_bytes(data, args.seed_hex, args.ell, args.degree) + "\n")
    return 0


def cmd_verify(args, out=None) -> int:
    out = out or sys.stdout
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    res = run_lemma_suite(args.count, args.seed)
    out.write(f"leakage lemma:         {res.count - res.leakage_failures}/{res.count} passed, "
              f"min slack {res.min_leakage_slack!r}\n")
    out.write(f"symmetrization lemma:  {res.count - res.symmetrization_failures}/{res.count} "
              f"passed, min slack {res.min_symmetrization_slack!r}\n")
    return 0 if res.passed else 1


def _add_run_flags(p):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--n-signals", dest="n_signals", type=lambda s: int(float(s)))
    p.add_argument("--qber", type=float)
    p.add_argument("--correlators", help="e11,e12,e21,e22")
    p.add_argument("--eps", type=float, help="total security parameter (default 1e-5)")
    p.add_argument("--eps-ec", dest="eps_ec", type=float, help="default 1e-10")
    p.add_argument("--ec-efficiency", dest="ec_efficiency", type=float, help="f, default 1.2")
    p.add_argument("--p-a0", dest="p_a0", type=float, help="fix Alice's key-setting bias")
    p.add_argument("--p-b1", dest="p_b1", type=float, help="fix Bob's key-setting bias")
    p.add_argument("--union-bound", dest="union_bound", action="store_const", const=True,
                   help="use eps_pe/4 per correlator estimate")
    p.add_argument("--out", help="write the machine-readable output here")
    p.add_argument("--dump-config", dest="dump_config",
                   help="write the effective configuration to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finitekey", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="optimized finite-key rate at one N")
    _add_run_flags(p)
    p.add_argument("--eps-pe", dest="eps_pe", type=float)
    p.add_argument("--eps-bar", dest="eps_bar", type=float)

    p = sub.add_parser("sweep", help="optimized rate over a grid of N (CSV)")
    _add_run_flags(p)
    p.add_argument("--grid", help="N values: '1e4,1e5' or decades '1e4..1e15'")

    p = sub.add_parser("hash", help="two-universal hash of a file")
    p.add_argument("input", help="input file, '-' for stdin")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--seed-hex", dest="seed_hex", required=True, help="multiplier r in hex")
    p.add_argument("--ell", type=int, required=True)

    p = sub.add_parser("verify", help="brute-force check of the entropy lemmas")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("rate", "sweep"):
            cfg = effective_config(args)
            if args.dump_config:
                write_config(cfg, args.dump_config)
            return cmd_rate(cfg) if args.command == "rate" else cmd_sweep(cfg)
        if args.command == "hash":
            return cmd_hash(args)
        return cmd_verify(args)
    except (UsageError, DomainError, ConfigurationError, EstimationError,
            UnsupportedDegreeError, ValueError, OSError) as exc:
        print(f"finitekey {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
