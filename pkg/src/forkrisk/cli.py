"""Command-line front end: ``bound``, ``simulate`` and ``figures`` subcommands."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .bounds import SweepRow, sweep
from .errors import HorizonTooSmall
from .confirmation import COMPOSITION, PRINTED
from .lead import LeadVariant
from .params import ProtocolParams
from .sim import MODES, PRIVATE_DELTA, SimConfig, simulate_end_to_end

_LEAD_VARIANTS = {
    "truncated": LeadVariant.TRUNCATED_LOWER,
    "full": LeadVariant.FULL_LOWER,
}

_INT_COLS = {"k", "trials", "truncated_trials"}
_BOOL_COLS = {"ultimate_ok", "rigged_ok", "two_step_ok", "three_way_ok"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage problems exit 1, not argparse's 2
        raise _UsageError(message)


def _rate(text: str) -> float:
    """Rates and probabilities, accepted as decimals or fractions like 1/600."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from exc


def _k_values(text: str) -> list[int]:
    """A single depth like ``6`` or an inclusive range like ``1..12``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise ValueError
            return list(range(lo_i, hi_i + 1))
        return [int(text)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad depth or range: {text!r}") from exc


def _fmt(value, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.{precision}g}"


def render_csv(rows: list[dict], precision: int) -> str:
    if not rows:
        return ""
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row[col], precision) for col in header))
    return "\n".join(lines) + "\n"


def render_json(rows: list[dict], precision: int) -> str:
    def clean(value):
        if isinstance(value, float):
            return float(f"{value:.{precision}g}")
        return value

    return json.dumps([{k: clean(v) for k, v in row.items()} for row in rows], indent=2) + "\n"


def parse_csv(text: str) -> list[dict]:
    """Invert :func:`render_csv` (used for the round-trip guarantee)."""
    lines = [line for line in text.splitlines() if line]
    if not lines:
        return []
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        row = {}
        for col, cell in zip(header, line.split(",")):
            if cell == "":
                row[col] = None
            elif col in _BOOL_COLS:
                row[col] = cell == "true"
            elif col in _INT_COLS:
                row[col] = int(cell)
            else:
                row[col] = float(cell)
        rows.append(row)
    return rows


def _render(rows: list[dict], fmt: str, precision: int) -> str:
    return render_json(rows, precision) if fmt == "json" else render_csv(rows, precision)


def _sweep_row_dict(row: SweepRow) -> dict:
    p = row.params
    return {
        "lambda": p.lam,
        "delta": p.delta,
        "alpha": p.alpha,
        "k": p.k,
        "lower": row.lower.value if row.lower else None,
        "lower_trunc_err": row.lower.truncation_error if row.lower else None,
        "upper": row.upper.value if row.upper else None,
        "upper_trunc_err": row.upper.truncation_error if row.upper else None,
        **row.regime.as_dict(),
    }


def _add_common_flags(sp: argparse.ArgumentParser, with_k: bool = True) -> None:
    sp.add_argument("--lambda", dest="lam", type=_rate, required=True,
                    help="mining rate in blocks/s (decimal or fraction)")
    sp.add_argument("--delta", type=_rate, required=True, help="delay bound in seconds")
    sp.add_argument("--alpha", type=_rate, required=True, help="honest fraction")
    if with_k:
        sp.add_argument("--k", type=_k_values, required=True,
                        help="confirmation depth, a value or a..b range")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--precision", type=int, default=6, help="significant digits")
    sp.add_argument("--eps", type=float, default=1e-12, help="PMF tail truncation")
    sp.add_argument("--lead-variant", choices=sorted(_LEAD_VARIANTS), default="truncated")
    sp.add_argument("--pmf-variant", choices=(PRINTED, COMPOSITION), default=PRINTED)


def _build_parser() -> _Parser:
    parser = _Parser(prog="forkrisk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bound", help="analytic discard-probability bounds")
    _add_common_flags(b)

    s = sub.add_parser("simulate", help="Monte Carlo end-to-end attack simulation")
    _add_common_flags(s)
    s.add_argument("--mode", choices=MODES, default=PRIVATE_DELTA)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--warmup", type=int, default=10_000, help="lead warm-up chain events")
    s.add_argument("--horizon", type=int, default=1_000_000, help="race step cap")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dump-hist", type=Path, default=None,
                   help="write raw lead/confirmation histograms to this CSV")

    f = sub.add_parser("figures", help="emit the standard sweep data files")
    f.add_argument("--outdir", type=Path, required=True)
    f.add_argument("--precision", type=int, default=6)
    f.add_argument("--eps", type=float, default=1e-12)
    f.add_argument("--lead-variant", choices=sorted(_LEAD_VARIANTS), default="full")
    f.add_argument("--pmf-variant", choices=(PRINTED, COMPOSITION), default=PRINTED)
    return parser


def _cmd_bound(args) -> int:
    base = ProtocolParams(lam=args.lam, delta=args.delta, alpha=args.alpha, k=args.k[0])
    rows = sweep(base, k_values=args.k, lead_variant=_LEAD_VARIANTS[args.lead_variant],
                 form=args.pmf_variant, eps=args.eps)
    sys.stdout.write(_render([_sweep_row_dict(r) for r in rows], args.format, args.precision))
    return 0


def _cmd_simulate(args) -> int:
    if len(args.k) != 1:
        raise _UsageError("simulate takes a single --k, not a range")
    k = args.k[0]
    params = ProtocolParams(lam=args.lam, delta=args.delta, alpha=args.alpha, k=k)
    cfg = SimConfig(params=params, trials=args.trials, warmup_blocks=args.warmup,
                    seed=args.seed, mode=args.mode, horizon=args.horizon)
    report = simulate_end_to_end(cfg, k, workers=args.workers)

    base = sweep(params, lead_variant=_LEAD_VARIANTS[args.lead_variant],
                 form=args.pmf_variant, eps=args.eps)[0]
    row = _sweep_row_dict(base)
    row.update({
        "freq": report.discard_freq,
        "stderr": report.stderr,
        "trials": report.trials,
        "truncated_trials": report.truncated_trials,
    })
    sys.stdout.write(_render([row], args.format, args.precision))

    if args.dump_hist is not None:
        lines = ["hist,index,count"]
        for name, hist in (("lead", report.lead_hist), ("conf", report.conf_count_hist)):
            for i, c in enumerate(hist.counts):
                lines.append(f"{name},{i},{int(c)}")
        args.dump_hist.write_text("\n".join(lines) + "\n")
    return 0


def _cmd_figures(args) -> int:
    lead_variant = _LEAD_VARIANTS[args.lead_variant]
    bitcoin = dict(lam=1 / 600, delta=10.0)
    ethereum = dict(lam=1 / 13, delta=2.0)
    ks = list(range(1, 13))
    specs = {
        "fig3.csv": ("k", ProtocolParams(**bitcoin, alpha=0.75, k=1), dict(k_values=ks)),
        "fig4.csv": ("k", ProtocolParams(**bitcoin, alpha=0.90, k=1), dict(k_values=ks)),
        "fig5.csv": ("k", ProtocolParams(**ethereum, alpha=0.75, k=1), dict(k_values=ks)),
        "fig6.csv": ("alpha", ProtocolParams(**bitcoin, alpha=0.75, k=6),
                     dict(alpha_values=[i / 100 for i in range(52, 100)])),
    }
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, (axis, base, grid) in specs.items():
        rows = sweep(base, which="both", lead_variant=lead_variant,
                     form=args.pmf_variant, eps=args.eps, **grid)
        table = [
            {
                axis: getattr(r.params, "k" if axis == "k" else "alpha"),
                "lower": r.lower.value if r.lower else None,
                "upper": r.upper.value if r.upper else None,
            }
            for r in rows
        ]
        path = args.outdir / name
        try:
            path.write_text(render_csv(table, args.precision))
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bound":
            return _cmd_bound(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_figures(args)
    except (_UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HorizonTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
