"""Command-line interface.

Subcommands: decide, threshold, grid, simulate, expected, report.  Exit
codes form a stable contract: 0 success (Accept for ``decide``),
1 Reject (``decide`` only), 2 error.  ``--machine`` switches to a single
JSON record per invocation with numbers at 10 significant digits; human
output prints money with 2 decimals.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config
from .errors import ConfigError, MissingGuessError, NoBracketError, OutOfDomainError
from .reporting import GRID_KINDS, grid_table, write_grid, write_report
from .simulate import compare_strategies, estimate_expected_price
from .strategy import (
    DecisionModel,
    StrategySpec,
    Verdict,
    decide,
    decide_with_guess,
    expected_price,
    find_threshold,
)

_STRATEGY_HELP = (
    "strategy token: optimal | always-accept | always-reject | guess | "
    "threshold=PRICE | tabulated=FILE.json"
)


def _round10(x: float) -> float:
    return float(format(x, ".10g"))


def _jsonable(value):
    if isinstance(value, float):
        return _round10(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def emit_machine(record: dict) -> None:
    print(json.dumps(_jsonable(record), sort_keys=True))


def _resolve_strategy(token: str, model: DecisionModel) -> tuple[str, StrategySpec]:
    if token == "optimal":
        result = find_threshold(model)
        if result.kind == "always-accept":
            return token, StrategySpec.always_accept()
        if result.kind == "always-reject":
            return token, StrategySpec.always_reject()
        return token, StrategySpec.threshold_at(result.value)
    if token == "always-accept":
        return token, StrategySpec.always_accept()
    if token == "always-reject":
        return token, StrategySpec.always_reject()
    if token == "guess":
        return token, StrategySpec.guessing_surface()
    if token.startswith("threshold="):
        return token, StrategySpec.threshold_at(float(token.split("=", 1)[1]))
    if token.startswith("tabulated="):
        path = token.split("=", 1)[1]
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        from .pricing import PriceRange

        rng = PriceRange(float(raw["x_min"]), float(raw["x_max"]))
        return token, StrategySpec.tabulated(raw["values"], rng)
    raise ValueError(f"unknown strategy token {token!r}; {_STRATEGY_HELP}")


def _cmd_decide(args, model: DecisionModel, machine: bool) -> int:
    if args.guess is None:
        decision = decide(args.price, model)
        threshold = find_threshold(model)
        record = {
            "command": "decide",
            "price": args.price,
            "guess": None,
            "verdict": decision.verdict.value,
            "h": decision.h_value,
            "boundary": decision.boundary,
            "threshold": threshold.value,
        }
        if machine:
            emit_machine(record)
        else:
            print(decision.verdict.value)
            print(f"h({args.price:.2f}) = {decision.h_value:.6g}")
            if threshold.value is not None:
                print(f"v0 = {threshold.value:.2f}")
            else:
                print(f"v0: none ({threshold.kind})")
    else:
        decision = decide_with_guess(args.price, args.guess, model)
        record = {
            "command": "decide",
            "price": args.price,
            "guess": args.guess,
            "verdict": decision.verdict.value,
            "h": decision.h_value,
            "boundary": decision.boundary,
            "threshold": None,
        }
        if machine:
            emit_machine(record)
        else:
            print(decision.verdict.value)
            print(f"h({args.price:.2f}, {args.guess:.2f}) = {decision.h_value:.6g}")
    return 0 if decision.verdict is Verdict.ACCEPT else 1


def _cmd_threshold(args, model: DecisionModel, machine: bool) -> int:
    result = find_threshold(model, x_tol=args.x_tol)
    record = {
        "command": "threshold",
        "value": result.value,
        "kind": result.kind,
        "bracket": list(result.bracket) if result.bracket else None,
        "sign_changes": result.sign_changes,
    }
    if machine:
        emit_machine(record)
    else:
        if result.value is not None:
            print(f"v0 = {result.value:.2f}")
            print(f"bracket = [{result.bracket[0]:.2f}, {result.bracket[1]:.2f}]")
        else:
            print(f"no sign change: {result.kind}")
        print(f"sign_changes = {result.sign_changes}")
        if result.sign_changes > 1:
            print("warning: multiple sign changes; leftmost root reported")
    return 0


def _cmd_grid(args, model: DecisionModel, machine: bool) -> int:
    out = args.out if args.out is not None else f"{args.what}.csv"
    header, rows = grid_table(args.what, model, args.resolution)
    try:
        write_grid(out, header, rows)
    except OSError as exc:
        print(f"error: cannot write grid to {out!r}: {exc}", file=sys.stderr)
        return 2
    record = {"command": "grid", "what": args.what, "path": out, "rows": len(rows)}
    if machine:
        emit_machine(record)
    else:
        print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _report_dict(label: str, report) -> dict:
    return {
        "strategy": label,
        "n": report.n,
        "mean_paid": report.mean_paid,
        "std_err": report.std_err,
        "accept_rate": report.accept_rate,
        "seed": report.seed,
    }


def _print_report(label: str, report) -> None:
    print(
        f"{label}: mean_paid = {report.mean_paid:.2f} "
        f"(std_err {report.std_err:.4f}), accept_rate = {report.accept_rate:.4f}, "
        f"n = {report.n}, seed = {report.seed}"
    )


def _cmd_simulate(args, model: DecisionModel, machine: bool, seed: int) -> int:
    if bool(args.strategy) == bool(args.compare):
        print("error: pass exactly one of --strategy or --compare", file=sys.stderr)
        return 2
    if args.n < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return 2
    if args.compare:
        tokens = [t.strip() for t in args.compare.split(",") if t.strip()]
        resolved = [_resolve_strategy(t, model) for t in tokens]
        reports = compare_strategies(
            [spec for _, spec in resolved], model, args.n, seed, workers=args.workers
        )
        record = {
            "command": "simulate",
            "reports": [
                _report_dict(label, rep)
                for (label, _), rep in zip(resolved, reports)
            ],
        }
        if machine:
            emit_machine(record)
        else:
            for (label, _), rep in zip(resolved, reports):
                _print_report(label, rep)
    else:
        label, spec = _resolve_strategy(args.strategy, model)
        report = estimate_expected_price(spec, model, args.n, seed, workers=args.workers)
        record = {"command": "simulate", "reports": [_report_dict(label, report)]}
        if machine:
            emit_machine(record)
        else:
            _print_report(label, report)
    return 0


def _cmd_expected(args, model: DecisionModel, machine: bool) -> int:
    label, spec = _resolve_strategy(args.strategy, model)
    breakdown = expected_price(spec, model)
    record = {
        "command": "expected",
        "strategy": label,
        "mu0": breakdown.mu0,
        "mu1": breakdown.mu1,
        "total": breakdown.total,
    }
    if machine:
        emit_machine(record)
    else:
        print(f"strategy = {label}")
        print(f"mu0 = {breakdown.mu0:.2f}")
        print(f"mu1 = {breakdown.mu1:.2f}")
        print(f"total = {breakdown.total:.2f}")
    return 0


def _cmd_report(args, model: DecisionModel, machine: bool) -> int:
    try:
        paths = write_report(model, args.out_dir, resolution=args.resolution)
    except OSError as exc:
        print(f"error: cannot write report to {args.out_dir!r}: {exc}", file=sys.stderr)
        return 2
    record = {"command": "report", "paths": paths}
    if machine:
        emit_machine(record)
    else:
        for path in paths:
            print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discount-strategy",
        description="Accept/reject decision engine for a two-period discount economy.",
    )
    parser.add_argument("--config", metavar="PATH", help="model config JSON (default: shipped parameters)")
    parser.add_argument("--machine", action="store_true", help="emit one JSON record")
    parser.add_argument("--seed", type=int, default=0, help="simulation seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="accept/reject a first-period price")
    p.add_argument("--price", type=float, required=True)
    p.add_argument("--guess", type=float, help="guessed second-period price")

    p = sub.add_parser("threshold", help="locate the acceptance threshold v0")
    p.add_argument("--x-tol", type=float, default=1e-6)

    p = sub.add_parser("grid", help="emit a curve/surface/density grid as CSV")
    p.add_argument("--what", choices=GRID_KINDS, required=True)
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--out", help="output path (default: <what>.csv)")

    p = sub.add_parser("simulate", help="Monte Carlo estimate of a strategy")
    p.add_argument("--strategy", help=_STRATEGY_HELP)
    p.add_argument("--compare", help="comma-separated strategy tokens, common random numbers")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("expected", help="semi-analytic expected price of a strategy")
    p.add_argument("--strategy", required=True, help=_STRATEGY_HELP)

    p = sub.add_parser("report", help="emit all grids as CSV plus rendered PNG figures")
    p.add_argument("--out-dir", default="report")
    p.add_argument("--resolution", type=int, default=101)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        model = load_config(args.config).decision_model()
        if args.command == "decide":
            return _cmd_decide(args, model, args.machine)
        if args.command == "threshold":
            return _cmd_threshold(args, model, args.machine)
        if args.command == "grid":
            return _cmd_grid(args, model, args.machine)
        if args.command == "simulate":
            return _cmd_simulate(args, model, args.machine, args.seed)
        if args.command == "expected":
            return _cmd_expected(args, model, args.machine)
        return _cmd_report(args, model, args.machine)
    except (ConfigError, OutOfDomainError, MissingGuessError, NoBracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
