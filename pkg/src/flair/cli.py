"""Command-line entry point: forecast, diagnose, eval, sweep, generate.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .cascade import CascadeConfig, DEFAULT_SAMPLES, forecast, quantiles
from .diagnostics import diagnose, write_phase_diagram
from .evaluation import metrics as mt
from .evaluation.harness import SweepKind, evaluate, sweep
from .evaluation.stats import DEFAULT_B
from .io import dumps, ingest, write_jsonl
from .series import IngestionError, InsufficientData, TimeSeries
from .shape import ShapeVariant
from .synthetic import LSR1GenSpec, generate_corpus

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

# keys a config file may pin; everything else is rejected
CONFIG_KEYS = ("n_samples", "seed", "shape_k", "shape_variant", "phase_noise_k",
               "max_complete", "force_period", "pin_alpha", "temperature")

BANNER = "*** NON-CANONICAL CONSTANTS: results are for experiments only ***"

log = logging.getLogger("flair")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flair", description="Rank-1 level/shape seasonal forecaster.")
    p.add_argument("--version", action="version", version=f"flair {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="corpus file (.csv long format or .jsonl)")
            sp.add_argument("--input-format", choices=("csv", "jsonl"), default=None)
        sp.add_argument("--config", help="JSON file pinning constants (experiments only)")
        sp.add_argument("--output", help="write results here instead of stdout")
        sp.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
        sp.add_argument("-v", "--verbose", action="store_true")

    f = sub.add_parser("forecast", help="point forecasts, quantiles and diagnostics")
    common(f)
    f.add_argument("--horizon", type=_positive_int, required=True)
    f.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    f.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("diagnose", help="routing diagnosis per series")
    common(d)
    d.add_argument("--format", choices=("json", "text", "csv"), default="json")

    e = sub.add_parser("eval", help="relMASE / relCRPS against seasonal naive")
    common(e)
    e.add_argument("--baseline", choices=("seasonal-naive",), default="seasonal-naive")
    e.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--format", choices=("json", "text"), default="json")
    e.add_argument("--phase-diagram", help="also write a phase-diagram CSV here")

    s = sub.add_parser("sweep", help="ablation sweeps")
    common(s)
    s.add_argument("--kind", choices=[k.value for k in SweepKind], required=True)
    s.add_argument("--shape-variant", action="append", default=None,
                   choices=[v.value for v in ShapeVariant],
                   help="restrict the shape-variant sweep (repeatable)")
    s.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bootstrap", type=_positive_int, default=DEFAULT_B)
    s.add_argument("--format", choices=("json", "text", "csv"), default="json")

    g = sub.add_parser("generate", help="write a synthetic LSR1 corpus")
    g.add_argument("--spec", required=True, help="JSON file with LSR1 generator fields")
    g.add_argument("--out", required=True)
    g.add_argument("-v", "--verbose", action="store_true")
    return p


# --------------------------------------------------------------------------
# helpers


def _load_config(args) -> CascadeConfig:
    cfg = CascadeConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config must be a JSON object")
        unknown = sorted(set(raw) - set(CONFIG_KEYS))
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        if "shape_variant" in raw:
            raw["shape_variant"] = ShapeVariant(raw["shape_variant"])
        cfg = cfg.with_(**raw)
    overrides = {}
    if hasattr(args, "samples"):
        overrides["n_samples"] = args.samples
    if hasattr(args, "seed"):
        overrides["seed"] = args.seed
    cfg = cfg.with_(**overrides)
    if not cfg.is_canonical:
        print(BANNER, file=sys.stderr)
    return cfg


def _corpus(args):
    corpus = ingest(args.input, args.input_format)
    for sid, reason in corpus.rejected.items():
        print(f"rejected series {sid}: {reason}", file=sys.stderr)
    if not corpus.entries:
        raise IngestionError("no usable series in input")
    return corpus


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(rows, columns) -> str:
    """Aligned plain-text table."""
    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.4f}"
        return str(v)
    cells = [[fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _csv(rows, columns) -> str:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in columns})
    return buf.getvalue()


def _map(fn, items, jobs):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# --------------------------------------------------------------------------
# commands


def _forecast_one(args):
    entry, H, cfg = args
    ts = TimeSeries(entry["train"], entry.get("freq"))
    res = forecast(ts, H, cfg)
    q = quantiles(res, mt.DECILES)
    return {
        "schema_version": SCHEMA_VERSION,
        "series_id": entry["series_id"],
        "horizon": H,
        "branch": res.branch.value,
        "point": res.point,
        "quantiles": {f"{lvl:.1f}": q[i] for i, lvl in enumerate(mt.DECILES)},
        "diagnostics": res.diagnostics,
    }


def cmd_forecast(args) -> int:
    cfg = _load_config(args)
    corpus = _corpus(args)
    rows = _map(_forecast_one, [(e, args.horizon, cfg) for e in corpus], args.jobs)
    _emit(args, "".join(dumps(r) + "\n" for r in rows))
    return EXIT_OK


def _diagnose_one(entry):
    d = diagnose(TimeSeries(entry["train"], entry.get("freq"))).to_dict()
    d["series_id"] = entry["series_id"]
    return d


DIAG_COLUMNS = ("series_id", "P_star", "n_c", "r1_centered", "bbp_second_spike_subcritical",
                "headline_regime", "route")


def cmd_diagnose(args) -> int:
    _load_config(args)
    corpus = _corpus(args)
    rows = _map(_diagnose_one, list(corpus), args.jobs)
    if args.format == "text":
        _emit(args, _table(rows, DIAG_COLUMNS))
    elif args.format == "csv":
        _emit(args, _csv(rows, DIAG_COLUMNS))
    else:
        _emit(args, dumps({"schema_version": SCHEMA_VERSION, "rows": rows}) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    corpus = _corpus(args)
    corpus.require_test()
    report = evaluate(corpus.entries, cfg, jobs=args.jobs)
    if args.phase_diagram:
        diag = {r["series_id"]: r for r in _map(_diagnose_one, list(corpus), args.jobs)}
        rows = []
        for sid, d in diag.items():
            m = report.per_config.get(sid)
            rows.append({**d, "rel_mase": m["mase_ratio"] if m else None})
        write_phase_diagram(args.phase_diagram, rows)
    out = {"schema_version": SCHEMA_VERSION, "baseline": args.baseline,
           "canonical": cfg.is_canonical, **report.to_dict()}
    if args.format == "text":
        lines = [f"configs    {report.n_configs}", f"excluded   {len(report.excluded)}",
                 f"relMASE    {report.rel_mase:.4f}", f"relCRPS    {report.rel_crps:.4f}"]
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, dumps(out) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    corpus = _corpus(args)
    corpus.require_test()
    arms = args.shape_variant if args.kind == SweepKind.SHAPE_VARIANT.value else None
    if args.shape_variant and arms is None:
        raise UsageError("--shape-variant only applies to --kind shape-variant")
    res = sweep(args.kind, corpus.entries, cfg, arms=arms, B=args.bootstrap,
                seed=args.seed, jobs=args.jobs)
    rows = res["rows"]
    columns = list(dict.fromkeys(k for r in rows for k in r))
    if args.format == "csv":
        _emit(args, _csv(rows, columns))
    elif args.format == "text":
        _emit(args, _table(rows, columns))
    else:
        _emit(args, dumps({"schema_version": SCHEMA_VERSION, **res}) + "\n")
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            raw = json.load(fh)
        spec = LSR1GenSpec(**raw)
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        raise UsageError(f"bad generator spec {args.spec}: {exc}") from None
    entries = generate_corpus(spec)
    write_jsonl(args.out, [{"schema_version": SCHEMA_VERSION, **e} for e in entries])
    return EXIT_OK


COMMANDS = {"forecast": cmd_forecast, "diagnose": cmd_diagnose, "eval": cmd_eval,
            "sweep": cmd_sweep, "generate": cmd_generate}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestionError, InsufficientData) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # anything else is a broken invariant
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
