"""Corpus evaluation and ablation sweeps.

Every config is scored against its own Seasonal Naive run; corpus-level
numbers are geometric means of those per-config ratios. Sweep arms are
compared to a baseline arm with a family-grouped bootstrap CI and a
sign-flip test, Holm-adjusted across arms.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..cascade import CascadeConfig, forecast, quantiles
from ..period import candidates_for, select_period
from ..series import TimeSeries, positivity_shift
from ..shape import LEARNING_VARIANTS, ShapeVariant
from . import metrics as mt
from .stats import DEFAULT_B, grouped_paired_bootstrap, holm_adjust, sign_flip_test

log = logging.getLogger(__name__)

K_SWEEP_ARMS = (1, 2, 4, 5, 10, None)      # None = all cycles (K = n_c)


class SweepKind(str, enum.Enum):
    K = "k"
    SHAPE_VARIANT = "shape-variant"
    PERIOD_MISSPEC = "period-misspec"
    COVERAGE = "coverage"


@dataclass
class MetricReport:
    per_config: dict
    rel_mase: float
    rel_crps: float
    excluded: dict = field(default_factory=dict)

    @property
    def n_configs(self) -> int:
        return len(self.per_config)

    def to_dict(self) -> dict:
        return {
            "rel_mase": self.rel_mase,
            "rel_crps": self.rel_crps,
            "n_configs": self.n_configs,
            "n_excluded": len(self.excluded),
            "excluded": self.excluded,
            "per_config": self.per_config,
        }


def reference_period(entry) -> int:
    """Seasonal period used for MASE scaling and the naive baseline: P* or 1."""
    ts = TimeSeries(entry["train"], entry.get("freq"))
    choice = select_period(positivity_shift(ts).values, candidates_for(ts.freq))
    return choice.P_star if choice.P_star >= 2 else 1


def score_forecast(entry, result, m: int) -> dict:
    """Metrics of one forecast against the entry's test window."""
    train = np.asarray(entry["train"], dtype=np.float64)
    test = np.asarray(entry["test"], dtype=np.float64)
    scale = mt.mase_scale(train, m)
    naive = mt.seasonal_naive(train, m, test.size)
    naive_mae = float(np.mean(np.abs(test - naive)))
    if naive_mae == 0.0:
        raise mt.DegenerateMetric("seasonal naive is exact on the test window")
    mae = float(np.mean(np.abs(test - result.point)))
    crps = mt.crps_path(test, result.samples)
    qm = quantiles(result, mt.DECILES)
    out = {
        "mase": mae / scale,
        "crps": crps / scale,
        "naive_mase": naive_mae / scale,
        "mase_ratio": mae / naive_mae,
        "crps_ratio": crps / naive_mae,
        "m": m,
        "branch": result.branch.value,
    }
    try:
        out["wql"] = mt.wql(test, qm, mt.DECILES)
    except mt.DegenerateMetric:
        out["wql"] = None
    for lvl in mt.COVERAGE_LEVELS:
        out[f"coverage_{lvl}"] = mt.coverage(test, result.samples, lvl)
    return out


def evaluate_entry(entry, config: CascadeConfig, m: int | None = None) -> dict:
    m = reference_period(entry) if m is None else m
    ts = TimeSeries(entry["train"], entry.get("freq"))
    result = forecast(ts, len(entry["test"]), config)
    return score_forecast(entry, result, m)


def _safe_eval(args):
    entry, config, m = args
    try:
        return evaluate_entry(entry, config, m)
    except mt.DegenerateMetric as exc:
        return {"error": f"degenerate: {exc}"}
    except Exception as exc:  # arm failures are recorded, never abort a sweep
        return {"error": f"{type(exc).__name__}: {exc}"}


def _map(fn, items, jobs: int):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [fn(x) for x in items]


def evaluate(corpus, config: CascadeConfig | None = None, jobs: int = 1) -> MetricReport:
    """relMASE / relCRPS of the forecaster over a corpus."""
    config = config or CascadeConfig()
    corpus = list(corpus)
    periods = [reference_period(e) for e in corpus]
    rows = _map(_safe_eval, [(e, config, m) for e, m in zip(corpus, periods)], jobs)
    return _report(corpus, rows)


def _report(corpus, rows) -> MetricReport:
    per_config, excluded = {}, {}
    for entry, row in zip(corpus, rows):
        sid = entry["series_id"]
        if "error" in row:
            excluded[sid] = row["error"]
            log.warning("config %s excluded: %s", sid, row["error"])
        else:
            per_config[sid] = row
    if per_config:
        rel_mase = mt.geomean([r["mase_ratio"] for r in per_config.values()])
        rel_crps = mt.geomean([r["crps_ratio"] for r in per_config.values()])
    else:
        rel_mase = rel_crps = float("nan")
    return MetricReport(per_config, rel_mase, rel_crps, excluded)


# --------------------------------------------------------------------------
# sweeps


def _arms(kind: SweepKind, arms):
    if kind is SweepKind.K:
        arms = K_SWEEP_ARMS if arms is None else arms
        return [(f"K={'n_c' if k is None else k}", {"shape_k": k}) for k in arms], "K=2"
    if kind is SweepKind.SHAPE_VARIANT:
        kinds = [ShapeVariant.FROZEN_K2, *LEARNING_VARIANTS] if arms is None else \
            [ShapeVariant(a) for a in arms]
        return [(k.value, {"shape_variant": k}) for k in kinds], ShapeVariant.FROZEN_K2.value
    if kind is SweepKind.COVERAGE:
        return [("flair", {})], "flair"
    raise ValueError(kind)


def misspec_periods(P: int, offsets=None):
    """Forced periods around a reference P (half, +-1, +-2, double by default)."""
    if offsets is None:
        cands = [P // 2, P - 2, P - 1, P, P + 1, P + 2, 2 * P]
    else:
        cands = [P + int(o) for o in offsets]
    return sorted(set(c for c in cands if c >= 2))


def sweep(kind, corpus, config: CascadeConfig | None = None, arms=None, B: int = DEFAULT_B,
          seed: int = 0, jobs: int = 1, offsets=None) -> dict:
    """Run one ablation sweep; returns a JSON-ready report with a ``rows`` table."""
    kind = SweepKind(kind)
    config = config or CascadeConfig()
    corpus = list(corpus)
    periods = [reference_period(e) for e in corpus]

    if kind is SweepKind.PERIOD_MISSPEC:
        return _period_misspec(corpus, periods, config, jobs, offsets)

    arm_list, baseline = _arms(kind, arms)
    results = {}
    for name, overrides in arm_list:
        cfg = config.with_(**overrides)
        rows = _map(_safe_eval, [(e, cfg, m) for e, m in zip(corpus, periods)], jobs)
        results[name] = rows

    families = [e.get("family") or e["series_id"] for e in corpus]
    table = _compare_arms(results, baseline, families, B, seed)
    if kind is SweepKind.COVERAGE:
        for row in table:
            ok = [r for r in results[row["arm"]] if "error" not in r]
            for lvl in mt.COVERAGE_LEVELS:
                row[f"coverage_{lvl}"] = float(np.mean([r[f"coverage_{lvl}"] for r in ok])) \
                    if ok else None
    return {"kind": kind.value, "baseline": baseline, "rows": table}


def _compare_arms(results, baseline, families, B, seed):
    base = results[baseline]
    table = []
    for name, rows in results.items():
        ok = [i for i, r in enumerate(rows) if "error" not in r]
        row = {"arm": name, "n_ok": len(ok), "n_failed": len(rows) - len(ok)}
        row["rel_mase"] = mt.geomean([rows[i]["mase_ratio"] for i in ok]) if ok else None
        row["rel_crps"] = mt.geomean([rows[i]["crps_ratio"] for i in ok]) if ok else None
        paired = [i for i in ok if "error" not in base[i]]
        if name != baseline and paired:
            d = np.array([np.log(rows[i]["mase_ratio"] / base[i]["mase_ratio"]) for i in paired])
            ci = grouped_paired_bootstrap(d, [families[i] for i in paired], B=B, seed=seed)
            row.update(
                delta_pct=100.0 * float(d.mean()),
                ci_lo_pct=100.0 * float(np.log(ci.lo)),
                ci_hi_pct=100.0 * float(np.log(ci.hi)),
                ci_degenerate=ci.degenerate,
                p_value=sign_flip_test(d, B, seed),
            )
        table.append(row)
    tested = [r for r in table if "p_value" in r]
    if tested:
        adj = holm_adjust([r["p_value"] for r in tested])
        for r, a in zip(tested, adj):
            r["p_holm"] = float(a)
    return table


def _period_misspec(corpus, periods, config, jobs, offsets):
    """Force P to offsets around each config's reference period."""
    per_entry = []
    jobs_list = []
    for e, m in zip(corpus, periods):
        forced = misspec_periods(m, offsets) if m >= 2 else []
        per_entry.append(forced)
        for P in forced:
            jobs_list.append((e, config.with_(force_period=P), m))
    flat = _map(_safe_eval, jobs_list, jobs)
    it = iter(flat)
    by_offset = {}
    for e, m, forced in zip(corpus, periods, per_entry):
        rows = {P: next(it) for P in forced}
        ref = rows.get(m)
        if ref is None or "error" in ref:
            continue
        for P, r in rows.items():
            if "error" in r:
                continue
            by_offset.setdefault(P - m, []).append(r["mase"] / ref["mase"] if ref["mase"] > 0
                                                   else np.inf)
    table = [
        {"offset": off, "n": len(v), "median_mase_ratio": float(np.median(v)),
         "geomean_mase_ratio": mt.geomean(v) if np.all(np.isfinite(v)) else None}
        for off, v in sorted(by_offset.items())
    ]
    return {"kind": SweepKind.PERIOD_MISSPEC.value, "baseline": "offset=0", "rows": table}
