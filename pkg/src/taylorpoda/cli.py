"""Command-line front end: explain, evaluate, diagnose, dump-table.

Reports are JSON (stable key order) and embed the config echo, engine
version, masking-estimator label, and master seed, so a rerun with the same
seed reproduces the output byte for byte. Per-sample randomness is seeded
as master-seed XOR sample-index.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, allocation, attribution, dividends, masking, metrics, oracle, reference
from ._kernels import HAVE_COMPILED
from .errors import (
    BackgroundNotSingleRow,
    ConfigError,
    DegenerateLabels,
    DimensionError,
    EmptyFamilyList,
    EngineError,
    EnumerationGuard,
    InsufficientSamples,
    InvalidAllocation,
    InvalidAlpha,
    MissingCoalition,
    NonFiniteInput,
    NonFiniteOutput,
    NotPolynomial,
    OracleError,
    ParseError,
    SingularFit,
    UnsupportedActivation,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ORACLE = 3
EXIT_GUARD = 4

_CONFIG_ERRORS = (
    ConfigError,
    ParseError,
    DimensionError,
    UnsupportedActivation,
    NotPolynomial,
    BackgroundNotSingleRow,
    InvalidAllocation,
    InvalidAlpha,
    EmptyFamilyList,
    DegenerateLabels,
    InsufficientSamples,
    MissingCoalition,
    SingularFit,
)
_ORACLE_ERRORS = (OracleError, NonFiniteInput, NonFiniteOutput)

METHOD_CHOICES = ("occ1", "shap", "weightedshap", "taylorpoda", "lime")
METRIC_CHOICES = ("aup", "discrepancy", "inclusion-mse", "inclusion-auc")


@dataclass
class RunConfig:
    """Mirror of the CLI flags; see ``taylorpoda --help``."""

    model: Optional[str] = None
    data: Optional[str] = None
    background: Optional[str] = None
    methods: list = field(default_factory=lambda: list(METHOD_CHOICES))
    sigma: Optional[int] = None  # None = FULL
    n_candidates: int = 16
    include_uniform: bool = True
    alpha: float = 1.0
    seed: int = 0
    background_size: int = masking.DEFAULT_BACKGROUND_SIZE
    output: Optional[str] = None
    label_col: Optional[str] = None
    metrics: list = field(default_factory=lambda: ["aup", "discrepancy"])
    workers: int = 0  # 0 = available parallelism
    row: int = 0
    dump_dividends: bool = False
    svg_dir: Optional[str] = None
    dump_xi: Optional[str] = None
    cases: int = 12

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


def _jsonify(obj):
    """Recursively convert numpy scalars/arrays and NaN for strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return None if math.isnan(f) or math.isinf(f) else f
    return obj


def _write_report(report: dict, output: Optional[str]) -> None:
    text = json.dumps(_jsonify(report), indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_data(path, label_col):
    names, matrix = masking.read_numeric_csv(path)
    if label_col is None:
        return names, matrix, None
    if label_col not in names:
        raise ConfigError(f"label column {label_col!r} not in {names}")
    j = names.index(label_col)
    labels = matrix[:, j]
    feats = np.delete(matrix, j, axis=1)
    names = names[:j] + names[j + 1 :]
    return names, feats, labels


def _load_common(config: RunConfig):
    if not config.model:
        raise ConfigError("--model is required")
    if not config.data:
        raise ConfigError("--data is required")
    if not config.background:
        raise ConfigError("--background is required")
    model = oracle.load_model(config.model)
    names, X, labels = _read_data(config.data, config.label_col)
    if X.shape[0] < 1:
        raise ConfigError(f"{config.data}: no data rows")
    if X.shape[1] != model.input_dim:
        raise ConfigError(
            f"data has {X.shape[1]} feature columns, model expects {model.input_dim}"
        )
    drop = (config.label_col,) if config.label_col else ()
    bg, _bg_names = masking.BackgroundSet.from_csv(config.background, drop_columns=drop)
    if bg.dim != model.input_dim:
        raise ConfigError(
            f"background has {bg.dim} feature columns, model expects {model.input_dim}"
        )
    bg = bg.subsample(config.background_size, seed=config.seed)
    if config.sigma is not None and not 1 <= config.sigma <= model.input_dim:
        raise ConfigError(f"--sigma must be in 1..{model.input_dim}")
    return model, names, X, labels, bg


def _estimator_info(bg: masking.BackgroundSet) -> dict:
    return {
        "kind": masking.ESTIMATOR_LABEL,
        "background_rows": bg.size,
        "background_source": bg.source,
        "note": (
            "absent features are marginalized over an explicit background "
            "set (marginal, not conditional, expectation)"
        ),
    }


def _config_echo(config: RunConfig) -> dict:
    return {
        "model": config.model,
        "data": config.data,
        "background": config.background,
        "methods": list(config.methods),
        "sigma": config.sigma if config.sigma is not None else "FULL",
        "n_candidates": config.n_candidates,
        "include_uniform": config.include_uniform,
        "alpha": config.alpha,
        "seed": config.seed,
        "background_size": config.background_size,
        "label_col": config.label_col,
        "workers": config.effective_workers(),
    }


def _aup_extended(scores, table, extra, model, x, bg) -> float:
    """True AUP on capped tables: missing top-m chain values are evaluated."""
    chain = metrics.topm_masks(scores)
    need = [m for m in chain if m not in table and m not in extra]
    if need:
        extra.update(masking.evaluate_masks(model, x, bg, need))
    full = table.full_value
    return float(
        sum(abs(full - (table[m] if m in table else extra[m])) for m in chain)
    )


def _optimize_capped(table, candidates, sigma, extra, model, x, bg):
    divs = dividends.harsanyi_all(table)
    best = None
    aups = []
    for idx, cand in enumerate(candidates):
        attr = attribution.taylorpoda_capped(table, cand, sigma, dividends=divs)
        a = _aup_extended(attr.scores, table, extra, model, x, bg)
        attr.aup = a
        aups.append(a)
        if best is None or a < best[0]:
            best = (a, idx, cand, attr)
    _, idx, cand, attr = best
    attr.metadata.update(
        selected_candidate=idx, candidate_aups=aups, n_candidates=len(candidates)
    )
    return cand, attr


def _run_methods(model, x, bg, table, config: RunConfig, sample_seed: int):
    """All requested attributions for one sample on its shared table."""
    extra: dict = {}
    out = {}
    xis = {}
    for name in config.methods:
        if name == "occ1":
            attr = attribution.occ1(table)
        elif name == "shap":
            attr = attribution.shap_exact(table)
        elif name == "weightedshap":
            attr = attribution.weighted_shap(table)
        elif name == "taylorpoda":
            cands = allocation.generate_candidates(
                table.d,
                table.sigma,
                config.n_candidates,
                include_uniform=config.include_uniform,
                seed=sample_seed,
                alpha=config.alpha,
            )
            if table.is_full:
                xi, attr = allocation.optimize_xi(table, cands)
            else:
                xi, attr = _optimize_capped(
                    table, cands, table.sigma, extra, model, x, bg
                )
            attr.metadata["seed"] = sample_seed
            xis[name] = xi
        elif name == "lime":
            attr = attribution.lime(
                model, x, bg, attribution.LimeConfig(seed=sample_seed), table=table
            )
        else:
            raise ConfigError(f"unknown method {name!r}")
        if math.isnan(attr.aup):
            attr.aup = _aup_extended(attr.scores, table, extra, model, x, bg)
        out[name] = attr
    return out, xis


def _force_plot_data(attr, table, names, x) -> dict:
    return {
        "base_value": table.empty_value,
        "contributions": [float(v) for v in attr.scores],
        "final_value": table.full_value,
        "feature_names": list(names),
        "feature_values": [float(v) for v in x],
        "alignment_gap": float(
            table.empty_value + float(np.sum(attr.scores)) - table.full_value
        ),
    }


def force_plot_svg(fp: dict, title: str = "") -> str:
    """Minimal static force plot: signed contribution segments from base to final."""
    base = fp["base_value"]
    contribs = fp["contributions"]
    names = fp["feature_names"]
    values = fp["feature_values"]
    order = metrics.importance_order(contribs)
    positions = [base]
    for i in order:
        positions.append(positions[-1] + contribs[i])
    lo, hi = min(positions), max(positions)
    span = (hi - lo) or 1.0
    pad = 0.08 * span
    lo, hi = lo - pad, hi + pad

    def sx(v):
        return 40.0 + 720.0 * (v - lo) / (hi - lo)

    rows = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="800" height="220" '
        'font-family="sans-serif" font-size="11">',
        f'<text x="40" y="20" font-size="13">{title}</text>',
        f'<line x1="{sx(base):.2f}" y1="50" x2="{sx(base):.2f}" y2="120" '
        'stroke="#555" stroke-dasharray="4 3"/>',
        f'<text x="{sx(base):.2f}" y="44" text-anchor="middle">base {base:.4g}</text>',
    ]
    for k, i in enumerate(order):
        x0, x1 = sx(positions[k]), sx(positions[k + 1])
        color = "#d1574a" if contribs[i] >= 0 else "#4a7dd1"
        rows.append(
            f'<rect x="{min(x0, x1):.2f}" y="70" width="{abs(x1 - x0):.2f}" '
            f'height="30" fill="{color}" fill-opacity="0.85"/>'
        )
        label_y = 140 + 22 * (k % 3)
        mid = 0.5 * (x0 + x1)
        rows.append(
            f'<text x="{mid:.2f}" y="{label_y}" text-anchor="middle">'
            f"{names[i]}={values[i]:.4g} ({contribs[i]:+.4g})</text>"
        )
        rows.append(
            f'<line x1="{mid:.2f}" y1="102" x2="{mid:.2f}" y2="{label_y - 10}" '
            'stroke="#bbb" stroke-width="0.5"/>'
        )
    final = fp["final_value"]
    rows.append(
        f'<line x1="{sx(positions[-1]):.2f}" y1="50" x2="{sx(positions[-1]):.2f}" '
        'y2="120" stroke="#111"/>'
    )
    rows.append(
        f'<text x="{sx(positions[-1]):.2f}" y="34" text-anchor="middle">'
        f"f(x) {final:.4g}</text>"
    )
    rows.append("</svg>")
    return "\n".join(rows) + "\n"


def explain(config: RunConfig) -> dict:
    """Per-instance attribution report for every requested method."""
    model, names, X, _labels, bg = _load_common(config)

    def one(idx: int) -> dict:
        x = X[idx]
        sample_seed = config.seed ^ idx
        table = masking.build_table(model, x, bg, config.sigma)
        attrs, xis = _run_methods(model, x, bg, table, config, sample_seed)
        entry = {
            "index": idx,
            "seed": sample_seed,
            "prediction": table.full_value,
            "baseline": table.empty_value,
            "attributions": {},
        }
        for name, attr in attrs.items():
            doc = attr.to_json()
            doc["force_plot"] = _force_plot_data(attr, table, names, x)
            entry["attributions"][name] = doc
        if "taylorpoda" in xis and config.dump_xi:
            entry["xi_file"] = f"{config.dump_xi}.sample{idx}.json"
            Path(entry["xi_file"]).write_text(
                json.dumps(_jsonify(xis["taylorpoda"].to_json()), indent=2, sort_keys=True)
                + "\n",
                encoding="utf-8",
            )
        return entry

    with ThreadPoolExecutor(max_workers=config.effective_workers()) as pool:
        samples = list(pool.map(one, range(X.shape[0])))

    if config.svg_dir:
        svg_dir = Path(config.svg_dir)
        svg_dir.mkdir(parents=True, exist_ok=True)
        for entry in samples:
            for name, doc in entry["attributions"].items():
                svg = force_plot_svg(
                    doc["force_plot"], title=f"sample {entry['index']} - {name}"
                )
                (svg_dir / f"sample{entry['index']}_{name}.svg").write_text(
                    svg, encoding="utf-8"
                )

    return {
        "command": "explain",
        "engine_version": __version__,
        "kernels": "compiled" if HAVE_COMPILED else "fallback",
        "masking_estimator": _estimator_info(bg),
        "config": _config_echo(config),
        "feature_names": names,
        "samples": samples,
    }


def evaluate(config: RunConfig) -> dict:
    """Dataset-level metric report: per-sample rows plus mean and 95% CI."""
    model, names, X, labels, bg = _load_common(config)
    if X.shape[0] < 2:
        raise ConfigError("evaluate needs at least 2 data rows")
    want = set(config.metrics)
    unknown = want - set(METRIC_CHOICES)
    if unknown:
        raise ConfigError(f"unknown metrics {sorted(unknown)}")
    if "inclusion-auc" in want:
        if labels is None:
            raise ConfigError("--label-col is required for inclusion-auc")
        binary = set(np.unique(labels).tolist())
        if not binary <= {0.0, 1.0}:
            raise ConfigError(f"labels must be binary 0/1, got {sorted(binary)}")
        if len(binary) < 2:
            raise DegenerateLabels("labels are single-class")
    if config.sigma is not None and ("inclusion-mse" in want or "inclusion-auc" in want):
        raise ConfigError("inclusion metrics need FULL enumeration (omit --sigma)")

    def one(idx: int) -> dict:
        x = X[idx]
        sample_seed = config.seed ^ idx
        table = masking.build_table(model, x, bg, config.sigma)
        attrs, _ = _run_methods(model, x, bg, table, config, sample_seed)
        per_method = {}
        for name, attr in attrs.items():
            row = {
                "aup": attr.aup,
                "discrepancy": attr.discrepancy,
                "method_tag": attr.method.value,
            }
            if table.is_full and ("inclusion-mse" in want or "inclusion-auc" in want):
                row["recovery_errors"] = metrics.recovery_errors(attr, table).tolist()
                row["topm_values"] = [table[m] for m in metrics.topm_masks(attr)]
            per_method[name] = row
        return {"index": idx, "methods": per_method}

    with ThreadPoolExecutor(max_workers=config.effective_workers()) as pool:
        rows = list(pool.map(one, range(X.shape[0])))

    reports = {}
    for name in config.methods:
        rep = metrics.MetricReport(method=rows[0]["methods"][name]["method_tag"])
        aups = [r["methods"][name]["aup"] for r in rows]
        discs = [r["methods"][name]["discrepancy"] for r in rows]
        rep.per_sample = [
            {
                "sample": r["index"],
                "aup": r["methods"][name]["aup"],
                "discrepancy": r["methods"][name]["discrepancy"],
            }
            for r in rows
        ]
        if "aup" in want:
            rep.add_aggregate("aup", aups)
        if "discrepancy" in want:
            rep.add_aggregate("discrepancy", discs)
            rep.add_aggregate("discrepancy_abs", [abs(v) for v in discs])
        if "inclusion-mse" in want:
            errs = np.array([r["methods"][name]["recovery_errors"] for r in rows])
            per_sample_mse = (errs**2).mean(axis=1)
            rep.add_aggregate("inclusion_mse", per_sample_mse)
            rep.inclusion_curve = (errs**2).mean(axis=0).tolist()
        if "inclusion-auc" in want:
            preds = np.array([r["methods"][name]["topm_values"] for r in rows])
            lab = np.asarray(labels, dtype=np.int64)
            curve = [
                metrics._rank_auc(preds[:, m], lab) for m in range(preds.shape[1])
            ]
            rep.aggregates["inclusion_auc"] = {
                "value": float(np.mean(curve)),
                "curve": curve,
            }
        reports[name] = rep.to_json()

    return {
        "command": "evaluate",
        "engine_version": __version__,
        "kernels": "compiled" if HAVE_COMPILED else "fallback",
        "masking_estimator": _estimator_info(bg),
        "config": _config_echo(config),
        "feature_names": names,
        "n_samples": X.shape[0],
        "metrics": reports,
    }


def _diagnose_case(model, x, beta, config: RunConfig, case_seed: int) -> dict:
    bg = masking.BackgroundSet(beta[None, :], source="baseline")
    table = masking.build_table(model, x, bg, sigma=None)
    terms = reference.taylor_terms(model, x, beta)
    has_interactions = any(t.is_interaction for t in terms)
    checks = {}
    for name in config.methods:
        if name == "lime":
            checks[name] = None  # outside the postulate system
            continue
        if name == "occ1":
            attr = attribution.occ1(table)
            alloc = reference.occ1_allocation(table.d)
        elif name == "shap":
            attr = attribution.shap_exact(table)
            alloc = reference.shap_allocation(table.d)
        elif name == "weightedshap":
            attr = attribution.weighted_shap(table)
            fam = attribution.WeightFamily(
                id=attr.metadata["family"],
                weights=np.asarray(attr.metadata["family_weights"]),
            )
            alloc = reference.weighted_shap_allocation(fam)
        elif name == "taylorpoda":
            cands = allocation.generate_candidates(
                table.d,
                None,
                config.n_candidates,
                include_uniform=config.include_uniform,
                seed=case_seed,
                alpha=config.alpha,
            )
            xi, attr = allocation.optimize_xi(table, cands)
            alloc = reference.taylorpoda_allocation(xi)
        else:
            raise ConfigError(f"unknown method {name!r}")
        checks[name] = reference.check_postulates(attr, terms, table, alloc, bg)
    return {"checks": checks, "additive": not has_interactions}


def diagnose(config: RunConfig) -> dict:
    """Postulate matrix over the requested methods on a polynomial battery.

    With --model/--data/--background the battery is the given instances
    against the single background row (the expansion baseline); without a
    model, a seeded randomized polynomial battery is used.
    """
    if config.model:
        model = oracle.load_model(config.model)
        if not isinstance(model, oracle.PolynomialModel):
            raise NotPolynomial("diagnose requires a polynomial model")
        if not config.data or not config.background:
            raise ConfigError("diagnose with --model also needs --data and --background")
        names, X, _labels = _read_data(config.data, config.label_col)
        _bg_names, BG = masking.read_numeric_csv(
            config.background,
            drop_columns=(config.label_col,) if config.label_col else (),
        )
        if BG.shape[0] != 1:
            raise BackgroundNotSingleRow(
                f"diagnose needs a single-row background, got {BG.shape[0]}"
            )
        beta = BG[0]
        battery = [(model, X[i], beta) for i in range(X.shape[0])]
        battery_kind = "user"
    else:
        battery = reference.random_battery(seed=config.seed, n_cases=config.cases)
        battery_kind = f"randomized({config.cases})"

    case_results = []
    for k, (model, x, beta) in enumerate(battery):
        case_results.append(_diagnose_case(model, x, beta, config, config.seed ^ k))

    matrix = {}
    for name in config.methods:
        if name == "lime":
            matrix[name] = {
                "precision": "n/a",
                "federation": "n/a",
                "zero_discrepancy": "n/a",
                "adaptation": "n/a",
                "note": "surrogate method; outside the postulate system",
            }
            continue
        reports = [c["checks"][name] for c in case_results]
        matrix[name] = {
            "precision": all(r.precision for r in reports),
            "federation": all(r.federation for r in reports),
            "zero_discrepancy": all(r.zero_discrepancy for r in reports),
            "adaptation": reports[0].adaptation if reports else None,
            "cases_passed": {
                "precision": sum(r.precision for r in reports),
                "federation": sum(r.federation for r in reports),
                "zero_discrepancy": sum(r.zero_discrepancy for r in reports),
            },
            "n_cases": len(reports),
        }

    report = {
        "command": "diagnose",
        "engine_version": __version__,
        "kernels": "compiled" if HAVE_COMPILED else "fallback",
        "config": _config_echo(config),
        "battery": battery_kind,
        "n_cases": len(battery),
        "postulates": matrix,
        "cases": [
            {
                "case": k,
                "additive": c["additive"],
                "checks": {
                    n: (r.to_json() if r is not None else None)
                    for n, r in c["checks"].items()
                },
            }
            for k, c in enumerate(case_results)
        ],
    }
    if all(c["additive"] for c in case_results):
        report["note"] = (
            "degenerate battery: models are additive, no interaction effects "
            "to misallocate"
        )
    return report


def dump_table(config: RunConfig) -> dict:
    """Debug dump of one instance's coalition value table (and dividends)."""
    model, _names, X, _labels, bg = _load_common(config)
    if not 0 <= config.row < X.shape[0]:
        raise ConfigError(f"--row must be in 0..{X.shape[0] - 1}")
    table = masking.build_table(model, X[config.row], bg, config.sigma)
    doc = table.to_json()
    doc["command"] = "dump-table"
    doc["engine_version"] = __version__
    doc["row"] = config.row
    doc["masking_estimator"] = _estimator_info(bg)
    if config.dump_dividends:
        doc["dividends"] = dividends.harsanyi_all(table).to_json()
    return doc


def _bool_flag(value: str) -> bool:
    low = value.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {value!r}")


def _sigma_flag(value: str):
    if value.strip().upper() == "FULL":
        return None
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--sigma expects an integer or FULL") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taylorpoda",
        description="Local feature attribution with optimizable interaction allocation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_data=True):
        p.add_argument("--model", help="model JSON file")
        if with_data:
            p.add_argument("--data", help="instances CSV (header row required)")
            p.add_argument("--background", help="background CSV (header row required)")
        p.add_argument("--method", action="append", choices=METHOD_CHOICES,
                       help="repeatable; default: all methods")
        p.add_argument("--sigma", type=_sigma_flag, default=None,
                       help="coalition-cardinality cap, or FULL (default)")
        p.add_argument("--candidates", type=int, default=16,
                       help="allocation candidates for taylorpoda (default 16)")
        p.add_argument("--include-uniform", type=_bool_flag, default=True,
                       help="seed candidate 0 with the uniform allocation (default true)")
        p.add_argument("--alpha", type=float, default=1.0,
                       help="Dirichlet concentration (default 1.0)")
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument("--background-size", type=int,
                       default=masking.DEFAULT_BACKGROUND_SIZE,
                       help="background subsample size (default 32)")
        p.add_argument("--label-col", default=None,
                       help="label column to exclude from features")
        p.add_argument("--workers", type=int, default=0,
                       help="worker threads; 0 = available parallelism")
        p.add_argument("--output", default=None, help="report path (default stdout)")

    p_explain = sub.add_parser("explain", help="per-instance attributions")
    add_common(p_explain)
    p_explain.add_argument("--svg-dir", default=None,
                           help="emit one static force-plot SVG per sample/method")
    p_explain.add_argument("--dump-xi", default=None,
                           help="path prefix for selected-allocation JSON dumps")

    p_eval = sub.add_parser("evaluate", help="dataset-level metric aggregates")
    add_common(p_eval)
    p_eval.add_argument("--metrics", default="aup,discrepancy",
                        help="comma list of: " + ",".join(METRIC_CHOICES))

    p_diag = sub.add_parser("diagnose", help="postulate satisfaction matrix")
    add_common(p_diag)
    p_diag.add_argument("--cases", type=int, default=12,
                        help="randomized battery size when no --model is given")

    p_dump = sub.add_parser("dump-table", help="debug-dump one coalition table")
    add_common(p_dump)
    p_dump.add_argument("--row", type=int, default=0, help="data row to dump")
    p_dump.add_argument("--dividends", action="store_true",
                        help="include the dividend map")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    methods = args.method or list(METHOD_CHOICES)
    seen = set()
    methods = [m for m in methods if not (m in seen or seen.add(m))]
    cfg = RunConfig(
        model=args.model,
        data=getattr(args, "data", None),
        background=getattr(args, "background", None),
        methods=methods,
        sigma=args.sigma,
        n_candidates=args.candidates,
        include_uniform=args.include_uniform,
        alpha=args.alpha,
        seed=args.seed,
        background_size=args.background_size,
        output=args.output,
        label_col=args.label_col,
        workers=args.workers,
    )
    if hasattr(args, "metrics"):
        cfg.metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if hasattr(args, "row"):
        cfg.row = args.row
    if hasattr(args, "dividends"):
        cfg.dump_dividends = args.dividends
    if hasattr(args, "svg_dir"):
        cfg.svg_dir = args.svg_dir
    if hasattr(args, "dump_xi"):
        cfg.dump_xi = args.dump_xi
    if hasattr(args, "cases"):
        cfg.cases = args.cases
    return cfg


_COMMANDS = {
    "explain": explain,
    "evaluate": evaluate,
    "diagnose": diagnose,
    "dump-table": dump_table,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = _config_from_args(args)
    try:
        report = _COMMANDS[args.command](config)
    except EnumerationGuard as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except _ORACLE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _write_report(report, config.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
