"""Command-line interface.

Subcommands: gen-cohort, fit, simulate, compare, sweep, tune. Every command
reads a versioned JSON config (unknown keys rejected), takes --out for the
output directory, and is deterministic given its config; --seed overrides
the config seed and --threads caps replication workers. Report commands
write delimited tables plus PNG figures next to them. Exit codes: 0 success,
2 config or validation error, 3 runtime or data error, with a machine
parsable JSON error object on stderr. ALLOCSIM_LOG (error, warn, info,
debug) sets verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import report
from .acceptance import (
    AcceptanceConfig,
    AcceptanceModel,
    acceptance_model_from_dict,
    acceptance_model_to_dict,
    auroc,
    fit_logistic,
)
from .cohort import (
    Cohort,
    CohortConfig,
    generate,
    load_dir,
    sample_acceptance_outcomes,
    sample_graft_outcomes,
    save_csv,
    waitlist_outcomes,
)
from .domain import GeoPoint
from .errors import AllocSimError, ConfigError
from .policies import ModelSet, PolicyKind, PolicySpec
from .simulator import (
    SimConfig,
    SimResult,
    replicate_totals,
    result_to_json,
    run,
    save_transplants_csv,
)
from .survival import (
    CoxModel,
    FitOptions,
    concordance_index,
    cox_model_from_dict,
    cox_model_to_dict,
    fit_cox,
)
from .tuning import TuneConfig, evaluate_theta, tune_potentials, tune_result_to_dict

logger = logging.getLogger("allocsim.cli")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

CONFIG_VERSION = 1


# ============================================================
# Config plumbing
# ============================================================


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _check_keys(obj: dict, allowed: dict, path: str = "config"):
    """Reject unknown keys; recurse into nested dict schemas."""
    if not isinstance(obj, dict):
        raise ConfigError(f"{path} must be a JSON object")
    for key, value in obj.items():
        if key not in allowed:
            raise ConfigError(f"{path}: unknown key {key!r}")
        sub = allowed[key]
        if isinstance(sub, dict) and isinstance(value, dict):
            _check_keys(value, sub, f"{path}.{key}")


def _require_version(cfg: dict):
    if cfg.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config must declare \"version\": {CONFIG_VERSION}")


def _get(cfg: dict, key: str, default=None, required: bool = False):
    if required and key not in cfg:
        raise ConfigError(f"missing required config key {key!r}")
    return cfg.get(key, default)


_POLICY_KEYS = {
    "label": None,
    "kind": None,
    "delta_tiebreak": None,
    "delta_exclude": None,
    "urgency_weight": None,
    "max_distance_nm": None,
    "potentials": None,
}

_SIM_KEYS = {
    "horizon_days": None,
    "batch_size": None,
    "batch_window_hours": None,
    "seed": None,
    "replications": None,
    "acceptance": {"exponent": None, "always_accept": None},
}

_MODEL_KEYS = {"graft": None, "waitlist": None, "acceptance": None}

_COHORT_KEYS = {
    "patient_rate_per_day": None,
    "donor_rate_per_day": None,
    "dbd_fraction": None,
    "blood_type_dist": None,
    "status_dist": None,
    "center_locations": None,
    "covariate_dims": None,
    "true_waitlist_coefs": None,
    "true_graft_coefs": None,
    "baseline_rate": None,
    "graft_baseline_rate": None,
    "horizon_days": None,
    "seed": None,
    "covariate_update_rate_per_day": None,
    "covariate_update_scale": None,
    "true_acceptance_intercept": None,
    "true_acceptance_weights": None,
    "waitlist_support_years": None,
    "graft_support_years": None,
    "baseline_grid_step_days": None,
}


def _parse_policy(cfg: dict, context: str) -> PolicySpec:
    _check_keys(cfg, _POLICY_KEYS, context)
    kind_raw = _get(cfg, "kind", required=True)
    try:
        kind = PolicyKind(kind_raw)
    except ValueError:
        names = ", ".join(k.value for k in PolicyKind)
        raise ConfigError(f"{context}: unknown policy kind {kind_raw!r} (one of {names})") from None
    potentials = cfg.get("potentials")
    try:
        return PolicySpec(
            kind=kind,
            delta_tiebreak=bool(cfg.get("delta_tiebreak", False)),
            delta_exclude=bool(cfg.get("delta_exclude", False)),
            urgency_weight=float(cfg.get("urgency_weight", 1.0)),
            max_distance_nm=(
                None if cfg.get("max_distance_nm") is None else float(cfg["max_distance_nm"])
            ),
            potentials=None if potentials is None else tuple(float(v) for v in potentials),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _parse_sim(cfg: dict, cohort: Cohort, policy: PolicySpec, seed_override: Optional[int]) -> SimConfig:
    _check_keys(cfg, _SIM_KEYS, "config.sim")
    acc_cfg = cfg.get("acceptance", {})
    try:
        acceptance = AcceptanceConfig(
            exponent=float(acc_cfg.get("exponent", 1.0)),
            always_accept=bool(acc_cfg.get("always_accept", False)),
        )
        seed = int(cfg.get("seed", 0)) if seed_override is None else seed_override
        return SimConfig(
            horizon_days=float(cfg.get("horizon_days", cohort.schema.horizon_days)),
            policy=policy,
            acceptance=acceptance,
            batch_size=int(cfg.get("batch_size", 1)),
            batch_window_hours=float(cfg.get("batch_window_hours", 48.0)),
            seed=seed,
            replications=int(cfg.get("replications", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config.sim: {exc}") from exc


def _parse_cohort_config(cfg: dict, seed_override: Optional[int]) -> CohortConfig:
    _check_keys(cfg, _COHORT_KEYS, "config.cohort")
    kwargs = dict(cfg)
    if "center_locations" in kwargs:
        try:
            kwargs["center_locations"] = tuple(
                GeoPoint(float(lat), float(lon)) for lat, lon in kwargs["center_locations"]
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config.cohort.center_locations: {exc}") from exc
    for key in (
        "blood_type_dist",
        "status_dist",
        "covariate_dims",
        "true_waitlist_coefs",
        "true_graft_coefs",
        "true_acceptance_weights",
    ):
        if key in kwargs and kwargs[key] is not None:
            kwargs[key] = tuple(kwargs[key])
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        return CohortConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config.cohort: {exc}") from exc


def _load_model_file(path: str, expect: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise AllocSimError(f"cannot read model file {path}: {exc}") from exc
    if expect == "acceptance":
        return acceptance_model_from_dict(doc)
    return cox_model_from_dict(doc)


def _resolve_models(cfg: dict, cohort: Cohort, need_acceptance: bool) -> ModelSet:
    _check_keys(cfg, _MODEL_KEYS, "config.models")

    def resolve(kind: str) -> Optional[object]:
        ref = cfg.get(kind, "truth")
        if ref is None:
            return None
        if ref == "truth":
            if cohort.ground_truth is None:
                raise AllocSimError(
                    f"models.{kind} is 'truth' but the cohort has no ground-truth sidecar"
                )
            return {
                "graft": cohort.ground_truth.graft_model,
                "waitlist": cohort.ground_truth.waitlist_model,
                "acceptance": cohort.ground_truth.acceptance_model,
            }[kind]
        return _load_model_file(str(ref), "acceptance" if kind == "acceptance" else "cox")

    graft = resolve("graft")
    waitlist = resolve("waitlist")
    acceptance = resolve("acceptance")
    if graft is None or waitlist is None:
        raise ConfigError("config.models: graft and waitlist models are required")
    if need_acceptance and acceptance is None:
        raise ConfigError("config.models: an acceptance model is required unless always_accept")
    return ModelSet(graft=graft, waitlist=waitlist, acceptance=acceptance)


def _out_dir(args, cfg: dict) -> Path:
    out = args.out or cfg.get("output_dir")
    if not out:
        raise ConfigError("an output directory is required (--out or config output_dir)")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_replications(config: SimConfig, cohort: Cohort, models: ModelSet, threads: int) -> List[SimResult]:
    from concurrent.futures import ThreadPoolExecutor

    seeds = [config.seed + i for i in range(config.replications)]

    def one(seed: int) -> SimResult:
        return run(replace(config, seed=seed, replications=1), cohort, models)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return mean, std


# ============================================================
# Commands
# ============================================================

_GEN_KEYS = {"version": None, "output_dir": None, "cohort": _COHORT_KEYS}


def cmd_gen_cohort(args) -> int:
    cfg = _load_config(args.config)
    _require_version(cfg)
    _check_keys(cfg, _GEN_KEYS)
    cohort_cfg = _parse_cohort_config(_get(cfg, "cohort", {}, required=True), args.seed)
    out = _out_dir(args, cfg)
    cohort = generate(cohort_cfg)
    paths = save_csv(cohort, out)
    logger.info(
        "wrote cohort with %d patients, %d donors to %s",
        len(cohort.patients()),
        len(cohort.donors()),
        out,
    )
    print(json.dumps({"patients": len(cohort.patients()), "donors": len(cohort.donors()),
                      "files": {k: str(v) for k, v in paths.items()}}))
    return 0


_FIT_KEYS = {
    "version": None,
    "output_dir": None,
    "cohort_dir": None,
    "model": None,
    "fit": {"ridge_penalty": None, "max_newton_iters": None, "tolerance": None},
    "logistic": {"l2_penalty": None, "iters": None},
    "holdout_fraction": None,
    "n_pairs": None,
    "seed": None,
}


def _split_indices(n: int, holdout_fraction: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.Philox(seed))
    order = rng.permutation(n)
    n_holdout = max(1, int(round(n * holdout_fraction)))
    if n_holdout >= n:
        raise AllocSimError("holdout split leaves no training data")
    return order[n_holdout:], order[:n_holdout]


def cmd_fit(args) -> int:
    cfg = _load_config(args.config)
    _require_version(cfg)
    _check_keys(cfg, _FIT_KEYS)
    kind = _get(cfg, "model", required=True)
    if kind not in ("waitlist", "graft", "acceptance"):
        raise ConfigError(f"config.model must be waitlist, graft, or acceptance, got {kind!r}")
    cohort = load_dir(_get(cfg, "cohort_dir", required=True))
    out = _out_dir(args, cfg)
    seed = int(cfg.get("seed", 0)) if args.seed is None else args.seed
    holdout = float(cfg.get("holdout_fraction", 0.25))
    if not (0.0 < holdout < 1.0):
        raise ConfigError("holdout_fraction must lie strictly between 0 and 1")
    n_pairs = int(cfg.get("n_pairs", 4000))
    mark = cohort.schema.hash_value

    if kind == "acceptance":
        logistic_cfg = cfg.get("logistic", {})
        features, labels = sample_acceptance_outcomes(cohort, n_pairs, seed)
        train, hold = _split_indices(len(labels), holdout, seed + 1)
        model = fit_logistic(
            features[train],
            labels[train],
            l2_penalty=float(logistic_cfg.get("l2_penalty", 1e-6)),
            iters=int(logistic_cfg.get("iters", 2000)),
            schema_hash=mark,
        )
        scores = model.intercept + features[hold] @ model.weights
        metric = {"auroc_holdout": auroc(scores, labels[hold])}
        model_doc = acceptance_model_to_dict(model)
    else:
        fit_cfg = cfg.get("fit", {})
        opts = FitOptions(
            ridge_penalty=float(fit_cfg.get("ridge_penalty", 0.1)),
            max_newton_iters=int(fit_cfg.get("max_newton_iters", 100)),
            tolerance=float(fit_cfg.get("tolerance", 1e-8)),
        )
        if kind == "waitlist":
            samples = waitlist_outcomes(cohort)
        else:
            samples = sample_graft_outcomes(cohort, n_pairs, seed)
        train, hold = _split_indices(len(samples), holdout, seed + 1)
        model = fit_cox([samples[i] for i in train], opts, schema_hash=mark)
        hold_samples = [samples[i] for i in hold]
        scores = [float(np.dot(model.coefficients, s.covariates)) for s in hold_samples]
        metric = {"c_index_holdout": concordance_index(scores, hold_samples)}
        model_doc = cox_model_to_dict(model)

    model_path = out / f"{kind}_model.json"
    with open(model_path, "w") as fh:
        json.dump(model_doc, fh)
    metrics = {
        "model": kind,
        "n_train": int(len(train)),
        "n_holdout": int(len(hold)),
        "seed": seed,
        **{k: float(v) for k, v in metric.items()},
    }
    with open(out / f"{kind}_metrics.json", "w") as fh:
        json.dump(metrics, fh, indent=1)
    print(json.dumps(metrics))
    return 0


_SIMULATE_KEYS = {
    "version": None,
    "output_dir": None,
    "cohort_dir": None,
    "models": _MODEL_KEYS,
    "policy": _POLICY_KEYS,
    "sim": _SIM_KEYS,
}


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    _require_version(cfg)
    _check_keys(cfg, _SIMULATE_KEYS)
    cohort = load_dir(_get(cfg, "cohort_dir", required=True))
    policy = _parse_policy(_get(cfg, "policy", required=True), "config.policy")
    sim_cfg = _parse_sim(cfg.get("sim", {}), cohort, policy, args.seed)
    models = _resolve_models(
        cfg.get("models", {}), cohort, need_acceptance=not sim_cfg.acceptance.always_accept
    )
    out = _out_dir(args, cfg)
    results = _run_replications(sim_cfg, cohort, models, args.threads)
    totals = [r.total_life_years for r in results]
    mean, std = _mean_std(totals)

    report.write_table(
        out / "replications.csv",
        ["replication", "seed", "total_life_years", "transplants", "discarded_donors",
         "waitlist_deaths", "offers_made", "offers_rejected"],
        [
            [i, sim_cfg.seed + i, repr(r.total_life_years), len(r.transplants),
             r.discarded_donors, r.waitlist_deaths, r.offers_made, r.offers_rejected]
            for i, r in enumerate(results)
        ],
    )
    first = results[0]
    save_transplants_csv(first, out / "transplants.csv")
    cumulative = np.cumsum([t.delta_years for t in first.transplants])
    report.trajectory_figure(
        [t.time_days for t in first.transplants],
        list(cumulative),
        sim_cfg.horizon_days,
        out / "cumulative_life_years.png",
    )
    summary = {
        "mean_total_life_years": mean,
        "std_total_life_years": std,
        "replications": sim_cfg.replications,
        "first_replication": json.loads(result_to_json(first)),
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=1)
    print(json.dumps({"mean_total_life_years": mean, "std_total_life_years": std}))
    return 0


_COMPARE_KEYS = {
    "version": None,
    "output_dir": None,
    "cohort_dir": None,
    "models": _MODEL_KEYS,
    "policies": None,
    "sim": _SIM_KEYS,
}


def cmd_compare(args) -> int:
    cfg = _load_config(args.config)
    _require_version(cfg)
    _check_keys(cfg, _COMPARE_KEYS)
    cohort = load_dir(_get(cfg, "cohort_dir", required=True))
    policies_cfg = _get(cfg, "policies", required=True)
    if not isinstance(policies_cfg, list) or not policies_cfg:
        raise ConfigError("config.policies must be a non-empty list")
    labeled: List[Tuple[str, PolicySpec]] = []
    for i, pol_cfg in enumerate(policies_cfg):
        label = pol_cfg.get("label") if isinstance(pol_cfg, dict) else None
        spec = _parse_policy(
            {k: v for k, v in pol_cfg.items() if k != "label"}, f"config.policies[{i}]"
        )
        labeled.append((label or spec.kind.value, spec))
    out = _out_dir(args, cfg)

    rows = []
    run_rows = []
    means, stds, labels = [], [], []
    need_acceptance = not bool(cfg.get("sim", {}).get("acceptance", {}).get("always_accept", False))
    for label, spec in labeled:
        sim_cfg = _parse_sim(cfg.get("sim", {}), cohort, spec, args.seed)
        models = _resolve_models(cfg.get("models", {}), cohort, need_acceptance)
        totals = replicate_totals(sim_cfg, cohort, models, threads=args.threads)
        mean, std = _mean_std(totals)
        rows.append([label, repr(mean), repr(std)])
        labels.append(label)
        means.append(mean)
        stds.append(std)
        for i, total in enumerate(totals):
            run_rows.append([label, i, sim_cfg.seed + i, repr(total)])
    report.write_table(out / "comparison.csv", ["policy", "mean_total_life_years", "std"], rows)
    report.write_table(
        out / "comparison_runs.csv", ["policy", "replication", "seed", "total_life_years"], run_rows
    )
    report.compare_figure(labels, means, stds, out / "comparison.png")
    print(json.dumps({"policies": labels, "means": means}))
    return 0


_SWEEP_KEYS = {
    "version": None,
    "output_dir": None,
    "cohort_dir": None,
    "models": _MODEL_KEYS,
    "policy": _POLICY_KEYS,
    "sim": _SIM_KEYS,
    "sweep": {"parameter": None, "values": None},
}

_SWEEP_PARAMETERS = ("alpha", "max_distance", "batch_B")


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    _require_version(cfg)
    _check_keys(cfg, _SWEEP_KEYS)
    sweep_cfg = _get(cfg, "sweep", required=True)
    parameter = _get(sweep_cfg, "parameter", required=True)
    if parameter not in _SWEEP_PARAMETERS:
        raise ConfigError(
            f"sweep.parameter must be one of {', '.join(_SWEEP_PARAMETERS)}, got {parameter!r}"
        )
    values = _get(sweep_cfg, "values", required=True)
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values must be a non-empty list")
    cohort = load_dir(_get(cfg, "cohort_dir", required=True))
    base_policy = _parse_policy(_get(cfg, "policy", required=True), "config.policy")
    out = _out_dir(args, cfg)

    rows = []
    means, stds = [], []
    for value in values:
        policy = base_policy
        sim_cfg = _parse_sim(cfg.get("sim", {}), cohort, policy, args.seed)
        if parameter == "alpha":
            sim_cfg = replace(
                sim_cfg, acceptance=replace(sim_cfg.acceptance, exponent=float(value))
            )
        elif parameter == "max_distance":
            policy = replace(policy, max_distance_nm=float(value))
            sim_cfg = replace(sim_cfg, policy=policy)
        else:
            sim_cfg = replace(sim_cfg, batch_size=int(value))
        models = _resolve_models(
            cfg.get("models", {}), cohort, need_acceptance=not sim_cfg.acceptance.always_accept
        )
        totals = replicate_totals(sim_cfg, cohort, models, threads=args.threads)
        mean, std = _mean_std(totals)
        means.append(mean)
        stds.append(std)
    for value, mean, std in zip(values, means, stds):
        rows.append([parameter, value, repr(mean), repr(std), repr(mean - means[0])])
    report.write_table(
        out / "sweep.csv", ["parameter", "value", "mean_total_life_years", "std", "delta_vs_first"], rows
    )
    report.sweep_figure(values, means, stds, parameter, out / "sweep.png")
    print(json.dumps({"parameter": parameter, "values": values, "means": means}))
    return 0


_TUNE_KEYS = {
    "version": None,
    "output_dir": None,
    "training_cohorts": None,
    "eval_cohorts": None,
    "models": _MODEL_KEYS,
    "policy": _POLICY_KEYS,
    "tune": {"budget_evals": None, "search_box": None, "local_refine": None, "seed": None},
}


def cmd_tune(args) -> int:
    cfg = _load_config(args.config)
    _require_version(cfg)
    _check_keys(cfg, _TUNE_KEYS)
    train_dirs = _get(cfg, "training_cohorts", required=True)
    if not isinstance(train_dirs, list) or not train_dirs:
        raise ConfigError("training_cohorts must be a non-empty list of cohort directories")
    eval_dirs = cfg.get("eval_cohorts", [])
    overlap = {str(Path(d).resolve()) for d in train_dirs} & {
        str(Path(d).resolve()) for d in eval_dirs
    }
    if overlap:
        raise ConfigError(f"training and eval cohorts must be distinct; shared: {sorted(overlap)}")
    training = tuple(load_dir(d) for d in train_dirs)
    base_policy = _parse_policy(_get(cfg, "policy", required=True), "config.policy")
    models = _resolve_models(cfg.get("models", {}), training[0], need_acceptance=False)
    tune_cfg_raw = cfg.get("tune", {})
    seed = int(tune_cfg_raw.get("seed", 0)) if args.seed is None else args.seed
    box_raw = tune_cfg_raw.get("search_box", [[-5.0, 5.0]] * 4)
    if len(box_raw) == 2 and all(isinstance(v, (int, float)) for v in box_raw):
        box_raw = [box_raw] * 4
    try:
        tune_cfg = TuneConfig(
            training_cohorts=training,
            budget_evals=int(tune_cfg_raw.get("budget_evals", 50)),
            search_box=tuple((float(lo), float(hi)) for lo, hi in box_raw),
            local_refine=bool(tune_cfg_raw.get("local_refine", True)),
            seed=seed,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config.tune: {exc}") from exc
    out = _out_dir(args, cfg)
    result = tune_potentials(tune_cfg, models, base_policy)
    doc = tune_result_to_dict(result)
    with open(out / "tune_result.json", "w") as fh:
        json.dump(doc, fh, indent=1)

    if eval_dirs:
        rows = []
        tuned_totals, myopic_totals = [], []
        for d in eval_dirs:
            eval_cohort = load_dir(d)
            tuned = evaluate_theta(result.best_potentials, [eval_cohort], models, base_policy)
            myopic = evaluate_theta((0.0, 0.0, 0.0, 0.0), [eval_cohort], models, base_policy)
            tuned_totals.append(tuned)
            myopic_totals.append(myopic)
            rows.append([str(d), repr(tuned), repr(myopic)])
        report.write_table(
            out / "tune_eval.csv", ["cohort", "tuned_total_life_years", "myopic_total_life_years"], rows
        )
        doc["eval"] = {
            "tuned_mean": float(np.mean(tuned_totals)),
            "myopic_mean": float(np.mean(myopic_totals)),
        }
        with open(out / "tune_result.json", "w") as fh:
            json.dump(doc, fh, indent=1)
    print(json.dumps({"best_potentials": list(result.best_potentials),
                      "best_score": result.best_score}))
    return 0


# ============================================================
# Entry point
# ============================================================


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="allocsim",
        description="Heart-allocation policy simulator: cohorts, models, policy experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("gen-cohort", cmd_gen_cohort, "generate a synthetic cohort directory"),
        ("fit", cmd_fit, "fit a survival or acceptance model from a cohort"),
        ("simulate", cmd_simulate, "run one policy with replications"),
        ("compare", cmd_compare, "run several policies on the same cohort"),
        ("sweep", cmd_sweep, "sweep one parameter (alpha, max_distance, batch_B)"),
        ("tune", cmd_tune, "search for blood-type potential adjustments"),
    ]
    for name, handler, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", help="output directory (overrides config output_dir)")
        p.add_argument("--seed", type=int, help="seed override (unsigned 64-bit)")
        p.add_argument("--threads", type=int, default=1, help="worker cap for replications")
        p.set_defaults(handler=handler)
    return parser


def _configure_logging() -> Optional[str]:
    raw = os.environ.get("ALLOCSIM_LOG", "warn").lower()
    if raw not in _LOG_LEVELS:
        return raw
    logging.basicConfig(level=_LOG_LEVELS[raw], format="%(levelname)s %(name)s: %(message)s")
    return None


def _emit_error(exc: Exception) -> None:
    doc = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(doc), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    bad_level = _configure_logging()
    if bad_level is not None:
        _emit_error(ConfigError(f"ALLOCSIM_LOG must be error, warn, info, or debug, got {bad_level!r}"))
        return 2
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        _emit_error(ConfigError("--threads must be >= 1"))
        return 2
    if args.seed is not None and not (0 <= args.seed < 2**64):
        _emit_error(ConfigError("--seed must fit in an unsigned 64-bit integer"))
        return 2
    try:
        return args.handler(args)
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except AllocSimError as exc:
        _emit_error(exc)
        return 3
    except OSError as exc:
        _emit_error(exc)
        return 3


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
