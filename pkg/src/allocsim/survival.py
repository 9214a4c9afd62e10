"""Ridge-penalized proportional-hazards survival models.

The hazard for covariates x is h(t | x) = h0(t) * exp(coef . x), so survival
is S(t | x) = exp(-exp(coef . x) * H0(t)) with H0 the cumulative baseline
hazard. Fitting maximizes the Breslow-ties partial log-likelihood minus
(ridge_penalty / 2) * ||coef||^2 by Newton iterations with step halving, and
the baseline is the Breslow estimator at the fitted coefficients (which
reduces to Nelson-Aalen when the coefficients are zero).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .domain import Donor, Patient, distance_nm
from .errors import (
    EmptyBaselineError,
    NoComparablePairsError,
    NoEventsError,
    NonConvergenceError,
    SingularHessianError,
)

DAYS_PER_YEAR = 365.25
# Pair distance enters model features in thousands of nautical miles.
DISTANCE_FEATURE_SCALE_NM = 1000.0

_GRAD_TOL = 1e-6
_MAX_STEP_HALVINGS = 30


@dataclass(frozen=True)
class SurvivalSample:
    """One observation: follow-up time, event indicator, covariates."""

    time: float
    event: bool
    covariates: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(float(v) for v in self.covariates))
        if self.time < 0:
            raise ValueError("survival time must be non-negative")


@dataclass(frozen=True)
class FitOptions:
    ridge_penalty: float = 0.1
    max_newton_iters: int = 100
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.ridge_penalty < 0:
            raise ValueError("ridge_penalty must be non-negative")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True, eq=False)
class CoxModel:
    """Fitted proportional-hazards model with a step-function baseline."""

    coefficients: np.ndarray
    baseline_times: np.ndarray
    baseline_cumhaz: np.ndarray
    covariate_dim: int
    schema_hash: str = ""

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float).reshape(-1)
        times = np.asarray(self.baseline_times, dtype=float).reshape(-1)
        cumhaz = np.asarray(self.baseline_cumhaz, dtype=float).reshape(-1)
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "baseline_times", times)
        object.__setattr__(self, "baseline_cumhaz", cumhaz)
        if len(coef) != self.covariate_dim:
            raise ValueError("coefficient length disagrees with covariate_dim")
        if times.shape != cumhaz.shape:
            raise ValueError("baseline arrays must have equal length")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("baseline_times must be strictly increasing")
        if np.any(cumhaz < 0) or (len(cumhaz) > 1 and np.any(np.diff(cumhaz) < 0)):
            raise ValueError("baseline_cumhaz must be non-negative and non-decreasing")


def schema_hash_of(descriptor: dict) -> str:
    """Stable short hash of a feature-schema descriptor."""
    blob = json.dumps(descriptor, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def cox_model_to_dict(model: CoxModel) -> dict:
    return {
        "coefficients": [float(v) for v in model.coefficients],
        "baseline_times": [float(v) for v in model.baseline_times],
        "baseline_cumhaz": [float(v) for v in model.baseline_cumhaz],
        "covariate_dim": int(model.covariate_dim),
        "schema_hash": model.schema_hash,
    }


def cox_model_from_dict(doc: dict) -> CoxModel:
    return CoxModel(
        coefficients=np.asarray(doc["coefficients"], dtype=float),
        baseline_times=np.asarray(doc["baseline_times"], dtype=float),
        baseline_cumhaz=np.asarray(doc["baseline_cumhaz"], dtype=float),
        covariate_dim=int(doc["covariate_dim"]),
        schema_hash=str(doc.get("schema_hash", "")),
    )


def exponential_cox_model(
    coefficients: Sequence[float],
    rate_per_day: float,
    support_days: float,
    step_days: float = 1.0,
    schema_hash: str = "",
) -> CoxModel:
    """Synthetic ground-truth model: H0(t) = rate * t sampled on a step grid."""
    if rate_per_day <= 0 or support_days <= 0 or step_days <= 0:
        raise ValueError("rate, support, and step must be positive")
    coef = np.asarray(coefficients, dtype=float).reshape(-1)
    n_steps = int(math.ceil(support_days / step_days))
    times = step_days * np.arange(1, n_steps + 1)
    return CoxModel(
        coefficients=coef,
        baseline_times=times,
        baseline_cumhaz=rate_per_day * times,
        covariate_dim=len(coef),
        schema_hash=schema_hash,
    )


# ============================================================
# Breslow partial likelihood internals
# ============================================================


class _CoxProblem:
    """Time-sorted dataset with risk-set boundaries precomputed."""

    def __init__(self, times: np.ndarray, events: np.ndarray, x: np.ndarray):
        order = np.argsort(times, kind="stable")
        self.t = times[order]
        self.e = events[order]
        self.x = x[order]
        self.n, self.dim = self.x.shape
        event_times = self.t[self.e]
        self.event_x_total = self.x[self.e].sum(axis=0) if self.e.any() else np.zeros(self.dim)
        self.unique_event_times, self.death_counts = np.unique(event_times, return_counts=True)
        self.death_counts = self.death_counts.astype(float)
        # Risk set at event time t is every sample with observed time >= t.
        self.risk_start = np.searchsorted(self.t, self.unique_event_times, side="left")

    def loglik_grad_hess(self, coef: np.ndarray, need_hess: bool):
        eta = self.x @ coef
        shift = float(eta.max()) if self.n else 0.0
        w = np.exp(eta - shift)
        rev0 = np.cumsum(w[::-1])[::-1]
        rev1 = np.cumsum((w[:, None] * self.x)[::-1], axis=0)[::-1]
        s0 = rev0[self.risk_start]
        s1 = rev1[self.risk_start]
        d = self.death_counts
        loglik = float(eta[self.e].sum() - (d * (np.log(s0) + shift)).sum())
        risk_mean = s1 / s0[:, None]
        grad = self.event_x_total - d @ risk_mean
        if not need_hess:
            return loglik, grad, None
        wxx = np.einsum("i,ij,ik->ijk", w, self.x, self.x)
        s2 = np.cumsum(wxx[::-1], axis=0)[::-1][self.risk_start]
        hess = -np.einsum("j,jkl->kl", d, s2 / s0[:, None, None])
        hess += np.einsum("j,jk,jl->kl", d, risk_mean, risk_mean)
        return loglik, grad, hess

    def breslow_cumhaz(self, coef: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        eta = self.x @ coef
        shift = float(eta.max()) if self.n else 0.0
        rev0 = np.cumsum(np.exp(eta - shift)[::-1])[::-1]
        log_s0 = np.log(rev0[self.risk_start]) + shift
        increments = np.exp(np.log(self.death_counts) - log_s0)
        return self.unique_event_times, np.cumsum(increments)


def _prepare(data: Sequence[SurvivalSample]) -> _CoxProblem:
    if len(data) == 0:
        raise NoEventsError("empty dataset")
    dim = len(data[0].covariates)
    times = np.empty(len(data))
    events = np.empty(len(data), dtype=bool)
    x = np.empty((len(data), dim))
    for i, s in enumerate(data):
        if len(s.covariates) != dim:
            raise ValueError(f"sample {i} has covariate length {len(s.covariates)}, expected {dim}")
        times[i] = s.time
        events[i] = s.event
        x[i] = s.covariates
    if not events.any():
        raise NoEventsError("all samples are censored")
    return _CoxProblem(times, events, x)


def partial_loglik_grad(
    data: Sequence[SurvivalSample],
    coefficients: Sequence[float],
    ridge_penalty: float = 0.0,
) -> Tuple[float, np.ndarray]:
    """Penalized Breslow partial log-likelihood and its exact gradient."""
    problem = _prepare(data)
    coef = np.asarray(coefficients, dtype=float).reshape(-1)
    if len(coef) != problem.dim:
        raise ValueError(f"expected {problem.dim} coefficients, got {len(coef)}")
    value, grad, _ = problem.loglik_grad_hess(coef, need_hess=False)
    value -= 0.5 * ridge_penalty * float(coef @ coef)
    grad = grad - ridge_penalty * coef
    return value, grad


def fit_cox(
    data: Sequence[SurvivalSample],
    opts: Optional[FitOptions] = None,
    objective_trace: Optional[List[float]] = None,
    schema_hash: str = "",
) -> CoxModel:
    """Fit coefficients and the Breslow baseline.

    Covariates are standardized internally for conditioning; the penalty is
    expressed so the optimized objective equals the original-scale penalized
    partial log-likelihood, and coefficients are transformed back after
    convergence. Convergence is a relative log-likelihood change below
    ``opts.tolerance`` or a gradient sup-norm below 1e-6, whichever first.
    """
    opts = opts or FitOptions()
    problem = _prepare(data)
    if problem.dim == 0:
        coef = np.zeros(0)
        times, cumhaz = problem.breslow_cumhaz(coef)
        return CoxModel(coef, times, cumhaz, 0, schema_hash)

    mean = problem.x.mean(axis=0)
    scale = problem.x.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    std_problem = _CoxProblem(problem.t, problem.e, (problem.x - mean) / scale)
    # Penalizing coef_std with these per-coordinate weights equals penalizing
    # the original-scale coefficients with ridge_penalty * I.
    penalty = opts.ridge_penalty / scale**2

    def objective(c):
        ll, g, h = std_problem.loglik_grad_hess(c, need_hess=True)
        ll -= 0.5 * float(penalty @ c**2)
        g = g - penalty * c
        h = h - np.diag(penalty)
        return ll, g, h

    coef = np.zeros(problem.dim)
    value, grad, hess = objective(coef)
    if objective_trace is not None:
        objective_trace.append(value)
    converged = False
    for _ in range(opts.max_newton_iters):
        if np.max(np.abs(grad)) < _GRAD_TOL:
            converged = True
            break
        try:
            step_dir = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError as exc:
            raise SingularHessianError("Newton step undefined: degenerate covariates") from exc
        if not np.all(np.isfinite(step_dir)):
            raise SingularHessianError("Newton step undefined: non-finite direction")
        step = 1.0
        accepted = False
        for _ in range(_MAX_STEP_HALVINGS):
            candidate = coef + step * step_dir
            cand_value, cand_grad, cand_hess = objective(candidate)
            if np.isfinite(cand_value) and cand_value >= value:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            raise NonConvergenceError("step halving could not improve the objective")
        improvement = cand_value - value
        coef, value, grad, hess = candidate, cand_value, cand_grad, cand_hess
        if objective_trace is not None:
            objective_trace.append(value)
        if improvement / (abs(value) + 1.0) < opts.tolerance:
            converged = True
            break
    if not converged and np.max(np.abs(grad)) >= _GRAD_TOL:
        raise NonConvergenceError(
            f"no convergence after {opts.max_newton_iters} Newton iterations"
        )
    coef_original = coef / scale
    times, cumhaz = problem.breslow_cumhaz(coef_original)
    return CoxModel(coef_original, times, cumhaz, problem.dim, schema_hash)


# ============================================================
# Model evaluation
# ============================================================


def _risk_scores(model: CoxModel, x: np.ndarray) -> np.ndarray:
    if x.shape[-1] != model.covariate_dim:
        raise ValueError(
            f"covariate dimension mismatch: model expects {model.covariate_dim}, got {x.shape[-1]}"
        )
    return np.exp(x @ model.coefficients)


def survival_prob(model: CoxModel, covariates: Sequence[float], time: float) -> float:
    """S(t | x) with the step-function baseline (1.0 before the first event)."""
    x = np.asarray(covariates, dtype=float).reshape(-1)
    risk = float(_risk_scores(model, x))
    idx = int(np.searchsorted(model.baseline_times, time, side="right")) - 1
    cumhaz = float(model.baseline_cumhaz[idx]) if idx >= 0 else 0.0
    return math.exp(-risk * cumhaz)


def median_survival(model: CoxModel, covariates: Sequence[float]) -> Tuple[float, bool]:
    """Smallest baseline time with S <= 1/2, or (support end, False)."""
    x = np.asarray(covariates, dtype=float).reshape(-1)
    times, reached = median_survival_many(model, x[None, :])
    return float(times[0]), bool(reached[0])


def median_survival_many(model: CoxModel, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized median lookup over rows of ``x``."""
    if len(model.baseline_times) == 0:
        raise EmptyBaselineError("model has no baseline event times")
    risks = _risk_scores(model, np.asarray(x, dtype=float))
    # S(t) <= 1/2 exactly when H0(t) >= ln 2 / risk.
    targets = math.log(2.0) / risks
    idx = np.searchsorted(model.baseline_cumhaz, targets, side="left")
    reached = idx < len(model.baseline_times)
    times = model.baseline_times[np.minimum(idx, len(model.baseline_times) - 1)]
    return times, reached


def concordance_index(scores: Sequence[float], data: Sequence[SurvivalSample]) -> float:
    """Harrell concordance of risk scores against observed outcomes.

    A pair is comparable if both had events at different times, or the
    shorter observed time had the event. The higher-risk member should have
    the shorter time; score ties count one half.
    """
    if len(scores) != len(data):
        raise ValueError("scores and data must have equal length")
    times = np.asarray([s.time for s in data])
    events = np.asarray([s.event for s in data], dtype=bool)
    score_arr = np.asarray(scores, dtype=float)
    order = np.argsort(times, kind="stable")
    times, events, score_arr = times[order], events[order], score_arr[order]
    n = len(times)
    comparable = 0
    concordant = 0.0
    for i in np.flatnonzero(events):
        start = int(np.searchsorted(times, times[i], side="right"))
        if start >= n:
            continue
        later = score_arr[start:]
        comparable += n - start
        concordant += np.count_nonzero(score_arr[i] > later)
        concordant += 0.5 * np.count_nonzero(score_arr[i] == later)
    if comparable == 0:
        raise NoComparablePairsError("no comparable pairs")
    return concordant / comparable


# ============================================================
# Pair and patient survival summaries (in years)
# ============================================================


def graft_pair_features(donor: Donor, patient: Patient) -> np.ndarray:
    """Donor covariates, patient graft covariates, pair distance (knm)."""
    dist = distance_nm(donor.location, patient.center)
    return np.concatenate(
        [
            donor.donor_covariates,
            patient.graft_covariates,
            (dist / DISTANCE_FEATURE_SCALE_NM,),
        ]
    )


def graft_surv(graft_model: CoxModel, donor: Donor, patient: Patient) -> float:
    """Median post-transplant survival for the pair, in years."""
    t_days, _ = median_survival(graft_model, graft_pair_features(donor, patient))
    return t_days / DAYS_PER_YEAR


def waitlist_surv(waitlist_model: CoxModel, patient: Patient) -> float:
    """Median survival without transplant, in years."""
    t_days, _ = median_survival(waitlist_model, patient.waitlist_covariates)
    return t_days / DAYS_PER_YEAR
