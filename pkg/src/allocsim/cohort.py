"""Synthetic cohort generation and delimited cohort IO.

Patient and donor arrivals are Poisson processes; covariates are i.i.d.
standard normal; latent waitlist death times follow the proportional-hazards
law with an exponential baseline and the configured true coefficients, which
makes parameter recovery by the survival fitter checkable. Generated cohorts
carry ground-truth graft/waitlist/acceptance models in their JSON sidecar so
experiments and model fitting have a known world to work against.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .acceptance import (
    AcceptanceModel,
    acceptance_model_from_dict,
    acceptance_model_to_dict,
    acceptance_pair_features,
    predict_acceptance,
)
from .domain import BLOOD_TYPES, BloodType, Donor, GeoPoint, Patient
from .errors import ParseError, SchemaMismatchError, UnsortedTimestampsWarning
from .events import (
    CovariateUpdate,
    DonorArrival,
    Event,
    PatientArrival,
    PatientDeath,
    sort_key,
)
from .survival import (
    CoxModel,
    SurvivalSample,
    cox_model_from_dict,
    cox_model_to_dict,
    exponential_cox_model,
    graft_pair_features,
    schema_hash_of,
)

DAYS_PER_YEAR = 365.25

# A spread of large US metro areas (lat, lon); pair distances span roughly
# 150 to 2400 nautical miles, which exercises every tier-table zone.
DEFAULT_CENTERS: Tuple[GeoPoint, ...] = (
    GeoPoint(40.71, -74.01),    # New York
    GeoPoint(34.05, -118.24),   # Los Angeles
    GeoPoint(41.88, -87.63),    # Chicago
    GeoPoint(29.76, -95.37),    # Houston
    GeoPoint(33.45, -112.07),   # Phoenix
    GeoPoint(39.95, -75.17),    # Philadelphia
    GeoPoint(29.42, -98.49),    # San Antonio
    GeoPoint(32.72, -117.16),   # San Diego
    GeoPoint(32.78, -96.80),    # Dallas
    GeoPoint(47.61, -122.33),   # Seattle
    GeoPoint(42.36, -71.06),    # Boston
    GeoPoint(33.75, -84.39),    # Atlanta
    GeoPoint(39.74, -104.99),   # Denver
    GeoPoint(25.76, -80.19),    # Miami
)


@dataclass(frozen=True)
class CohortSchema:
    """Covariate dimensions and horizon shared by cohort files and models."""

    waitlist_dim: int
    donor_dim: int
    graft_dim: int
    horizon_days: float

    def __post_init__(self):
        if min(self.waitlist_dim, self.donor_dim, self.graft_dim) < 0:
            raise ValueError("covariate dimensions must be non-negative")
        if self.horizon_days <= 0:
            raise ValueError("horizon_days must be positive")

    @property
    def graft_model_dim(self) -> int:
        return self.donor_dim + self.graft_dim + 1

    @property
    def acceptance_dim(self) -> int:
        return self.donor_dim + self.waitlist_dim + 1

    @property
    def hash_value(self) -> str:
        return schema_hash_of(
            {
                "waitlist_dim": self.waitlist_dim,
                "donor_dim": self.donor_dim,
                "graft_dim": self.graft_dim,
            }
        )


@dataclass(frozen=True)
class GroundTruth:
    """The generative models behind a synthetic cohort."""

    waitlist_model: CoxModel
    graft_model: CoxModel
    acceptance_model: AcceptanceModel


@dataclass(frozen=True)
class Cohort:
    """A time-sorted event stream plus its schema and optional ground truth."""

    events: Tuple[Event, ...]
    schema: CohortSchema
    ground_truth: Optional[GroundTruth] = None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        keys = [sort_key(e) for e in self.events]
        if any(keys[i] > keys[i + 1] for i in range(len(keys) - 1)):
            raise ValueError("cohort events must be time-sorted")
        seen_patients = set()
        seen_donors = set()
        for event in self.events:
            if isinstance(event, PatientArrival):
                if event.patient.id in seen_patients:
                    raise ValueError(f"duplicate patient id {event.patient.id}")
                seen_patients.add(event.patient.id)
            elif isinstance(event, DonorArrival):
                if event.donor.id in seen_donors:
                    raise ValueError(f"duplicate donor id {event.donor.id}")
                seen_donors.add(event.donor.id)
            elif isinstance(event, (PatientDeath, CovariateUpdate)):
                if event.patient_id not in seen_patients:
                    raise ValueError(
                        f"event references patient {event.patient_id} before arrival"
                    )

    def patients(self) -> List[Patient]:
        return [e.patient for e in self.events if isinstance(e, PatientArrival)]

    def donors(self) -> List[Donor]:
        return [e.donor for e in self.events if isinstance(e, DonorArrival)]


def _default_acceptance_weights(donor_dim: int, waitlist_dim: int) -> Tuple[float, ...]:
    # Alternating-sign covariate weights plus a distance discount.
    covs = [0.5 if i % 2 == 0 else -0.5 for i in range(donor_dim + waitlist_dim)]
    return tuple(covs + [-0.4])


@dataclass(frozen=True)
class CohortConfig:
    """Generative settings for a synthetic cohort."""

    patient_rate_per_day: float = 8.0
    donor_rate_per_day: float = 3.4
    dbd_fraction: float = 0.6
    blood_type_dist: Tuple[float, float, float, float] = (0.44, 0.42, 0.10, 0.04)
    status_dist: Tuple[float, ...] = (0.08, 0.12, 0.25, 0.25, 0.20, 0.10)
    center_locations: Tuple[GeoPoint, ...] = DEFAULT_CENTERS
    covariate_dims: Tuple[int, int, int] = (4, 3, 3)  # waitlist, donor, graft
    true_waitlist_coefs: Tuple[float, ...] = (0.9, -0.6, 0.4, 0.2)
    true_graft_coefs: Tuple[float, ...] = (0.5, -0.3, 0.2, 0.4, -0.4, 0.2, 0.15)
    baseline_rate: float = math.log(2.0) / (2.0 * DAYS_PER_YEAR)
    graft_baseline_rate: float = math.log(2.0) / (11.0 * DAYS_PER_YEAR)
    horizon_days: float = 30.0
    seed: int = 0
    covariate_update_rate_per_day: float = 0.0
    covariate_update_scale: float = 0.25
    true_acceptance_intercept: float = -0.3
    true_acceptance_weights: Optional[Tuple[float, ...]] = None
    waitlist_support_years: float = 30.0
    graft_support_years: float = 40.0
    baseline_grid_step_days: float = 1.0

    def __post_init__(self):
        if self.patient_rate_per_day <= 0 or self.donor_rate_per_day <= 0:
            raise ValueError("arrival rates must be positive")
        if not (0.0 <= self.dbd_fraction <= 1.0):
            raise ValueError("dbd_fraction must lie in [0, 1]")
        for name, dist, size in (
            ("blood_type_dist", self.blood_type_dist, 4),
            ("status_dist", self.status_dist, 6),
        ):
            if len(dist) != size or any(p < 0 for p in dist):
                raise ValueError(f"{name} must be {size} non-negative probabilities")
            if abs(sum(dist) - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1")
        if not self.center_locations:
            raise ValueError("center_locations must be non-empty")
        d_w, d_d, d_g = self.covariate_dims
        if len(self.true_waitlist_coefs) != d_w:
            raise ValueError("true_waitlist_coefs length must equal the waitlist dim")
        if len(self.true_graft_coefs) != d_d + d_g + 1:
            raise ValueError(
                "true_graft_coefs length must equal donor dim + graft dim + 1 (distance)"
            )
        if self.baseline_rate <= 0 or self.graft_baseline_rate <= 0:
            raise ValueError("baseline rates must be positive")
        if self.horizon_days <= 0:
            raise ValueError("horizon_days must be positive")
        acc = self.true_acceptance_weights
        if acc is not None and len(acc) != d_d + d_w + 1:
            raise ValueError(
                "true_acceptance_weights length must equal donor dim + waitlist dim + 1"
            )

    @property
    def schema(self) -> CohortSchema:
        d_w, d_d, d_g = self.covariate_dims
        return CohortSchema(d_w, d_d, d_g, self.horizon_days)


def default_config(seed: int = 0, **overrides) -> CohortConfig:
    """The desk-scale one-month cohort used by shipped experiments."""
    return replace(CohortConfig(), seed=seed, **overrides) if overrides else replace(
        CohortConfig(), seed=seed
    )


def ground_truth_models(config: CohortConfig) -> GroundTruth:
    """The generative models implied by a cohort config (seed-independent)."""
    schema = config.schema
    mark = schema.hash_value
    step = config.baseline_grid_step_days
    waitlist_model = exponential_cox_model(
        config.true_waitlist_coefs,
        config.baseline_rate,
        support_days=config.waitlist_support_years * DAYS_PER_YEAR,
        step_days=step,
        schema_hash=mark,
    )
    graft_model = exponential_cox_model(
        config.true_graft_coefs,
        config.graft_baseline_rate,
        support_days=config.graft_support_years * DAYS_PER_YEAR,
        step_days=step,
        schema_hash=mark,
    )
    weights = config.true_acceptance_weights
    if weights is None:
        weights = _default_acceptance_weights(schema.donor_dim, schema.waitlist_dim)
    acceptance_model = AcceptanceModel(
        config.true_acceptance_intercept, np.asarray(weights), mark
    )
    return GroundTruth(waitlist_model, graft_model, acceptance_model)


def _poisson_arrival_times(rng: np.random.Generator, rate: float, horizon: float) -> List[float]:
    times = []
    t = float(rng.exponential(1.0 / rate))
    while t < horizon:
        times.append(t)
        t += float(rng.exponential(1.0 / rate))
    return times


def generate(config: CohortConfig) -> Cohort:
    """Generate a synthetic cohort; deterministic given the config."""
    rng = np.random.Generator(np.random.Philox(config.seed))
    schema = config.schema
    d_w, d_d, d_g = config.covariate_dims
    blood_p = np.asarray(config.blood_type_dist)
    status_p = np.asarray(config.status_dist)
    centers = config.center_locations

    events: List[Event] = []
    patient_times = _poisson_arrival_times(rng, config.patient_rate_per_day, config.horizon_days)
    patients: List[Patient] = []
    for i, t in enumerate(patient_times):
        blood = BLOOD_TYPES[int(rng.choice(4, p=blood_p))]
        status = int(rng.choice(6, p=status_p)) + 1
        center = centers[int(rng.integers(0, len(centers)))]
        wl_cov = tuple(rng.standard_normal(d_w))
        gr_cov = tuple(rng.standard_normal(d_g))
        hazard = config.baseline_rate * math.exp(
            float(np.dot(config.true_waitlist_coefs, wl_cov))
        )
        death_time = t + float(rng.exponential(1.0 / hazard))
        patient = Patient(
            id=f"p{i:05d}",
            blood_type=blood,
            status=status,
            listing_time=t,
            center=center,
            waitlist_covariates=wl_cov,
            graft_covariates=gr_cov,
            death_time=death_time,
        )
        patients.append(patient)
        events.append(PatientArrival(t, patient))
        if death_time <= config.horizon_days:
            events.append(PatientDeath(death_time, patient.id))

    donor_times = _poisson_arrival_times(rng, config.donor_rate_per_day, config.horizon_days)
    for i, t in enumerate(donor_times):
        blood = BLOOD_TYPES[int(rng.choice(4, p=blood_p))]
        is_dbd = bool(rng.random() < config.dbd_fraction)
        location = centers[int(rng.integers(0, len(centers)))]
        cov = tuple(rng.standard_normal(d_d))
        events.append(
            DonorArrival(t, Donor(f"d{i:05d}", blood, location, t, is_dbd, cov))
        )

    if config.covariate_update_rate_per_day > 0:
        for patient in patients:
            end = min(
                patient.death_time if patient.death_time is not None else config.horizon_days,
                config.horizon_days,
            )
            t = patient.listing_time
            current = np.asarray(patient.waitlist_covariates)
            while True:
                t += float(rng.exponential(1.0 / config.covariate_update_rate_per_day))
                if t >= end:
                    break
                current = current + config.covariate_update_scale * rng.standard_normal(d_w)
                events.append(CovariateUpdate(t, patient.id, tuple(current)))

    events.sort(key=sort_key)
    return Cohort(tuple(events), schema, ground_truth_models(config))


# ============================================================
# Monte Carlo oracle for survival fitting
# ============================================================


def survival_samples(
    n: int,
    coefficients: Sequence[float],
    baseline_rate: float,
    censor_rate: float,
    seed: int,
) -> List[SurvivalSample]:
    """Draws from the exponential-baseline proportional-hazards law.

    Covariates are standard normal; an independent exponential censoring time
    (rate ``censor_rate``; zero disables censoring) right-censors each draw.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    coef = np.asarray(coefficients, dtype=float)
    x = rng.standard_normal((n, len(coef)))
    hazards = baseline_rate * np.exp(x @ coef)
    event_times = rng.exponential(1.0 / hazards)
    if censor_rate > 0:
        censor_times = rng.exponential(1.0 / censor_rate, size=n)
    else:
        censor_times = np.full(n, np.inf)
    times = np.minimum(event_times, censor_times)
    is_event = event_times <= censor_times
    return [
        SurvivalSample(float(times[i]), bool(is_event[i]), tuple(x[i]))
        for i in range(n)
    ]


def waitlist_outcomes(cohort: Cohort) -> List[SurvivalSample]:
    """Observed (time, event) per patient: death within horizon or censoring.

    Times are measured from listing; covariates are the values at listing.
    """
    horizon = cohort.schema.horizon_days
    samples = []
    for patient in cohort.patients():
        if patient.death_time is not None and patient.death_time <= horizon:
            samples.append(
                SurvivalSample(
                    patient.death_time - patient.listing_time, True, patient.waitlist_covariates
                )
            )
        else:
            samples.append(
                SurvivalSample(horizon - patient.listing_time, False, patient.waitlist_covariates)
            )
    return samples


def sample_graft_outcomes(
    cohort: Cohort, n_pairs: int, seed: int
) -> List[SurvivalSample]:
    """Pair outcomes drawn from the cohort's ground-truth graft model.

    Random donor-patient pairs get survival times sampled from the true
    model; draws beyond the baseline support are right-censored there.
    """
    truth = _require_ground_truth(cohort, "graft outcome sampling")
    donors = cohort.donors()
    patients = cohort.patients()
    if not donors or not patients:
        raise ValueError("cohort must contain donors and patients")
    rng = np.random.Generator(np.random.Philox(seed))
    model = truth.graft_model
    samples = []
    for _ in range(n_pairs):
        donor = donors[int(rng.integers(0, len(donors)))]
        patient = patients[int(rng.integers(0, len(patients)))]
        x = graft_pair_features(donor, patient)
        risk = math.exp(float(x @ model.coefficients))
        target = -math.log(float(rng.random())) / risk if risk > 0 else math.inf
        idx = int(np.searchsorted(model.baseline_cumhaz, target, side="left"))
        if idx < len(model.baseline_times):
            samples.append(SurvivalSample(float(model.baseline_times[idx]), True, tuple(x)))
        else:
            samples.append(SurvivalSample(float(model.baseline_times[-1]), False, tuple(x)))
    return samples


def sample_acceptance_outcomes(
    cohort: Cohort, n_pairs: int, seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Labeled offers drawn from the cohort's ground-truth acceptance model."""
    truth = _require_ground_truth(cohort, "acceptance outcome sampling")
    donors = cohort.donors()
    patients = cohort.patients()
    if not donors or not patients:
        raise ValueError("cohort must contain donors and patients")
    rng = np.random.Generator(np.random.Philox(seed))
    features = np.empty((n_pairs, cohort.schema.acceptance_dim))
    labels = np.empty(n_pairs, dtype=int)
    for k in range(n_pairs):
        donor = donors[int(rng.integers(0, len(donors)))]
        patient = patients[int(rng.integers(0, len(patients)))]
        features[k] = acceptance_pair_features(donor, patient)
        p = predict_acceptance(truth.acceptance_model, donor, patient)
        labels[k] = int(rng.random() < p)
    return features, labels


def _require_ground_truth(cohort: Cohort, what: str) -> GroundTruth:
    if cohort.ground_truth is None:
        raise ValueError(f"{what} requires a synthetic cohort with ground-truth models")
    return cohort.ground_truth


# ============================================================
# Delimited IO
# ============================================================

_PATIENT_FIXED = ["id", "arrival_day", "blood_type", "status", "lat", "lon", "death_day"]
_DONOR_FIXED = ["id", "arrival_day", "blood_type", "is_dbd", "lat", "lon"]
SIDECAR_NAME = "cohort.json"


def _cov_columns(prefix: str, dim: int) -> List[str]:
    return [f"{prefix}_{i}" for i in range(dim)]


def save_csv(cohort: Cohort, out_dir: Path) -> Dict[str, Path]:
    """Write patients.csv, donors.csv, optional updates.csv, and the sidecar."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    schema = cohort.schema
    paths = {
        "patients": out_dir / "patients.csv",
        "donors": out_dir / "donors.csv",
        "sidecar": out_dir / SIDECAR_NAME,
    }

    patient_header = _PATIENT_FIXED + _cov_columns("wl_cov", schema.waitlist_dim) + _cov_columns(
        "gr_cov", schema.graft_dim
    )
    with open(paths["patients"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(patient_header)
        for p in cohort.patients():
            row = [
                p.id,
                repr(p.listing_time),
                p.blood_type.value,
                p.status,
                repr(p.center.latitude),
                repr(p.center.longitude),
                "" if p.death_time is None else repr(p.death_time),
            ]
            row += [repr(v) for v in p.waitlist_covariates]
            row += [repr(v) for v in p.graft_covariates]
            writer.writerow(row)

    donor_header = _DONOR_FIXED + _cov_columns("don_cov", schema.donor_dim)
    with open(paths["donors"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(donor_header)
        for d in cohort.donors():
            row = [
                d.id,
                repr(d.arrival_time),
                d.blood_type.value,
                "true" if d.is_dbd else "false",
                repr(d.location.latitude),
                repr(d.location.longitude),
            ]
            row += [repr(v) for v in d.donor_covariates]
            writer.writerow(row)

    updates = [e for e in cohort.events if isinstance(e, CovariateUpdate)]
    if updates:
        paths["updates"] = out_dir / "updates.csv"
        with open(paths["updates"], "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["patient_id", "time_day"] + _cov_columns("wl_cov", schema.waitlist_dim))
            for u in updates:
                writer.writerow(
                    [u.patient_id, repr(u.time)] + [repr(v) for v in u.waitlist_covariates]
                )

    sidecar = {
        "version": 1,
        "schema": {
            "waitlist_dim": schema.waitlist_dim,
            "donor_dim": schema.donor_dim,
            "graft_dim": schema.graft_dim,
            "horizon_days": schema.horizon_days,
            "schema_hash": schema.hash_value,
        },
        "ground_truth": None
        if cohort.ground_truth is None
        else {
            "waitlist_model": cox_model_to_dict(cohort.ground_truth.waitlist_model),
            "graft_model": cox_model_to_dict(cohort.ground_truth.graft_model),
            "acceptance_model": acceptance_model_to_dict(cohort.ground_truth.acceptance_model),
        },
    }
    with open(paths["sidecar"], "w") as fh:
        json.dump(sidecar, fh, indent=1)
    return paths


def _parse_float(value: str, row: int, column: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ParseError(f"not a number: {value!r}", row=row, column=column) from exc


def _check_header(found: Sequence[str], expected: Sequence[str], path: Path):
    if list(found) != list(expected) and list(found) != [
        c for c in expected if c != "death_day"
    ]:
        raise SchemaMismatchError(
            f"{path}: header {list(found)} does not match schema columns {list(expected)}"
        )


def _read_rows(path: Path) -> Tuple[List[str], List[List[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        return header, list(reader)


def load_csv(
    patients_path: Path,
    donors_path: Path,
    schema: CohortSchema,
    updates_path: Optional[Path] = None,
    ground_truth: Optional[GroundTruth] = None,
) -> Cohort:
    """Load a cohort from delimited files against a known schema.

    Unsorted arrival rows are tolerated: the event stream is sorted on load
    and an ``UnsortedTimestampsWarning`` is emitted.
    """
    patients_path, donors_path = Path(patients_path), Path(donors_path)
    events: List[Event] = []
    unsorted = False

    header, rows = _read_rows(patients_path)
    expected = _PATIENT_FIXED + _cov_columns("wl_cov", schema.waitlist_dim) + _cov_columns(
        "gr_cov", schema.graft_dim
    )
    _check_header(header, expected, patients_path)
    has_death = "death_day" in header
    prev_time = -math.inf
    for r, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=r)
        rec = dict(zip(header, row))
        try:
            blood = BloodType(rec["blood_type"])
        except ValueError:
            raise ParseError(
                f"unknown blood type {rec['blood_type']!r}", row=r, column="blood_type"
            ) from None
        arrival = _parse_float(rec["arrival_day"], r, "arrival_day")
        death_raw = rec.get("death_day", "") if has_death else ""
        death = None if death_raw == "" else _parse_float(death_raw, r, "death_day")
        try:
            patient = Patient(
                id=rec["id"],
                blood_type=blood,
                status=int(_parse_float(rec["status"], r, "status")),
                listing_time=arrival,
                center=GeoPoint(
                    _parse_float(rec["lat"], r, "lat"), _parse_float(rec["lon"], r, "lon")
                ),
                waitlist_covariates=tuple(
                    _parse_float(rec[c], r, c) for c in _cov_columns("wl_cov", schema.waitlist_dim)
                ),
                graft_covariates=tuple(
                    _parse_float(rec[c], r, c) for c in _cov_columns("gr_cov", schema.graft_dim)
                ),
                death_time=death,
            )
        except ValueError as exc:
            raise ParseError(str(exc), row=r) from exc
        if arrival < prev_time:
            unsorted = True
        prev_time = arrival
        events.append(PatientArrival(arrival, patient))
        if death is not None and death <= schema.horizon_days:
            events.append(PatientDeath(death, patient.id))

    header, rows = _read_rows(donors_path)
    expected = _DONOR_FIXED + _cov_columns("don_cov", schema.donor_dim)
    _check_header(header, expected, donors_path)
    prev_time = -math.inf
    for r, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=r)
        rec = dict(zip(header, row))
        try:
            blood = BloodType(rec["blood_type"])
        except ValueError:
            raise ParseError(
                f"unknown blood type {rec['blood_type']!r}", row=r, column="blood_type"
            ) from None
        flag = rec["is_dbd"].strip().lower()
        if flag not in ("true", "false", "1", "0"):
            raise ParseError(f"not a boolean: {rec['is_dbd']!r}", row=r, column="is_dbd")
        arrival = _parse_float(rec["arrival_day"], r, "arrival_day")
        try:
            donor = Donor(
                id=rec["id"],
                blood_type=blood,
                location=GeoPoint(
                    _parse_float(rec["lat"], r, "lat"), _parse_float(rec["lon"], r, "lon")
                ),
                arrival_time=arrival,
                is_dbd=flag in ("true", "1"),
                donor_covariates=tuple(
                    _parse_float(rec[c], r, c) for c in _cov_columns("don_cov", schema.donor_dim)
                ),
            )
        except ValueError as exc:
            raise ParseError(str(exc), row=r) from exc
        if arrival < prev_time:
            unsorted = True
        prev_time = arrival
        events.append(DonorArrival(arrival, donor))

    if updates_path is not None and Path(updates_path).exists():
        header, rows = _read_rows(Path(updates_path))
        expected = ["patient_id", "time_day"] + _cov_columns("wl_cov", schema.waitlist_dim)
        _check_header(header, expected, Path(updates_path))
        for r, row in enumerate(rows, start=1):
            rec = dict(zip(header, row))
            events.append(
                CovariateUpdate(
                    _parse_float(rec["time_day"], r, "time_day"),
                    rec["patient_id"],
                    tuple(
                        _parse_float(rec[c], r, c)
                        for c in _cov_columns("wl_cov", schema.waitlist_dim)
                    ),
                )
            )

    if unsorted:
        warnings.warn(
            "input rows were not time-sorted; events sorted on load",
            UnsortedTimestampsWarning,
        )
    events.sort(key=sort_key)
    return Cohort(tuple(events), schema, ground_truth)


def load_dir(cohort_dir: Path) -> Cohort:
    """Load a cohort directory written by ``save_csv`` (sidecar included)."""
    cohort_dir = Path(cohort_dir)
    sidecar_path = cohort_dir / SIDECAR_NAME
    with open(sidecar_path) as fh:
        sidecar = json.load(fh)
    s = sidecar["schema"]
    schema = CohortSchema(
        int(s["waitlist_dim"]), int(s["donor_dim"]), int(s["graft_dim"]), float(s["horizon_days"])
    )
    truth = None
    if sidecar.get("ground_truth"):
        gt = sidecar["ground_truth"]
        truth = GroundTruth(
            waitlist_model=cox_model_from_dict(gt["waitlist_model"]),
            graft_model=cox_model_from_dict(gt["graft_model"]),
            acceptance_model=acceptance_model_from_dict(gt["acceptance_model"]),
        )
    updates = cohort_dir / "updates.csv"
    return load_csv(
        cohort_dir / "patients.csv",
        cohort_dir / "donors.csv",
        schema,
        updates_path=updates if updates.exists() else None,
        ground_truth=truth,
    )
