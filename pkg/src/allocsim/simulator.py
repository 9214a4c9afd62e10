"""Discrete-event allocation simulator.

Events pop off a heap in (time, kind, id) order: deaths, covariate updates,
patient arrivals, donor arrivals, batch deadlines. An arriving donor either
runs an offer cascade down the policy's ranking immediately, or (brain-death
donors under batching) joins the open batch, which flushes on reaching the
batch size or at its deadline by solving a maximum-weight matching over the
benefit matrix with every matched pair accepting. A transplanted patient
leaves the waitlist and their scheduled death event is ignored; latent death
times are stripped from the patient view policies see. Blood-compatible
means a primary or secondary match throughout.

One uniform draw per extended offer (accept when u < adjusted probability),
from a counter-based Philox generator keyed by the config seed; replication
i uses seed + i.
"""

from __future__ import annotations

import heapq
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .acceptance import AcceptanceConfig, adjusted_probability, predict_acceptance
from .cohort import Cohort
from .domain import BloodMatch, Donor, Patient, blood_match, distance_nm
from .errors import EventOutOfRangeError, SchemaMismatchError
from .events import (
    BatchDeadline,
    CovariateUpdate,
    DonorArrival,
    PatientArrival,
    PatientDeath,
    sort_key,
)
from .matching import WeightMatrix, max_weight_matching
from .policies import (
    ModelSet,
    PolicySpec,
    RankedCandidate,
    _benefit_many,
    rank_candidates,
)

logger = logging.getLogger("allocsim.simulator")

HOURS_PER_DAY = 24.0


@dataclass(frozen=True)
class SimConfig:
    horizon_days: float
    policy: PolicySpec
    acceptance: AcceptanceConfig = AcceptanceConfig()
    batch_size: int = 1
    batch_window_hours: float = 48.0
    seed: int = 0
    replications: int = 1

    def __post_init__(self):
        if self.horizon_days <= 0:
            raise ValueError("horizon_days must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.batch_window_hours <= 0:
            raise ValueError("batch_window_hours must be positive")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class TransplantRecord:
    donor_id: str
    patient_id: str
    time_days: float
    delta_years: float


@dataclass(frozen=True)
class SimResult:
    total_life_years: float
    transplants: Tuple[TransplantRecord, ...]
    discarded_donors: int
    waitlist_deaths: int
    offers_made: int
    offers_rejected: int


def result_to_json(result: SimResult) -> str:
    """Canonical JSON for a result; byte-identical across equal runs."""
    doc = {
        "total_life_years": result.total_life_years,
        "discarded_donors": result.discarded_donors,
        "waitlist_deaths": result.waitlist_deaths,
        "offers_made": result.offers_made,
        "offers_rejected": result.offers_rejected,
        "transplants": [
            {
                "donor_id": t.donor_id,
                "patient_id": t.patient_id,
                "time_days": t.time_days,
                "delta_years": t.delta_years,
            }
            for t in result.transplants
        ],
    }
    return json.dumps(doc, sort_keys=True)


def save_transplants_csv(result: SimResult, path: Path):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["donor_id", "patient_id", "time_days", "delta_years"])
        for t in result.transplants:
            writer.writerow([t.donor_id, t.patient_id, repr(t.time_days), repr(t.delta_years)])


def _validate_schema(config: SimConfig, cohort: Cohort, models: ModelSet):
    schema = cohort.schema
    if models.graft.covariate_dim != schema.graft_model_dim:
        raise SchemaMismatchError(
            f"graft model expects {models.graft.covariate_dim} features, cohort implies "
            f"{schema.graft_model_dim}"
        )
    if models.waitlist.covariate_dim != schema.waitlist_dim:
        raise SchemaMismatchError(
            f"waitlist model expects {models.waitlist.covariate_dim} features, cohort has "
            f"{schema.waitlist_dim}"
        )
    if not config.acceptance.always_accept:
        if models.acceptance is None:
            raise SchemaMismatchError("an acceptance model is required unless always_accept")
        if models.acceptance.feature_dim != schema.acceptance_dim:
            raise SchemaMismatchError(
                f"acceptance model expects {models.acceptance.feature_dim} features, cohort "
                f"implies {schema.acceptance_dim}"
            )


def offer_cascade(
    donor: Donor,
    waitlist: Sequence[Patient],
    models: ModelSet,
    policy: PolicySpec,
    acceptance: AcceptanceConfig,
    rng: np.random.Generator,
) -> Tuple[Optional[Patient], int, int]:
    """Walk the ranking, offering to eligible candidates until one accepts.

    Returns (accepting patient or None, offers made, offers rejected).
    """
    by_id = {p.id: p for p in waitlist}
    made = 0
    rejected = 0
    for cand in rank_candidates(waitlist, donor, models, policy):
        if not cand.eligible_to_transplant:
            continue
        patient = by_id[cand.patient_id]
        made += 1
        if acceptance.always_accept:
            return patient, made, rejected
        p = predict_acceptance(models.acceptance, donor, patient)
        if rng.random() < adjusted_probability(p, acceptance.exponent):
            return patient, made, rejected
        rejected += 1
    return None, made, rejected


class _Engine:
    def __init__(self, config: SimConfig, cohort: Cohort, models: ModelSet):
        self.config = config
        self.models = models
        self.rng = np.random.Generator(np.random.Philox(config.seed))
        self.active: Dict[str, Patient] = {}
        self.transplants: List[TransplantRecord] = []
        self.total_life_years = 0.0
        self.discarded = 0
        self.deaths = 0
        self.offers_made = 0
        self.offers_rejected = 0
        self.batch: List[Donor] = []
        self.batch_seq = 0
        self.heap: List[Tuple[float, int, str, int, object]] = []
        self.push_count = 0
        for event in cohort.events:
            if not (0.0 <= event.time <= config.horizon_days):
                raise EventOutOfRangeError(
                    f"event at t={event.time} outside [0, {config.horizon_days}]"
                )
            self._push(event)

    def _push(self, event):
        t, priority, ident = sort_key(event)
        heapq.heappush(self.heap, (t, priority, ident, self.push_count, event))
        self.push_count += 1

    def waitlist_view(self) -> List[Patient]:
        return list(self.active.values())

    def run(self) -> SimResult:
        while self.heap:
            _, _, _, _, event = heapq.heappop(self.heap)
            if isinstance(event, PatientArrival):
                # Policies never see the latent death time.
                self.active[event.patient.id] = replace(event.patient, death_time=None)
            elif isinstance(event, PatientDeath):
                if event.patient_id in self.active:
                    del self.active[event.patient_id]
                    self.deaths += 1
            elif isinstance(event, CovariateUpdate):
                patient = self.active.get(event.patient_id)
                if patient is not None:
                    self.active[event.patient_id] = replace(
                        patient, waitlist_covariates=event.waitlist_covariates
                    )
            elif isinstance(event, DonorArrival):
                self._handle_donor(event.donor, event.time)
            elif isinstance(event, BatchDeadline):
                if event.batch_id == f"batch{self.batch_seq:06d}" and self.batch:
                    self._flush_batch(event.time)
        return SimResult(
            total_life_years=self.total_life_years,
            transplants=tuple(self.transplants),
            discarded_donors=self.discarded,
            waitlist_deaths=self.deaths,
            offers_made=self.offers_made,
            offers_rejected=self.offers_rejected,
        )

    def _handle_donor(self, donor: Donor, now: float):
        if self.config.batch_size > 1 and donor.is_dbd:
            if not self.batch:
                deadline = now + self.config.batch_window_hours / HOURS_PER_DAY
                self._push(BatchDeadline(deadline, f"batch{self.batch_seq:06d}"))
            self.batch.append(donor)
            if len(self.batch) >= self.config.batch_size:
                self._flush_batch(now)
            return
        self._cascade(donor, now)

    def _cascade(self, donor: Donor, now: float):
        patient, made, rejected = offer_cascade(
            donor,
            self.waitlist_view(),
            self.models,
            self.config.policy,
            self.config.acceptance,
            self.rng,
        )
        self.offers_made += made
        self.offers_rejected += rejected
        if patient is None:
            self.discarded += 1
            return
        self._transplant(donor, patient, now)

    def _transplant(self, donor: Donor, patient: Patient, now: float):
        benefit = float(
            _benefit_many(
                donor, [patient], self.models.graft, self.models.waitlist, 1.0
            )[0]
        )
        self.total_life_years += benefit
        self.transplants.append(TransplantRecord(donor.id, patient.id, now, benefit))
        del self.active[patient.id]

    def _flush_batch(self, now: float):
        donors = self.batch
        self.batch = []
        self.batch_seq += 1
        waitlist = self.waitlist_view()
        spec = self.config.policy
        if not waitlist:
            self.discarded += len(donors)
            return
        n_rows, n_cols = len(donors), len(waitlist)
        weights = np.zeros((n_rows, n_cols))
        forbidden = np.ones((n_rows, n_cols), dtype=bool)
        for i, donor in enumerate(donors):
            benefits = _benefit_many(
                donor, waitlist, self.models.graft, self.models.waitlist, spec.urgency_weight
            )
            for j, patient in enumerate(waitlist):
                if blood_match(donor.blood_type, patient.blood_type) is BloodMatch.INCOMPATIBLE:
                    continue
                if (
                    spec.max_distance_nm is not None
                    and distance_nm(donor.location, patient.center) > spec.max_distance_nm
                ):
                    continue
                if benefits[j] > 0.0:
                    weights[i, j] = benefits[j]
                    forbidden[i, j] = False
        pairs = max_weight_matching(WeightMatrix(weights, forbidden))
        matched_rows = {i for i, _ in pairs}
        # Matched pairs all accept; each counts as one made offer.
        for i, j in sorted(pairs):
            self.offers_made += 1
            self._transplant(donors[i], waitlist[j], now)
        self.discarded += n_rows - len(matched_rows)
        logger.debug("flushed batch of %d donors, %d matched", n_rows, len(pairs))


def run(config: SimConfig, cohort: Cohort, models: ModelSet) -> SimResult:
    """Simulate one replication; deterministic given (config, cohort, models)."""
    _validate_schema(config, cohort, models)
    return _Engine(config, cohort, models).run()


def replicate_totals(
    config: SimConfig, cohort: Cohort, models: ModelSet, threads: int = 1
) -> List[float]:
    """Objective totals for replications seeded seed, seed + 1, ..."""
    seeds = [config.seed + i for i in range(config.replications)]

    def one(seed: int) -> float:
        return run(replace(config, seed=seed, replications=1), cohort, models).total_life_years

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def replicate(
    config: SimConfig, cohort: Cohort, models: ModelSet, threads: int = 1
) -> Tuple[float, float]:
    """Mean and sample standard deviation over replications (0.0 when n = 1)."""
    totals = replicate_totals(config, cohort, models, threads=threads)
    mean = float(np.mean(totals))
    std = float(np.std(totals, ddof=1)) if len(totals) > 1 else 0.0
    return mean, std
