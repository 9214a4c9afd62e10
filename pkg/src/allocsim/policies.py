"""Allocation policies: ranked offer orderings for a donor over a waitlist.

Three families are implemented. The status-quo ranking walks a 68-tier table
keyed by medical urgency status, blood-match quality, and concentric distance
zones. The myopic ranking orders candidates by the estimated survival benefit
of transplanting now (median graft survival minus weighted median waitlist
survival, in years) and only allows transplants with positive benefit. The
potential ranking adds a per-blood-type additive adjustment to that benefit
so scarce-donor recipients can be held back for better future matches.

Ties everywhere break by earlier listing time, then lexicographic patient id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .acceptance import AcceptanceModel
from .domain import (
    BLOOD_TYPES,
    BloodMatch,
    Donor,
    Patient,
    blood_match,
    distance_nm_many,
)
from .survival import CoxModel, DAYS_PER_YEAR, graft_pair_features, median_survival_many


class PolicyKind(Enum):
    STATUS_QUO = "status_quo"
    MYOPIC = "myopic"
    POTENTIAL = "potential"


@dataclass(frozen=True)
class ModelSet:
    """The models a policy run needs: graft, waitlist, optional acceptance."""

    graft: CoxModel
    waitlist: CoxModel
    acceptance: Optional[AcceptanceModel] = None


@dataclass(frozen=True)
class PolicySpec:
    """Parsed policy configuration.

    ``max_distance_nm`` bounds the candidate pool for the myopic and
    potential rankings; the status-quo ranking ignores it and uses its own
    distance zones. ``potentials`` lists the additive adjustment per blood
    type in (O, A, B, AB) order.
    """

    kind: PolicyKind
    delta_tiebreak: bool = False
    delta_exclude: bool = False
    urgency_weight: float = 1.0
    max_distance_nm: Optional[float] = None
    potentials: Optional[Tuple[float, float, float, float]] = None

    def __post_init__(self):
        if self.urgency_weight < 1.0:
            raise ValueError("urgency_weight must be >= 1")
        if self.max_distance_nm is not None and self.max_distance_nm <= 0:
            raise ValueError("max_distance_nm must be positive")
        if self.potentials is not None:
            pot = tuple(float(v) for v in self.potentials)
            if len(pot) != 4 or not all(math.isfinite(v) for v in pot):
                raise ValueError("potentials must be four finite reals (O, A, B, AB)")
            object.__setattr__(self, "potentials", pot)


@dataclass(frozen=True)
class RankedCandidate:
    """One waitlist patient in a donor's offer ordering.

    ``delta_years`` is the policy's benefit estimate (weighted by the urgency
    weight); ``score`` is the primary numeric sort key the ranking used;
    ``tier`` is set only by the status-quo ranking.
    """

    patient_id: str
    tier: Optional[int]
    delta_years: float
    score: float
    eligible_to_transplant: bool


# ============================================================
# Status-quo tier table
# ============================================================

# 68 tiers of (status, match quality, distance bound in nm; None = any).
# Lower tier index is offered first; a candidate lands in the lowest tier
# whose (status, match) row admits the pair distance.
_P = BloodMatch.PRIMARY
_S = BloodMatch.SECONDARY
_TIER_TABLE: Tuple[Tuple[int, int, BloodMatch, Optional[float]], ...] = (
    (1, 1, _P, 500.0), (2, 1, _S, 500.0),
    (3, 2, _P, 500.0), (4, 2, _S, 500.0),
    (5, 3, _P, 250.0), (6, 3, _S, 250.0),
    (7, 1, _P, 1000.0), (8, 1, _S, 1000.0),
    (9, 2, _P, 1000.0), (10, 2, _S, 1000.0),
    (11, 4, _P, 250.0), (12, 4, _S, 250.0),
    (13, 3, _P, 500.0), (14, 3, _S, 500.0),
    (15, 5, _P, 250.0), (16, 5, _S, 250.0),
    (17, 3, _P, 1000.0), (18, 3, _S, 1000.0),
    (19, 6, _P, 250.0), (20, 6, _S, 250.0),
    (21, 1, _P, 1500.0), (22, 1, _S, 1500.0),
    (23, 2, _P, 1500.0), (24, 2, _S, 1500.0),
    (25, 3, _P, 1500.0), (26, 3, _S, 1500.0),
    (27, 4, _P, 500.0), (28, 4, _S, 500.0),
    (29, 5, _P, 500.0), (30, 5, _S, 500.0),
    (31, 6, _P, 500.0), (32, 6, _S, 500.0),
    (33, 1, _P, 2500.0), (34, 1, _S, 2500.0),
    (35, 2, _P, 2500.0), (36, 2, _S, 2500.0),
    (37, 3, _P, 2500.0), (38, 3, _S, 2500.0),
    (39, 4, _P, 1000.0), (40, 4, _S, 1000.0),
    (41, 5, _P, 1000.0), (42, 5, _S, 1000.0),
    (43, 6, _P, 1000.0), (44, 6, _S, 1000.0),
    (45, 1, _P, None), (46, 1, _S, None),
    (47, 2, _P, None), (48, 2, _S, None),
    (49, 3, _P, None), (50, 3, _S, None),
    (51, 4, _P, 1500.0), (52, 4, _S, 1500.0),
    (53, 5, _P, 1500.0), (54, 5, _S, 1500.0),
    (55, 6, _P, 1500.0), (56, 6, _S, 1500.0),
    (57, 4, _P, 2500.0), (58, 4, _S, 2500.0),
    (59, 5, _P, 2500.0), (60, 5, _S, 2500.0),
    (61, 6, _P, 2500.0), (62, 6, _S, 2500.0),
    (63, 4, _P, None), (64, 4, _S, None),
    (65, 5, _P, None), (66, 5, _S, None),
    (67, 6, _P, None), (68, 6, _S, None),
)

# (status, match) -> [(bound, tier), ...] in tier order for fast lookup.
_TIER_LOOKUP: dict = {}
for _tier, _status, _match, _bound in _TIER_TABLE:
    _TIER_LOOKUP.setdefault((_status, _match), []).append((_bound, _tier))


def tier_lookup(status: int, match: BloodMatch, pair_distance_nm: float) -> Optional[int]:
    """Lowest tier admitting the pairing, or None if incompatible.

    Distance bounds are inclusive; every (status, match) key has an
    unbounded tier, so compatible pairs always resolve.
    """
    if match is BloodMatch.INCOMPATIBLE:
        return None
    if not (1 <= status <= 6):
        raise ValueError(f"status must be 1..6, got {status}")
    for bound, tier in _TIER_LOOKUP[(status, match)]:
        if bound is None or pair_distance_nm <= bound:
            return tier
    return None  # unreachable: the table always ends in an unbounded tier


# ============================================================
# Benefit scores
# ============================================================


def transplant_benefit(
    donor: Donor,
    patient: Patient,
    graft_model: CoxModel,
    waitlist_model: CoxModel,
    urgency_weight: float = 1.0,
) -> float:
    """Median graft survival minus weighted median waitlist survival, years."""
    return float(
        _benefit_many(donor, [patient], graft_model, waitlist_model, urgency_weight)[0]
    )


def _benefit_many(
    donor: Donor,
    patients: Sequence[Patient],
    graft_model: CoxModel,
    waitlist_model: CoxModel,
    urgency_weight: float,
) -> np.ndarray:
    graft_x = np.stack([graft_pair_features(donor, p) for p in patients])
    graft_days, _ = median_survival_many(graft_model, graft_x)
    wl_x = np.asarray([p.waitlist_covariates for p in patients], dtype=float)
    wl_x = wl_x.reshape(len(patients), -1)
    wl_days, _ = median_survival_many(waitlist_model, wl_x)
    return (graft_days - urgency_weight * wl_days) / DAYS_PER_YEAR


def _pair_distances(donor: Donor, patients: Sequence[Patient]) -> np.ndarray:
    lats = np.asarray([p.center.latitude for p in patients])
    lons = np.asarray([p.center.longitude for p in patients])
    return distance_nm_many(donor.location, lats, lons)


# ============================================================
# Rankings
# ============================================================


def rank_candidates(
    waitlist: Sequence[Patient],
    donor: Donor,
    models: ModelSet,
    spec: PolicySpec,
) -> List[RankedCandidate]:
    """Dispatch to the ranking for ``spec.kind``."""
    if spec.kind is PolicyKind.STATUS_QUO:
        return status_quo_order(waitlist, donor, models, spec)
    if spec.kind is PolicyKind.MYOPIC:
        return myopic_order(waitlist, donor, models, spec)
    return potential_order(waitlist, donor, models, spec)


def status_quo_order(
    waitlist: Sequence[Patient],
    donor: Donor,
    models: ModelSet,
    spec: PolicySpec,
) -> List[RankedCandidate]:
    """Tier-table ordering; ``max_distance_nm`` is ignored by design.

    Within a tier, candidates order by listing time then id, or by higher
    benefit first when ``delta_tiebreak`` is set. With ``delta_exclude``,
    candidates with strictly negative benefit stay in the ordering but are
    flagged ineligible to transplant.
    """
    if not waitlist:
        return []
    matches = [blood_match(donor.blood_type, p.blood_type) for p in waitlist]
    distances = _pair_distances(donor, waitlist)
    benefits = _benefit_many(
        donor, waitlist, models.graft, models.waitlist, spec.urgency_weight
    )
    keyed = []
    for patient, match, dist, benefit in zip(waitlist, matches, distances, benefits):
        if match is BloodMatch.INCOMPATIBLE:
            continue
        tier = tier_lookup(patient.status, match, float(dist))
        eligible = not (spec.delta_exclude and benefit < 0.0)
        cand = RankedCandidate(patient.id, tier, float(benefit), float(tier), eligible)
        if spec.delta_tiebreak:
            key = (tier, -benefit, patient.listing_time, patient.id)
        else:
            key = (tier, patient.listing_time, patient.id)
        keyed.append((key, cand))
    keyed.sort(key=lambda kc: kc[0])
    return [cand for _, cand in keyed]


def myopic_order(
    waitlist: Sequence[Patient],
    donor: Donor,
    models: ModelSet,
    spec: PolicySpec,
) -> List[RankedCandidate]:
    """Benefit-greedy ordering over blood-compatible candidates in range.

    Candidates beyond ``max_distance_nm`` are dropped from the ordering;
    candidates with non-positive benefit remain but are flagged ineligible
    (a transplant requires strictly positive benefit).
    """
    return _benefit_order(waitlist, donor, models, spec, potentials=None)


def potential_order(
    waitlist: Sequence[Patient],
    donor: Donor,
    models: ModelSet,
    spec: PolicySpec,
) -> List[RankedCandidate]:
    """Benefit ordering with additive per-blood-type adjustments.

    The adjustment shifts the sort score only; transplant eligibility still
    requires strictly positive unadjusted benefit. With zero adjustments the
    ordering equals the myopic one, tie-breaking included.
    """
    potentials = spec.potentials or (0.0, 0.0, 0.0, 0.0)
    return _benefit_order(waitlist, donor, models, spec, potentials=potentials)


def _benefit_order(
    waitlist: Sequence[Patient],
    donor: Donor,
    models: ModelSet,
    spec: PolicySpec,
    potentials: Optional[Tuple[float, float, float, float]],
) -> List[RankedCandidate]:
    if not waitlist:
        return []
    matches = [blood_match(donor.blood_type, p.blood_type) for p in waitlist]
    distances = _pair_distances(donor, waitlist)
    benefits = _benefit_many(
        donor, waitlist, models.graft, models.waitlist, spec.urgency_weight
    )
    blood_index = {bt: i for i, bt in enumerate(BLOOD_TYPES)}
    keyed = []
    for patient, match, dist, benefit in zip(waitlist, matches, distances, benefits):
        if match is BloodMatch.INCOMPATIBLE:
            continue
        if spec.max_distance_nm is not None and dist > spec.max_distance_nm:
            continue
        score = float(benefit)
        if potentials is not None:
            score += potentials[blood_index[patient.blood_type]]
        cand = RankedCandidate(patient.id, None, float(benefit), score, bool(benefit > 0.0))
        keyed.append(((-score, patient.listing_time, patient.id), cand))
    keyed.sort(key=lambda kc: kc[0])
    return [cand for _, cand in keyed]
