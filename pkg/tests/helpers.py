"""Shared builders for compact test worlds."""

import math

import numpy as np

from allocsim.domain import BloodType, Donor, GeoPoint, Patient
from allocsim.policies import ModelSet
from allocsim.survival import DAYS_PER_YEAR, exponential_cox_model

NYC = GeoPoint(40.7128, -74.0060)
BOSTON = GeoPoint(42.3601, -71.0589)  # about 160 nm from NYC
CHICAGO = GeoPoint(41.8781, -87.6298)  # about 620 nm from NYC
LA = GeoPoint(34.0522, -118.2437)  # about 2140 nm from NYC


def make_patient(
    pid="p",
    blood=BloodType.O,
    status=3,
    listing=0.0,
    center=NYC,
    wl=(0.0,),
    graft=(0.0,),
    death=None,
):
    return Patient(
        id=pid,
        blood_type=blood,
        status=status,
        listing_time=listing,
        center=center,
        waitlist_covariates=wl,
        graft_covariates=graft,
        death_time=death,
    )


def make_donor(did="d", blood=BloodType.O, location=NYC, arrival=1.0, dbd=True, covs=()):
    return Donor(
        id=did,
        blood_type=blood,
        location=location,
        arrival_time=arrival,
        is_dbd=dbd,
        donor_covariates=covs,
    )


def controlled_models(
    waitlist_median_years=2.0,
    graft_median_years=5.0,
    donor_dim=0,
    graft_coef=1.0,
    acceptance=None,
):
    """Models with analytically known medians.

    The waitlist model ignores covariates (zero coefficients), giving every
    patient the same waitlist median. The graft model multiplies the baseline
    hazard by exp(graft_coef * g) for scalar graft covariate g, so a patient
    with g = ln(graft_median_years / m) has graft median m years. The distance
    feature carries zero weight.
    """
    wl_dim = 1
    waitlist = exponential_cox_model(
        np.zeros(wl_dim),
        rate_per_day=math.log(2.0) / (waitlist_median_years * DAYS_PER_YEAR),
        support_days=60.0 * DAYS_PER_YEAR,
    )
    graft = exponential_cox_model(
        np.concatenate([np.zeros(donor_dim), [graft_coef], [0.0]]),
        rate_per_day=math.log(2.0) / (graft_median_years * DAYS_PER_YEAR),
        support_days=80.0 * DAYS_PER_YEAR,
    )
    return ModelSet(graft=graft, waitlist=waitlist, acceptance=acceptance)


def graft_covariate_for_median(target_years, baseline_years=5.0, coef=1.0):
    """Inverse of the controlled graft model: g giving the target median."""
    return math.log(baseline_years / target_years) / coef
