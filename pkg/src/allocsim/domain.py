"""Core actor types, blood-group compatibility, and great-circle distance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Optional, Tuple

import numpy as np

# Mean Earth radius in nautical miles; pinned so distances are reproducible.
EARTH_RADIUS_NM = 3440.065


@total_ordering
class BloodType(Enum):
    O = "O"
    A = "A"
    B = "B"
    AB = "AB"

    def __lt__(self, other: object):
        if not isinstance(other, BloodType):
            return NotImplemented
        return _BLOOD_ORDER[self] < _BLOOD_ORDER[other]


_BLOOD_ORDER = {bt: i for i, bt in enumerate(BloodType)}

BLOOD_TYPES: Tuple[BloodType, ...] = tuple(BloodType)


class BloodMatch(Enum):
    PRIMARY = "primary"
    SECONDARY = "secondary"
    INCOMPATIBLE = "incompatible"


# Donor-side compatibility: which recipient groups are a primary match.
# O donors additionally serve the remaining groups as a secondary match;
# for every other donor group the remaining recipients are incompatible.
_PRIMARY_RECIPIENTS = {
    BloodType.O: frozenset({BloodType.O, BloodType.B}),
    BloodType.A: frozenset({BloodType.A, BloodType.AB}),
    BloodType.B: frozenset({BloodType.B, BloodType.AB}),
    BloodType.AB: frozenset({BloodType.AB}),
}


def blood_match(donor_type: BloodType, patient_type: BloodType) -> BloodMatch:
    """Classify a donor/patient blood-group pairing."""
    if patient_type in _PRIMARY_RECIPIENTS[donor_type]:
        return BloodMatch.PRIMARY
    if donor_type is BloodType.O:
        return BloodMatch.SECONDARY
    return BloodMatch.INCOMPATIBLE


@dataclass(frozen=True)
class GeoPoint:
    """A latitude/longitude pair in degrees."""

    latitude: float
    longitude: float

    def __post_init__(self):
        if not (-90.0 <= self.latitude <= 90.0):
            raise ValueError(f"latitude out of range: {self.latitude}")
        if not (-180.0 <= self.longitude <= 180.0):
            raise ValueError(f"longitude out of range: {self.longitude}")


def distance_nm(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in nautical miles.

    Haversine formula on a sphere of radius ``EARTH_RADIUS_NM``.
    """
    lat1 = math.radians(a.latitude)
    lat2 = math.radians(b.latitude)
    dlat = lat2 - lat1
    dlon = math.radians(b.longitude - a.longitude)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_NM * math.asin(min(1.0, math.sqrt(h)))


def distance_nm_many(origin: GeoPoint, latitudes: np.ndarray, longitudes: np.ndarray) -> np.ndarray:
    """Vectorized haversine from one origin to arrays of points, in nm."""
    lat1 = math.radians(origin.latitude)
    lat2 = np.radians(latitudes)
    dlat = lat2 - lat1
    dlon = np.radians(longitudes - origin.longitude)
    h = np.sin(dlat / 2.0) ** 2 + math.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_NM * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def _as_float_tuple(values) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class Patient:
    """A waitlisted transplant candidate.

    ``death_time`` is the latent synthetic truth (days); the simulator strips
    it from the view handed to allocation policies. Covariates are plain float
    tuples so records are hashable value objects.
    """

    id: str
    blood_type: BloodType
    status: int
    listing_time: float
    center: GeoPoint
    waitlist_covariates: Tuple[float, ...]
    graft_covariates: Tuple[float, ...]
    death_time: Optional[float] = None
    active: bool = True

    def __post_init__(self):
        object.__setattr__(self, "waitlist_covariates", _as_float_tuple(self.waitlist_covariates))
        object.__setattr__(self, "graft_covariates", _as_float_tuple(self.graft_covariates))
        if not (1 <= int(self.status) <= 6):
            raise ValueError(f"patient status must be 1..6, got {self.status}")
        if self.listing_time < 0:
            raise ValueError("listing_time must be non-negative")
        if self.death_time is not None and self.death_time < self.listing_time:
            raise ValueError("death_time precedes listing_time")


@dataclass(frozen=True)
class Donor:
    """A deceased-donor heart offer."""

    id: str
    blood_type: BloodType
    location: GeoPoint
    arrival_time: float
    is_dbd: bool
    donor_covariates: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "donor_covariates", _as_float_tuple(self.donor_covariates))
        if self.arrival_time < 0:
            raise ValueError("arrival_time must be non-negative")
