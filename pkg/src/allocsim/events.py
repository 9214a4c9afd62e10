"""Event stream records consumed by the discrete-event simulator.

Events at equal times resolve in a fixed kind order (death, covariate update,
patient arrival, donor arrival, batch deadline) and then by subject id, so a
sorted stream is unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

from .domain import Donor, Patient


@dataclass(frozen=True)
class PatientDeath:
    time: float
    patient_id: str


@dataclass(frozen=True)
class CovariateUpdate:
    time: float
    patient_id: str
    waitlist_covariates: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "waitlist_covariates", tuple(float(v) for v in self.waitlist_covariates)
        )


@dataclass(frozen=True)
class PatientArrival:
    time: float
    patient: Patient


@dataclass(frozen=True)
class DonorArrival:
    time: float
    donor: Donor


@dataclass(frozen=True)
class BatchDeadline:
    """Internal simulator event: flush the open donor batch."""

    time: float
    batch_id: str


Event = Union[PatientDeath, CovariateUpdate, PatientArrival, DonorArrival, BatchDeadline]

# Tie order at equal timestamps.
KIND_PRIORITY = {
    PatientDeath: 0,
    CovariateUpdate: 1,
    PatientArrival: 2,
    DonorArrival: 3,
    BatchDeadline: 4,
}


def subject_id(event: Event) -> str:
    if isinstance(event, PatientArrival):
        return event.patient.id
    if isinstance(event, DonorArrival):
        return event.donor.id
    if isinstance(event, BatchDeadline):
        return event.batch_id
    return event.patient_id


def sort_key(event: Event) -> Tuple[float, int, str]:
    return (event.time, KIND_PRIORITY[type(event)], subject_id(event))
