"""Offer-acceptance model: logistic probability plus the exponent knob.

The cascade accepts an offer with probability p ** exponent, where p comes
from a logistic model over pair features. exponent = 0 means offers are
always accepted (p ** 0 is taken to be 1), exponent = 1 uses the model as is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from .domain import Donor, Patient, distance_nm
from .errors import SingleClassError
from .survival import DISTANCE_FEATURE_SCALE_NM

# Keep probabilities strictly inside (0, 1) so logs and powers stay finite.
_PROB_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class AcceptanceModel:
    """Logistic acceptance model over pair features."""

    intercept: float
    weights: np.ndarray
    schema_hash: str = ""

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float).reshape(-1))
        if not math.isfinite(self.intercept) or not np.all(np.isfinite(self.weights)):
            raise ValueError("acceptance model parameters must be finite")

    @property
    def feature_dim(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class AcceptanceConfig:
    """Cascade acceptance behavior: exponent in [0, 1] or always-accept."""

    exponent: float = 1.0
    always_accept: bool = False

    def __post_init__(self):
        if not (0.0 <= self.exponent <= 1.0):
            raise ValueError(f"exponent must lie in [0, 1], got {self.exponent}")


def acceptance_model_to_dict(model: AcceptanceModel) -> dict:
    return {
        "intercept": float(model.intercept),
        "weights": [float(w) for w in model.weights],
        "schema_hash": model.schema_hash,
    }


def acceptance_model_from_dict(doc: dict) -> AcceptanceModel:
    return AcceptanceModel(
        intercept=float(doc["intercept"]),
        weights=np.asarray(doc["weights"], dtype=float),
        schema_hash=str(doc.get("schema_hash", "")),
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def acceptance_pair_features(donor: Donor, patient: Patient) -> np.ndarray:
    """Donor covariates, patient waitlist covariates, pair distance (knm)."""
    dist = distance_nm(donor.location, patient.center)
    return np.concatenate(
        [
            donor.donor_covariates,
            patient.waitlist_covariates,
            (dist / DISTANCE_FEATURE_SCALE_NM,),
        ]
    )


def predict_probability(model: AcceptanceModel, features: Sequence[float]) -> float:
    """Probability for one raw feature vector, strictly inside (0, 1)."""
    x = np.asarray(features, dtype=float)
    if x.shape != (model.feature_dim,):
        raise ValueError(
            f"feature dimension mismatch: model expects {model.feature_dim}, got {x.shape}"
        )
    z = model.intercept + float(x @ model.weights)
    p = float(_sigmoid(np.asarray([z]))[0])
    return min(max(p, _PROB_FLOOR), 1.0 - _PROB_FLOOR)


def predict_acceptance(model: AcceptanceModel, donor: Donor, patient: Patient) -> float:
    """Acceptance probability for one offer, strictly inside (0, 1)."""
    return predict_probability(model, acceptance_pair_features(donor, patient))


def adjusted_probability(probability: float, exponent: float) -> float:
    """p ** exponent with the exponent = 0 convention of always accepting."""
    if not (0.0 <= probability <= 1.0):
        raise ValueError(f"probability must lie in [0, 1], got {probability}")
    if not (0.0 <= exponent <= 1.0):
        raise ValueError(f"exponent must lie in [0, 1], got {exponent}")
    if exponent == 0.0:
        return 1.0
    return probability**exponent


def fit_logistic(
    features: np.ndarray,
    labels: Sequence[int],
    l2_penalty: float = 1e-6,
    iters: int = 2000,
    schema_hash: str = "",
) -> AcceptanceModel:
    """Penalized maximum-likelihood fit by fixed-step gradient ascent.

    Features are standardized internally (the penalty applies on that scale,
    the intercept is unpenalized) and weights are mapped back afterwards.
    Deterministic given the data order.
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float).reshape(-1)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("features must be 2-D with one row per label")
    if np.all(y == y[0]):
        raise SingleClassError("labels contain a single class")
    n = len(y)
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    z = (x - mean) / scale

    weights = np.zeros(x.shape[1])
    intercept = 0.0
    step = 1.0
    for _ in range(iters):
        p = _sigmoid(intercept + z @ weights)
        resid = y - p
        grad_w = z.T @ resid / n - l2_penalty * weights
        grad_b = float(resid.mean())
        weights += step * grad_w
        intercept += step * grad_b
        if max(float(np.max(np.abs(grad_w))), abs(grad_b)) < 1e-7:
            break
    weights_original = weights / scale
    intercept_original = intercept - float((weights / scale) @ mean)
    return AcceptanceModel(intercept_original, weights_original, schema_hash)


def auroc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Area under the ROC curve by the rank statistic; ties count one half."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int).reshape(-1)
    if len(s) != len(y):
        raise ValueError("scores and labels must have equal length")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUROC needs both classes")
    ranks = rankdata(s, method="average")
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
