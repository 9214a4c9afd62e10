"""Offer acceptance: logistic probabilities, exponent damping, fitting, AUROC."""

import math

import numpy as np
import pytest

from allocsim.acceptance import (
    AcceptanceConfig,
    AcceptanceModel,
    acceptance_model_from_dict,
    acceptance_model_to_dict,
    acceptance_pair_features,
    adjusted_probability,
    auroc,
    fit_logistic,
    predict_acceptance,
    predict_probability,
)
from allocsim.domain import BloodType, Donor, GeoPoint, Patient
from allocsim.errors import SingleClassError


def test_predict_hand_values():
    model = AcceptanceModel(intercept=0.0, weights=(1.0, -1.0))
    assert predict_probability(model, (0.0, 0.0)) == pytest.approx(0.5)
    assert predict_probability(model, (1.0, 0.0)) == pytest.approx(1.0 / (1.0 + math.exp(-1.0)))
    assert predict_probability(model, (0.0, 1.0)) == pytest.approx(1.0 / (1.0 + math.exp(1.0)))


def test_predict_is_clipped_and_stable():
    model = AcceptanceModel(intercept=0.0, weights=(1.0,))
    hi = predict_probability(model, (1000.0,))
    lo = predict_probability(model, (-1000.0,))
    assert 0.0 < lo < hi < 1.0


def test_predict_acceptance_uses_pair_features():
    donor = Donor("d", BloodType.O, GeoPoint(40.0, -74.0), 0.0, True, (0.2, -0.1))
    patient = Patient("p", BloodType.A, 1, 0.0, GeoPoint(34.0, -118.0), (0.4,), (0.0,))
    model = AcceptanceModel(intercept=-0.3, weights=(0.5, -0.5, 0.25, -0.4))
    features = acceptance_pair_features(donor, patient)
    assert len(features) == 4
    assert features[-1] > 1.0  # cross-country distance in thousands of nm
    assert predict_acceptance(model, donor, patient) == pytest.approx(
        predict_probability(model, features)
    )


def test_adjusted_probability_exponent():
    assert adjusted_probability(0.25, 1.0) == pytest.approx(0.25)
    assert adjusted_probability(0.25, 0.5) == pytest.approx(0.5)
    # exponent zero always accepts, including p close to zero
    assert adjusted_probability(1e-15, 0.0) == 1.0
    assert adjusted_probability(0.9, 0.0) == 1.0
    with pytest.raises(ValueError):
        adjusted_probability(1.5, 1.0)
    with pytest.raises(ValueError):
        adjusted_probability(0.5, 2.0)


def test_exponent_damping_is_monotone_in_alpha():
    # for p < 1, p^alpha rises as alpha falls
    p = 0.3
    alphas = [1.0, 0.75, 0.5, 0.25, 0.0]
    values = [adjusted_probability(p, a) for a in alphas]
    assert all(values[i] < values[i + 1] for i in range(len(values) - 1))


def test_acceptance_config_validation():
    AcceptanceConfig(exponent=0.0)
    AcceptanceConfig(exponent=1.0)
    with pytest.raises(ValueError):
        AcceptanceConfig(exponent=1.01)
    with pytest.raises(ValueError):
        AcceptanceConfig(exponent=-0.1)


def test_fit_logistic_recovers_coefficients():
    rng = np.random.Generator(np.random.Philox(17))
    n = 20000
    true_w = np.array([0.8, -1.2, 0.4])
    features = rng.normal(size=(n, 3))
    logits = 0.5 + features @ true_w
    labels = rng.random(n) < 1.0 / (1.0 + np.exp(-logits))
    model = fit_logistic(features, labels)
    assert abs(model.intercept - 0.5) < 0.1
    assert np.allclose(model.weights, true_w, atol=0.1)


def test_fit_logistic_separable_data_stays_finite():
    features = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    labels = np.array([False, False, True, True])
    model = fit_logistic(features, labels, l2_penalty=1e-3)
    assert np.isfinite(model.intercept)
    assert np.all(np.isfinite(model.weights))
    assert predict_probability(model, (2.0,)) > 0.9


def test_fit_logistic_single_class_raises():
    features = np.zeros((5, 2))
    with pytest.raises(SingleClassError):
        fit_logistic(features, np.ones(5, dtype=bool))
    with pytest.raises(SingleClassError):
        fit_logistic(features, np.zeros(5, dtype=bool))


def test_auroc_hand_case():
    # scores 1..4, labels 0,0,1,1: perfect separation
    assert auroc([1.0, 2.0, 3.0, 4.0], [False, False, True, True]) == 1.0
    assert auroc([4.0, 3.0, 2.0, 1.0], [False, False, True, True]) == 0.0
    # one inversion among 2x2 pairs: 3 of 4 pairs correct, nothing tied
    assert auroc([1.0, 3.0, 2.0, 4.0], [False, False, True, True]) == pytest.approx(0.75)


def test_auroc_tied_scores_count_half():
    assert auroc([1.0, 1.0], [False, True]) == pytest.approx(0.5)


def test_auroc_invariant_under_monotone_transform():
    rng = np.random.Generator(np.random.Philox(23))
    scores = rng.normal(size=300)
    labels = rng.random(300) < 0.4
    labels[0], labels[1] = True, False  # both classes present
    base = auroc(scores, labels)
    assert auroc(np.exp(scores), labels) == pytest.approx(base, abs=1e-12)
    assert auroc(3.0 * scores + 7.0, labels) == pytest.approx(base, abs=1e-12)


def test_auroc_single_class_raises():
    with pytest.raises(SingleClassError):
        auroc([1.0, 2.0], [True, True])


def test_acceptance_model_dict_round_trip():
    model = AcceptanceModel(intercept=-0.3, weights=(0.5, -0.5, 0.25), schema_hash="ff00")
    clone = acceptance_model_from_dict(acceptance_model_to_dict(model))
    assert clone.intercept == model.intercept
    assert np.array_equal(clone.weights, model.weights)
    assert clone.schema_hash == "ff00"


def test_model_validation():
    with pytest.raises(ValueError):
        AcceptanceModel(intercept=float("nan"), weights=(1.0,))
    model = AcceptanceModel(intercept=0.0, weights=(1.0, 2.0))
    with pytest.raises(ValueError):
        predict_probability(model, (1.0,))
