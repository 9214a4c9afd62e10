"""Potential tuning: objective, non-regression, and an engineered win."""

import numpy as np
import pytest

from allocsim.acceptance import AcceptanceConfig
from allocsim.cohort import Cohort, CohortSchema
from allocsim.domain import BloodType
from allocsim.events import DonorArrival, PatientArrival
from allocsim.policies import PolicyKind, PolicySpec
from allocsim.simulator import SimConfig, run
from allocsim.tuning import (
    TuneConfig,
    evaluate_theta,
    tune_potentials,
    tune_result_to_dict,
)

from helpers import controlled_models, graft_covariate_for_median, make_donor, make_patient

SCHEMA = CohortSchema(waitlist_dim=1, donor_dim=0, graft_dim=1, horizon_days=30.0)


def scarcity_cohort():
    """An O donor arrives before an AB donor; holding the AB patient pays.

    Benefits are donor-independent: the AB patient is worth 9 years, the O
    patient 8. Greedy gives the first (O) donor the AB patient, stranding
    the AB donor, for 9 total. Steering the O donor to the O patient yields
    8 + 9 = 17.
    """
    o_patient = make_patient("po", blood=BloodType.O, graft=(graft_covariate_for_median(10.0),))
    ab_patient = make_patient("pab", blood=BloodType.AB, graft=(graft_covariate_for_median(11.0),))
    events = (
        PatientArrival(0.0, ab_patient),  # id order matters at equal times
        PatientArrival(0.0, o_patient),
        DonorArrival(1.0, make_donor("do", blood=BloodType.O, arrival=1.0)),
        DonorArrival(2.0, make_donor("dab", blood=BloodType.AB, arrival=2.0)),
    )
    return Cohort(events=events, schema=SCHEMA)


def base_spec():
    return PolicySpec(kind=PolicyKind.POTENTIAL)


def test_evaluate_theta_zero_equals_myopic_run():
    cohort = scarcity_cohort()
    models = controlled_models()
    theta0 = evaluate_theta((0.0, 0.0, 0.0, 0.0), [cohort], models, base_spec())
    myopic = run(
        SimConfig(
            horizon_days=SCHEMA.horizon_days,
            policy=PolicySpec(kind=PolicyKind.MYOPIC),
            acceptance=AcceptanceConfig(always_accept=True),
            seed=0,
        ),
        cohort,
        models,
    )
    assert theta0 == pytest.approx(myopic.total_life_years, abs=1e-12)
    assert theta0 == pytest.approx(9.0, abs=0.02)


def test_evaluate_theta_optimum_of_engineered_cohort():
    cohort = scarcity_cohort()
    models = controlled_models()
    # holding back the AB patient for the AB donor requires theta_O - theta_AB > 1
    steered = evaluate_theta((2.0, 0.0, 0.0, 0.0), [cohort], models, base_spec())
    assert steered == pytest.approx(17.0, abs=0.02)


def test_evaluate_theta_sums_over_cohorts():
    cohort = scarcity_cohort()
    models = controlled_models()
    one = evaluate_theta((0.0, 0.0, 0.0, 0.0), [cohort], models, base_spec())
    two = evaluate_theta((0.0, 0.0, 0.0, 0.0), [cohort, cohort], models, base_spec())
    assert two == pytest.approx(2.0 * one)


def test_tune_finds_the_engineered_improvement():
    cohort = scarcity_cohort()
    models = controlled_models()
    config = TuneConfig(training_cohorts=(cohort,), budget_evals=40, seed=0)
    result = tune_potentials(config, models, base_spec())
    zero_score = dict_score_of_zero(result)
    assert zero_score == pytest.approx(9.0, abs=0.02)
    assert result.best_score == pytest.approx(17.0, abs=0.02)
    theta = result.best_potentials
    assert theta[0] - theta[3] > 1.0


def dict_score_of_zero(result):
    for theta, score in result.evaluations:
        if all(v == 0.0 for v in theta):
            return score
    raise AssertionError("zero vector must always be evaluated")


def test_tune_is_deterministic_and_budgeted():
    cohort = scarcity_cohort()
    models = controlled_models()
    config = TuneConfig(training_cohorts=(cohort,), budget_evals=17, seed=3)
    a = tune_potentials(config, models, base_spec())
    b = tune_potentials(config, models, base_spec())
    assert a == b
    assert len(a.evaluations) == 17
    assert a.evaluations[0][0] == (0.0, 0.0, 0.0, 0.0)


def test_tune_budget_one_is_plain_myopic():
    cohort = scarcity_cohort()
    models = controlled_models()
    config = TuneConfig(training_cohorts=(cohort,), budget_evals=1, seed=0)
    result = tune_potentials(config, models, base_spec())
    assert len(result.evaluations) == 1
    assert result.best_potentials == (0.0, 0.0, 0.0, 0.0)


def test_tune_never_regresses_below_zero_vector():
    cohort = scarcity_cohort()
    models = controlled_models()
    for budget in (1, 2, 5, 30):
        for seed in (0, 1, 2):
            config = TuneConfig(training_cohorts=(cohort,), budget_evals=budget, seed=seed)
            result = tune_potentials(config, models, base_spec())
            assert result.best_score >= dict_score_of_zero(result) - 1e-12


def test_tune_respects_search_box():
    cohort = scarcity_cohort()
    models = controlled_models()
    box = ((-0.5, 0.25),) * 4
    config = TuneConfig(training_cohorts=(cohort,), budget_evals=25, search_box=box, seed=1)
    result = tune_potentials(config, models, base_spec())
    for theta, _ in result.evaluations:
        assert all(-0.5 <= v <= 0.25 for v in theta)


def test_tune_without_local_refine():
    cohort = scarcity_cohort()
    models = controlled_models()
    config = TuneConfig(
        training_cohorts=(cohort,), budget_evals=9, seed=2, local_refine=False
    )
    result = tune_potentials(config, models, base_spec())
    assert len(result.evaluations) == 9


def test_tune_config_validation():
    cohort = scarcity_cohort()
    with pytest.raises(ValueError):
        TuneConfig(training_cohorts=())
    with pytest.raises(ValueError):
        TuneConfig(training_cohorts=(cohort,), budget_evals=0)
    with pytest.raises(ValueError):
        TuneConfig(training_cohorts=(cohort,), search_box=((1.0, -1.0),) * 4)
    with pytest.raises(ValueError):
        TuneConfig(training_cohorts=(cohort,), search_box=((0.0, 1.0),) * 3)


def test_tune_result_to_dict_shape():
    cohort = scarcity_cohort()
    models = controlled_models()
    config = TuneConfig(training_cohorts=(cohort,), budget_evals=3, seed=0)
    doc = tune_result_to_dict(tune_potentials(config, models, base_spec()))
    assert set(doc) == {"best_potentials", "best_score", "evaluations"}
    assert len(doc["best_potentials"]) == 4
    assert len(doc["evaluations"]) == 3
    assert all(set(e) == {"potentials", "score"} for e in doc["evaluations"])
