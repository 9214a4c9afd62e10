"""Cox model fitting, Breslow baseline, medians, and concordance."""

import math

import numpy as np
import pytest

from allocsim.errors import (
    EmptyBaselineError,
    NoComparablePairsError,
    NoEventsError,
)
from allocsim.survival import (
    CoxModel,
    FitOptions,
    SurvivalSample,
    concordance_index,
    cox_model_from_dict,
    cox_model_to_dict,
    exponential_cox_model,
    fit_cox,
    median_survival,
    median_survival_many,
    partial_loglik_grad,
    survival_prob,
)


def make_samples(times, events, covs):
    return [
        SurvivalSample(time=t, event=bool(e), covariates=tuple(x))
        for t, e, x in zip(times, events, covs)
    ]


# ------------------------------------------------------------
# Partial likelihood
# ------------------------------------------------------------


def test_loglik_two_subjects_hand_value():
    # one event with two at risk and coefficients zero: log(1/2)
    data = make_samples([1.0, 2.0], [1, 0], [(0.3,), (-0.1,)])
    value, grad = partial_loglik_grad(data, np.zeros(1))
    assert value == pytest.approx(-math.log(2.0), abs=1e-12)
    # gradient is x_event minus the risk-set mean: 0.3 - (0.3 - 0.1)/2
    assert grad[0] == pytest.approx(0.3 - 0.1, abs=1e-12)


def test_loglik_breslow_tie_hand_value():
    # two tied events among three at risk, theta = 0:
    # each tied death contributes -log(3) under Breslow
    data = make_samples([1.0, 1.0, 2.0], [1, 1, 0], [(1.0,), (0.0,), (0.0,)])
    value, _ = partial_loglik_grad(data, np.zeros(1))
    assert value == pytest.approx(-2.0 * math.log(3.0), abs=1e-12)


def test_loglik_nonzero_theta_hand_value():
    # single event, theta = 1, covariates 1 and 0:
    # ll = 1 - log(e^1 + e^0)
    data = make_samples([1.0, 2.0], [1, 0], [(1.0,), (0.0,)])
    value, grad = partial_loglik_grad(data, np.array([1.0]))
    expected = 1.0 - math.log(math.e + 1.0)
    assert value == pytest.approx(expected, abs=1e-12)
    w = math.e / (math.e + 1.0)
    assert grad[0] == pytest.approx(1.0 - w, abs=1e-12)


def test_loglik_gradient_matches_finite_differences():
    rng = np.random.Generator(np.random.Philox(5))
    for _ in range(40):
        n = int(rng.integers(4, 25))
        d = int(rng.integers(1, 4))
        times = rng.exponential(1.0, size=n)
        times[rng.random(n) < 0.2] = times[0]  # force some ties
        events = rng.random(n) < 0.7
        if not events.any():
            events[0] = True
        covs = rng.normal(size=(n, d))
        data = make_samples(times, events, covs)
        theta = rng.normal(scale=0.5, size=d)
        penalty = float(rng.uniform(0.0, 1.0))
        _, grad = partial_loglik_grad(data, theta, ridge_penalty=penalty)
        eps = 1e-6
        for k in range(d):
            bump = np.zeros(d)
            bump[k] = eps
            up, _ = partial_loglik_grad(data, theta + bump, ridge_penalty=penalty)
            down, _ = partial_loglik_grad(data, theta - bump, ridge_penalty=penalty)
            fd = (up - down) / (2.0 * eps)
            assert grad[k] == pytest.approx(fd, abs=5e-5)


def test_penalty_shrinks_coefficients():
    rng = np.random.Generator(np.random.Philox(9))
    n = 400
    covs = rng.normal(size=(n, 2))
    risk = np.exp(covs @ np.array([1.0, -1.0]))
    times = rng.exponential(1.0 / risk)
    data = make_samples(times, np.ones(n), covs)
    loose = fit_cox(data, FitOptions(ridge_penalty=1e-8))
    tight = fit_cox(data, FitOptions(ridge_penalty=50.0))
    assert np.linalg.norm(tight.coefficients) < np.linalg.norm(loose.coefficients)


# ------------------------------------------------------------
# Fitting
# ------------------------------------------------------------


def test_fit_requires_events():
    data = make_samples([1.0, 2.0], [0, 0], [(0.1,), (0.2,)])
    with pytest.raises(NoEventsError):
        fit_cox(data, FitOptions())
    with pytest.raises(NoEventsError):
        fit_cox([], FitOptions())


def test_fit_objective_trace_is_monotone():
    rng = np.random.Generator(np.random.Philox(11))
    n = 200
    covs = rng.normal(size=(n, 3))
    risk = np.exp(covs @ np.array([0.8, -0.5, 0.0]))
    times = rng.exponential(1.0 / risk)
    events = rng.random(n) < 0.8
    events[0] = True
    data = make_samples(times, events, covs)
    trace = []
    fit_cox(data, FitOptions(ridge_penalty=0.05), objective_trace=trace)
    assert len(trace) >= 2
    diffs = np.diff(trace)
    assert np.all(diffs >= -1e-10)


def test_fit_recovers_known_coefficients():
    rng = np.random.Generator(np.random.Philox(4))
    n = 4000
    theta_true = np.array([1.0, -0.5])
    covs = rng.normal(size=(n, 2))
    risk = np.exp(covs @ theta_true)
    times = rng.exponential(1.0 / risk)
    data = make_samples(times, np.ones(n), covs)
    model = fit_cox(data, FitOptions(ridge_penalty=0.01))
    assert np.allclose(model.coefficients, theta_true, atol=0.06)


def test_fit_zero_dimensional_covariates():
    data = make_samples([1.0, 2.0, 3.0, 4.0], [1, 1, 1, 1], [(), (), (), ()])
    model = fit_cox(data, FitOptions())
    assert model.covariate_dim == 0
    # exponential-ish baseline still present
    assert model.baseline_cumhaz[-1] > 0.0


def test_breslow_baseline_hand_case():
    # four subjects, all events, theta = 0: increments 1/4, 1/3, 1/2, 1
    data = make_samples([1.0, 2.0, 3.0, 4.0], [1, 1, 1, 1], [(0.0,), (0.0,), (0.0,), (0.0,)])
    model = fit_cox(data, FitOptions(ridge_penalty=10.0))
    # heavy penalty pins theta near zero; compare against the exact theta=0 baseline
    expected = np.array([1 / 4, 1 / 4 + 1 / 3, 1 / 4 + 1 / 3 + 1 / 2, 1 / 4 + 1 / 3 + 1 / 2 + 1])
    assert np.allclose(model.baseline_times, [1.0, 2.0, 3.0, 4.0])
    assert np.allclose(model.baseline_cumhaz, expected, atol=5e-3)


def test_breslow_baseline_with_ties_and_censoring():
    # times 1,1,2,3 events 1,1,0,1 at theta=0:
    # t=1: 2 deaths, 4 at risk -> 2/4; t=3: 1 death, 1 at risk -> 1
    data = make_samples([1.0, 1.0, 2.0, 3.0], [1, 1, 0, 1], [(), (), (), ()])
    model = fit_cox(data, FitOptions())
    assert np.allclose(model.baseline_times, [1.0, 3.0])
    assert np.allclose(model.baseline_cumhaz, [0.5, 1.5], atol=1e-12)


# ------------------------------------------------------------
# Survival curves and medians
# ------------------------------------------------------------


def step_model(times, cumhaz, dim=0):
    return CoxModel(
        coefficients=np.zeros(dim),
        baseline_times=np.asarray(times, dtype=float),
        baseline_cumhaz=np.asarray(cumhaz, dtype=float),
        covariate_dim=dim,
    )


def test_survival_prob_step_lookup():
    model = step_model([1.0, 2.0, 3.0], [0.2, 0.7, 1.5])
    x = ()
    assert survival_prob(model, x, 0.5) == pytest.approx(1.0)
    assert survival_prob(model, x, 1.0) == pytest.approx(math.exp(-0.2))
    assert survival_prob(model, x, 1.99) == pytest.approx(math.exp(-0.2))
    assert survival_prob(model, x, 2.0) == pytest.approx(math.exp(-0.7))
    assert survival_prob(model, x, 50.0) == pytest.approx(math.exp(-1.5))


def test_median_survival_hand_cases():
    model = step_model([1.0, 2.0, 3.0], [0.2, 0.7, 1.5])
    # risk 1: need H >= ln 2 = 0.693 -> first time 2.0
    t, reached = median_survival(model, ())
    assert reached and t == 2.0
    # strong protection: never reaches a half
    weak = step_model([1.0, 2.0, 3.0], [0.01, 0.02, 0.03])
    t, reached = median_survival(weak, ())
    assert not reached and t == 3.0


def test_median_survival_scan_oracle():
    # brute scan of survival_prob agrees with the searchsorted shortcut
    rng = np.random.Generator(np.random.Philox(21))
    for _ in range(50):
        k = int(rng.integers(2, 40))
        times = np.sort(rng.uniform(0.1, 100.0, size=k))
        times = np.unique(times)
        cumhaz = np.cumsum(rng.uniform(0.001, 0.3, size=len(times)))
        dim = 2
        model = CoxModel(
            coefficients=rng.normal(scale=0.3, size=dim),
            baseline_times=times,
            baseline_cumhaz=cumhaz,
            covariate_dim=dim,
        )
        x = tuple(rng.normal(size=dim))
        t_fast, reached_fast = median_survival(model, x)
        scan = None
        for t in times:
            if survival_prob(model, x, t) <= 0.5:
                scan = t
                break
        if scan is None:
            assert not reached_fast and t_fast == times[-1]
        else:
            assert reached_fast and t_fast == scan


def test_median_survival_many_matches_scalar():
    model = step_model([1.0, 2.0, 5.0, 9.0], [0.1, 0.4, 0.9, 2.0], dim=1)
    covs = np.array([[-2.0], [0.0], [1.0], [3.0]])
    model = CoxModel(
        coefficients=np.array([0.7]),
        baseline_times=model.baseline_times,
        baseline_cumhaz=model.baseline_cumhaz,
        covariate_dim=1,
    )
    times, reached = median_survival_many(model, covs)
    for i in range(4):
        t, r = median_survival(model, tuple(covs[i]))
        assert times[i] == t and reached[i] == r


def test_median_empty_baseline_raises():
    model = step_model([], [])
    with pytest.raises(EmptyBaselineError):
        median_survival(model, ())


def test_exponential_cox_model_grid():
    model = exponential_cox_model(np.array([0.5]), rate_per_day=0.01, support_days=10.0)
    assert model.baseline_times[0] == 1.0
    assert model.baseline_times[-1] == 10.0
    assert np.allclose(model.baseline_cumhaz, 0.01 * model.baseline_times)


def test_model_dict_round_trip():
    model = step_model([1.0, 4.0], [0.3, 0.9], dim=3)
    model = CoxModel(
        coefficients=np.array([0.1, -0.2, 0.3]),
        baseline_times=model.baseline_times,
        baseline_cumhaz=model.baseline_cumhaz,
        covariate_dim=3,
        schema_hash="abc123",
    )
    clone = cox_model_from_dict(cox_model_to_dict(model))
    assert np.array_equal(clone.coefficients, model.coefficients)
    assert np.array_equal(clone.baseline_times, model.baseline_times)
    assert np.array_equal(clone.baseline_cumhaz, model.baseline_cumhaz)
    assert clone.schema_hash == "abc123"


def test_model_validation():
    with pytest.raises(ValueError):
        step_model([2.0, 1.0], [0.1, 0.2])  # times not increasing
    with pytest.raises(ValueError):
        step_model([1.0, 2.0], [0.3, 0.2])  # cumhaz decreasing
    model = step_model([1.0], [0.1], dim=2)
    with pytest.raises(ValueError):
        survival_prob(model, (1.0,), 1.0)  # wrong covariate dim


# ------------------------------------------------------------
# Concordance
# ------------------------------------------------------------


def naive_concordance(scores, samples):
    concordant = 0.0
    comparable = 0
    n = len(samples)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            # i must die strictly first for the pair to be usable
            if not samples[i].event or samples[i].time >= samples[j].time:
                continue
            comparable += 1
            if scores[i] > scores[j]:
                concordant += 1.0
            elif scores[i] == scores[j]:
                concordant += 0.5
    if comparable == 0:
        raise NoComparablePairsError("no pairs")
    return concordant / comparable


def test_concordance_perfect_and_reversed():
    samples = make_samples([1.0, 2.0, 3.0, 4.0], [1, 1, 1, 1], [()] * 4)
    assert concordance_index([4.0, 3.0, 2.0, 1.0], samples) == 1.0
    assert concordance_index([1.0, 2.0, 3.0, 4.0], samples) == 0.0


def test_concordance_ties_and_censoring_oracle():
    rng = np.random.Generator(np.random.Philox(13))
    for _ in range(60):
        n = int(rng.integers(3, 30))
        times = rng.integers(1, 6, size=n).astype(float)  # heavy ties
        events = rng.random(n) < 0.6
        scores = rng.integers(0, 4, size=n).astype(float)  # score ties too
        samples = make_samples(times, events, [()] * n)
        try:
            expected = naive_concordance(scores, samples)
        except NoComparablePairsError:
            with pytest.raises(NoComparablePairsError):
                concordance_index(scores, samples)
            continue
        assert concordance_index(scores, samples) == pytest.approx(expected, abs=1e-12)


def test_concordance_no_comparable_pairs():
    samples = make_samples([2.0, 2.0], [1, 1], [(), ()])  # equal times never compare
    with pytest.raises(NoComparablePairsError):
        concordance_index([1.0, 2.0], samples)
