import itertools
import json

import numpy as np
import pytest

import sparseclf as sc


@pytest.fixture(scope="module")
def planted():
    return sc.gen_synthetic(n=200, p=30, k_dagger=3, correlation="exponential", rho=0.5, s=3.0, seed=7)


def test_synthetic_is_deterministic(planted):
    train, val, beta = planted
    again = sc.gen_synthetic(n=200, p=30, k_dagger=3, correlation="exponential", rho=0.5, s=3.0, seed=7)
    assert np.array_equal(train.to_dense(), again[0].to_dense())
    assert np.array_equal(train.y, again[0].y)
    # fixed design: same features, different labels
    assert np.array_equal(train.to_dense(), val.to_dense())
    assert not np.array_equal(train.y, val.y)
    assert list(np.flatnonzero(beta)) == [0, 10, 20]


def test_threshold_matches_closed_form():
    # (Lhat|c| - l1)/(Lhat + 2 l2) when above the cut
    assert sc.threshold(3.0, 0.1, 0.5, 0.25, 2.0) == pytest.approx((6.0 - 0.5) / 2.5)
    assert sc.threshold(0.1, 1.0, 0.0, 0.0, 1.0) == 0.0


def test_fit_above_lambda0_max_is_zero(planted):
    train, _, _ = planted
    lmax = sc.lambda0_max(train, "logistic", 0.0, 1e-3)
    sol = sc.fit(train, l0=1.01 * lmax, l2=1e-3)
    assert sol.support == []
    assert sc.fit(train, l0=0.5 * lmax, l2=1e-3).support != []


def test_local_search_never_worse(planted):
    train, _, _ = planted
    lmax = sc.lambda0_max(train, "squared-hinge", 0.0, 1e-2)
    for frac in (0.3, 0.1, 0.03):
        cd = sc.fit(train, "squared-hinge", l0=frac * lmax, l2=1e-2)
        ls = sc.fit(train, "squared-hinge", l0=frac * lmax, l2=1e-2, local_search=True)
        assert ls.objective <= cd.objective + 1e-12


def test_path_and_tuning_recover_planted_support(planted):
    train, val, beta = planted
    path = sc.fit_path(train, l2=[1e-2, 1e-3], n_lambda0=30)
    assert len(path) > 2
    best = path.entries[sc.tune(path, val)]
    rep = sc.recovery_report(best.solution.beta, beta)
    # one fixed-design seed may tune to a superset; the planted coordinates must all be there
    assert rep["recall"] == 1.0
    assert 0.5 < sc.auc(train.scores(best.solution.beta), train.y) <= 1.0


def test_mip_certifies_small_problem():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((80, 8))
    y = np.where(X[:, 0] - X[:, 3] + 0.5 * rng.standard_normal(80) > 0, 1.0, -1.0)
    data = sc.Dataset(X, y)
    l0, l2 = 0.02, 1e-2
    res = sc.iga_solve(data, l0=l0, l2=l2)
    assert res.status == "optimal"
    assert res.gap <= 1e-6
    cert = json.loads(res.certificate())
    assert cert["schema"] == 1 and cert["support"] == res.support

    # brute force over all 256 supports, each polished by coordinate descent
    def objective(support):
        if not support:
            return np.mean(np.log1p(np.exp(-y * 0.0)))
        sub = sc.Dataset(X[:, list(support)], y)
        sol = sc.fit(sub, l2=l2, rel_tol=1e-14, max_cycles=100000, grad_tol=1e-12)
        return sol.objective + l0 * len(support)

    best = min(objective(s) for r in range(9) for s in itertools.combinations(range(8), r))
    assert res.objective == pytest.approx(best, abs=1e-6)


def test_errors_surface_as_value_errors(planted):
    train, _, _ = planted
    with pytest.raises(ValueError, match="supported"):
        sc.fit(train, "hinge", l0=0.1)
    with pytest.raises(ValueError):
        sc.auc(np.array([0.1, 0.2]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        sc.load_csv("/nonexistent/file.csv")
