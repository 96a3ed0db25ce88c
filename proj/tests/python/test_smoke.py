import math
import os

import numpy as np
import pytest

import _coda as coda

FIXTURE = os.path.join(os.path.dirname(__file__), "..", "fixtures", "panel.csv")


def make_panel(n_years=8, trend=0.05):
    years = list(range(2000, 2000 + n_years))
    ages = ["0-39", "40+"]
    causes = ["circulatory", "neoplasms"]
    base = np.array([4.0, 3.5, 6.5, 6.0])
    slope = np.array([-0.03, 0.02, trend, -0.01])
    counts = np.empty((n_years, 4))
    for t in range(n_years):
        d = np.exp(base + slope * t)
        counts[t] = d / d.sum() * 10000.0
    return coda.DeathCountPanel(years, ages, causes, counts, "all")


def test_version():
    assert coda.__version__


def test_simplex_algebra():
    v = np.array([2.0, 3.0, 5.0])
    c = coda.closure(v)
    assert c == pytest.approx([0.2, 0.3, 0.5])
    x = np.array([0.2, 0.3, 0.5])
    y = np.array([0.5, 0.25, 0.25])
    assert coda.inverse_perturb(coda.perturb(x, y), y) == pytest.approx(x, abs=1e-12)


def test_helmert_orthonormal():
    h = coda.helmert(6)
    assert h.shape == (5, 6)
    assert np.allclose(h @ h.T, np.eye(5), atol=1e-12)
    assert np.allclose(h.sum(axis=1), 0.0, atol=1e-12)


def test_transform_roundtrips():
    row = np.array([0.1, 0.25, 0.3, 0.35])
    assert coda.clr_inverse(coda.clr(row)) == pytest.approx(row, abs=1e-12)
    assert coda.ilr_inverse(coda.ilr(row)) == pytest.approx(row, abs=1e-12)
    for alpha in (0.3, 0.7, 1.0):
        back, clamped = coda.alpha_inverse(coda.alpha_forward(row, alpha), alpha)
        assert back == pytest.approx(row, abs=1e-10)
        assert clamped == []
    # a zero part survives the alpha roundtrip exactly
    zrow = np.array([0.0, 0.4, 0.6])
    back, clamped = coda.alpha_inverse(coda.alpha_forward(zrow, 0.5), 0.5)
    assert back[0] == 0.0
    assert back == pytest.approx(zrow, abs=1e-10)


def test_point_forecast_rows_are_compositions():
    panel = make_panel()
    for transform in ("clr", "ilr", "alpha:0.5", "rda"):
        fs = coda.run_point_forecast(panel, transform=transform, horizon=3)
        assert fs.years == [2008, 2009, 2010]
        assert fs.densities.shape == (3, 4)
        assert np.allclose(fs.densities.sum(axis=1), 1.0, atol=1e-10)
        assert fs.densities.min() >= 0.0
    assert fs.part_name(0) == "0-39|circulatory"


def test_clr_ilr_agree():
    panel = make_panel()
    fc = coda.run_point_forecast(panel, transform="clr", horizon=2)
    fi = coda.run_point_forecast(panel, transform="ilr", horizon=2)
    assert np.abs(fc.densities - fi.densities).max() < 1e-9


def test_fold_plan():
    plan = coda.make_fold_plan(list(range(2001, 2017)), 4, 4)
    assert plan.test_years == list(range(2013, 2017))
    train, validation = plan.folds[0]
    assert train == list(range(2001, 2009))
    assert validation == list(range(2009, 2013))


def test_score_scale():
    obs = np.array([[0.5, 0.5]])
    pred = np.array([[0.4, 0.6]])
    rmse, mae = coda.score(obs, pred)
    assert rmse == pytest.approx(10.0)
    assert mae == pytest.approx(10.0)


def test_tune_alpha():
    panel = make_panel(n_years=12)
    chosen, table = coda.tune_alpha(panel, [0.3, 0.6, 0.9], n_test=2, n_folds=2)
    assert chosen in (0.3, 0.6, 0.9)
    assert set(table) == {0.3, 0.6, 0.9}
    for rmse, mae in table.values():
        assert rmse >= 0.0 and mae >= 0.0


def test_bootstrap_intervals_deterministic():
    panel = make_panel(n_years=10)
    a = coda.bootstrap_intervals(panel, horizon=2, n_boot=100, seed=3)
    b = coda.bootstrap_intervals(panel, horizon=2, n_boot=100, seed=3)
    assert np.array_equal(a.lower, b.lower)
    assert np.array_equal(a.upper, b.upper)
    assert (a.lower <= a.point + 1e-12).all()
    assert (a.upper >= a.point - 1e-12).all()


def test_ingest_fixture():
    panel = coda.ingest(FIXTURE, "m")
    assert panel.years == list(range(2000, 2012))
    assert panel.age_bands == ["0-39", "40+"]
    assert len(panel.causes) == 3
    assert panel.counts.shape == (12, 6)
    with pytest.raises(coda.CodaError):
        coda.ingest(FIXTURE, "nonexistent-sex")


def test_errors_surface_as_python_exceptions():
    with pytest.raises(coda.CodaError):
        coda.clr(np.array([0.5, 0.0, 0.5]))  # zero needs a strategy or alpha
    with pytest.raises(coda.CodaError):
        coda.alpha_forward(np.array([0.5, 0.5]), 1.5)  # alpha out of range
