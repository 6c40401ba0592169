from __future__ import annotations

import numpy as np
import pytest

from vpbwaves.diagnostics import (DiagnosticsRecord, decay_fit, gaussian_tail_check,
                                  records_to_csv, stability_criteria, trapezoid)
from vpbwaves.errors import NonPositiveSeries, ValidationError


def _rec(t, **kw):
    base = dict(t=t, l2_pert=1.0, h1_pert=1.0, linf_pert=1.0, l2_charge=1.0, linf_charge=1.0,
                weighted_l2=1.0, energy_fluid=1.0, min_v=1.0, min_theta=1.0, boundary_pert=0.0)
    base.update(kw)
    return DiagnosticsRecord(**base)


def test_decay_fit_exact_power_law():
    t = np.linspace(0, 100, 50)
    fit = decay_fit(np.column_stack([t, 3.0 * (1 + t) ** -0.75]))
    assert fit.exponent == pytest.approx(-0.75, abs=1e-12)
    assert fit.halfwidth < 1e-10
    assert fit.n == 50


def test_decay_fit_window_and_noise():
    rng = np.random.default_rng(0)
    t = np.linspace(0, 1000, 400)
    y = (1 + t) ** -1.5 * np.exp(rng.normal(0, 0.05, t.size))
    fit = decay_fit(np.column_stack([t, y]), window=(10, 1000))
    assert fit.exponent == pytest.approx(-1.5, abs=3 * fit.halfwidth + 1e-3)
    assert fit.n == np.count_nonzero(t >= 10)


def test_decay_fit_errors():
    t = np.arange(20.0)
    with pytest.raises(NonPositiveSeries):
        decay_fit(np.column_stack([t, np.where(t > 5, 1.0, 0.0)]))
    with pytest.raises(ValidationError):
        decay_fit(np.column_stack([t[:5], t[:5] + 1]))
    with pytest.raises(ValidationError):
        decay_fit(np.ones((20, 3)))


def test_trapezoid_matches_numpy():
    x = np.linspace(0, 2, 201)
    f = np.sin(x)
    assert trapezoid(f, x[1] - x[0]) == pytest.approx(1 - np.cos(2.0), abs=1e-4)
    F = np.vstack([f, 2 * f])
    assert trapezoid(F, x[1] - x[0]) == pytest.approx(3 * trapezoid(f, x[1] - x[0]))


def test_record_rejects_nan():
    with pytest.raises(ValidationError):
        _rec(0.0, linf_pert=np.nan)


def test_csv_format():
    text = records_to_csv([_rec(0.0), _rec(0.5, linf_pert=0.1)])
    lines = text.split("\n")
    assert lines[0].startswith("t,l2_pert,h1_pert,linf_pert")
    assert "\r" not in text and text.endswith("\n")
    assert lines[2].split(",")[3] == "0.1"


def test_gaussian_tail_check_exact_envelope():
    x = np.linspace(-20, 20, 801)
    t = 3.0
    s = 1 + t
    # Theta = theta_- + delta * (1 + erf(x / (2 sqrt(s)))) / 2
    from scipy.special import erf
    d, tm = 0.2, 1.0
    th = tm + d * 0.5 * (1 + erf(x / (2 * np.sqrt(s))))
    thx = d * np.exp(-x**2 / (4 * s)) / np.sqrt(4 * np.pi * s)
    thxx = -x / (2 * s) * thx
    res = gaussian_tail_check(x, t, th, thx, thxx, tm, tm + d, c1=2.0, c2=0.2)
    assert res.passed
    assert res.tightest_c2 >= 0.2
    bad = gaussian_tail_check(x, t, th, thx, thxx, tm, tm + d, c1=2.0, c2=0.5)
    assert not bad.passed


def test_stability_criteria_synthetic():
    recs = [_rec(float(t), linf_pert=0.01 * (1 + t) ** -0.5, linf_charge=np.exp(-t),
                 energy_fluid=0.1) for t in range(0, 200, 5)]
    out = stability_criteria(recs)
    assert all(v["passed"] for v in out.values())
    recs[-1] = _rec(195.0, linf_pert=0.01, linf_charge=1.0, energy_fluid=1.0, min_v=-1.0)
    out = stability_criteria(recs)
    assert not any(v["passed"] for v in out.values())
