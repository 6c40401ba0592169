from __future__ import annotations

import warnings

import numpy as np
import pytest

from vpbwaves.errors import NonphysicalMoments, NotMicroscopic, ValidationError
from vpbwaves.kinetic_core import (R_GAS, CollisionQuadrature, Distribution, GlobalMaxwellianStar,
                                   MaxwellParams, assemble_linearized, box_grid, chi_basis,
                                   collision_Q, conservation_defect, fit_maxwellian, hermite_grid,
                                   inner_product, maxwellian, micro_macro_split, moments,
                                   nu_freq, project_P0, project_P1, project_Pc,
                                   random_smooth_distribution, solve_LM_on_microspace)

P = MaxwellParams(1.1, (0.2, -0.1, 0.05), 0.9)


@pytest.fixture(scope="module")
def hgrid():
    return hermite_grid(P, 16)


@pytest.fixture(scope="module")
def box16():
    return box_grid(16, center=P.u)


def test_params_validation():
    with pytest.raises(ValidationError):
        MaxwellParams(-1.0)
    with pytest.raises(ValidationError):
        MaxwellParams(1.0, theta=0.0)
    assert MaxwellParams(1.0, 0.5).u == (0.5, 0.5, 0.5)


def test_maxwellian_moments_exact_on_hermite(hgrid):
    m = moments(maxwellian(P, hgrid))
    assert m.rho == pytest.approx(P.rho, rel=1e-13)
    np.testing.assert_allclose(m.u, P.u, atol=1e-13)
    assert m.theta == pytest.approx(P.theta, rel=1e-13)
    # internal energy density equals theta with R = 2/3
    assert R_GAS == pytest.approx(2 / 3)


def test_chi_orthonormal(hgrid):
    chis = chi_basis(P, hgrid)
    M = maxwellian(P, hgrid)
    G = np.array([[inner_product(a, b, M) for b in chis] for a in chis])
    assert np.abs(G - np.eye(5)).max() < 1e-12


def test_projections(hgrid):
    rng = np.random.default_rng(3)
    M = maxwellian(P, hgrid)
    g = Distribution(M.values * rng.normal(size=hgrid.size) * 0.1, hgrid)
    g0, g1 = project_P0(g, P), project_P1(g, P)
    np.testing.assert_allclose((g0 + g1).values, g.values, atol=1e-15)
    np.testing.assert_allclose(project_P0(g0, P).values, g0.values, atol=1e-12)
    assert np.abs(moments(g1).momentum).max() < 1e-12
    assert abs(moments(g1).rho) < 1e-12 and abs(moments(g1).energy) < 1e-12
    assert abs(project_Pc(g, P).integral()) < 1e-13


def test_fit_maxwellian_and_split(box16):
    rng = np.random.default_rng(0)
    F = random_smooth_distribution(box16, rng)
    p, G = micro_macro_split(F)
    mG = moments(G)
    assert abs(mG.rho) < 1e-13 and abs(mG.energy) < 1e-13
    assert np.abs(mG.momentum).max() < 1e-13
    assert fit_maxwellian(maxwellian(P, box16)).theta == pytest.approx(P.theta, rel=1e-10)


def test_nonphysical_moments(hgrid):
    with pytest.raises(NonphysicalMoments):
        moments(-1.0 * maxwellian(P, hgrid)).params()


def test_nu_freq_at_mean_velocity():
    # at xi = u: pi rho E|c| with the Maxwell mean speed sqrt(8 R theta / pi)
    expect = np.pi * P.rho * np.sqrt(8 * R_GAS * P.theta / np.pi)
    assert nu_freq(np.array(P.u), P) == pytest.approx(expect, rel=1e-8)
    far = nu_freq(np.array(P.u) + [20.0, 0, 0], P)
    assert far == pytest.approx(np.pi * P.rho * 20.0, rel=1e-2)   # ~ pi rho |xi|


def test_collision_of_maxwellian_vanishes(box16):
    M = maxwellian(P, box16)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        Q = collision_Q(M, M)
    # log-quadratic interpolation is exact for a Maxwellian
    assert np.abs(Q.values).max() / P.peak < 1e-6
    assert conservation_defect(Q, M, M, invariants=1)[0] < 1e-3


def test_collision_symmetric_conserves_under_refinement():
    # the defect is quadrature error: it must shrink as the box is refined
    defects = []
    for n in (12, 16):
        G = box_grid(n, 8.0, center=P.u)
        rng = np.random.default_rng(1000)
        f = random_smooth_distribution(G, rng)
        g = random_smooth_distribution(G, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            Q = collision_Q(f, g, symmetric=True)
        defects.append(conservation_defect(Q, f, g).max())
    assert defects[1] < defects[0] / 3
    assert defects[1] < 0.05


def test_collision_rejects_hermite(hgrid):
    M = maxwellian(P, hgrid)
    with pytest.raises(ValidationError):
        collision_Q(M, M)
    with pytest.raises(ValidationError):
        CollisionQuadrature(interpolation="cubic")


def test_linearized_operator_properties():
    p = MaxwellParams(1.0, (0.0, 0.0, 0.0), 1.0)
    G = box_grid(16)
    ops = assemble_linearized(p, G)
    M = maxwellian(p, G)
    # null space: collision invariants times M
    for chi in chi_basis(p, G):
        assert np.abs(ops.apply_L(chi).values).max() < 1e-10 * p.peak
    rng = np.random.default_rng(2)
    g = project_P1(Distribution(M.values * rng.normal(size=G.size), G), p)
    q, n = ops.quadratic_form(g)
    assert q < 0 and n > 0
    h = ops.apply_L(g)
    res = solve_LM_on_microspace(h, p)
    back = ops.apply_L(res.g)
    assert np.linalg.norm(back.values - h.values) <= 1e-6 * np.linalg.norm(h.values)
    assert res.bound_constant > 0
    with pytest.raises(NotMicroscopic):
        solve_LM_on_microspace(M, p)


def test_global_star_choice():
    s = GlobalMaxwellianStar.choose([1.0, 1.2], [0.0, 0.1], [1.0, 1.3])
    assert s.admissible_for([1.0, 1.3])
    with pytest.raises(ValidationError):
        GlobalMaxwellianStar.choose([1.0], [0.0], [1.0, 3.0])


def test_distribution_io(tmp_path, box16):
    F = maxwellian(P, box16)
    F.to_binary(tmp_path / "f.bin")
    back = Distribution.from_binary(tmp_path / "f.bin", box16)
    assert np.array_equal(back.values, F.values)
    assert (tmp_path / "f.bin").stat().st_size == 8 * box16.size
    text = F.to_csv(tmp_path / "f.csv")
    assert (tmp_path / "f.csv").read_bytes() == text.encode()
    assert text.startswith("index,xi1,xi2,xi3,value\n") and "\r" not in text
    assert len(text.splitlines()) == box16.size + 1
    with pytest.raises(ValidationError):
        Distribution(np.zeros(3), box16)


def test_grid_spec(box16):
    s = box_grid(12, 5.0).spec()
    assert s == {"kind": "box", "n": 12, "center": [0.0, 0.0, 0.0], "half_width": 5.0}
    h = hermite_grid(order=10, theta=1.7).spec()
    assert h["kind"] == "hermite" and h["theta"] == pytest.approx(1.7, rel=1e-12)
    with pytest.raises(ValidationError):
        box_grid(3)
