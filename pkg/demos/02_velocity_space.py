"""The kinetic layer: Maxwellians, projections and the hard-sphere collision operator.

Small grids throughout so this runs in about a minute on one core; the full
checks (24^3 and 32^3 boxes) are what ``vpbwaves kinetic-check`` runs.

Run:  python demos/02_velocity_space.py
"""
from __future__ import annotations

import warnings

import numpy as np

from vpbwaves.kinetic_core import (Distribution, MaxwellParams, assemble_linearized, box_grid,
                                   chi_basis, collision_Q, conservation_defect, hermite_grid, inner_product,
                                   maxwellian, micro_macro_split, moments, project_P1,
                                   random_smooth_distribution, solve_LM_on_microspace)

p = MaxwellParams(rho=1.1, u=(0.2, 0.0, 0.0), theta=0.9)

# 1. on a Gauss-Hermite grid matched to M, moments and the chi-basis are exact
G = hermite_grid(p, order=16)
M = maxwellian(p, G)
m = moments(M)
print(f"moments of M on a 16^3 Hermite grid: rho={m.rho:.15f} u1={m.u[0]:.15f} theta={m.theta:.15f}")
chis = chi_basis(p, G)
gram = np.array([[inner_product(a, b, M) for b in chis] for a in chis])
print(f"chi-basis Gram matrix: max |G - I| = {np.abs(gram - np.eye(5)).max():.1e}")

# 2. micro/macro split of a non-Maxwellian density on a uniform box
B = box_grid(16, center=p.u)
F = random_smooth_distribution(B, np.random.default_rng(0))
fitted, G_micro = micro_macro_split(F)
print(f"\nmicro-macro split: fitted theta = {fitted.theta:.4f}; "
      f"moments of the microscopic part: {moments(G_micro).rho:.1e}, {moments(G_micro).energy:.1e}")

# 3. collisions: Q(M, M) vanishes, Q(f, g) + Q(g, f) conserves the invariants
with warnings.catch_warnings():
    warnings.simplefilter("ignore")       # coarse-grid warnings are the point here
    MB = maxwellian(p, B)
    print(f"max|Q(M,M)| / peak(M) on 16^3 = {np.abs(collision_Q(MB, MB).values).max() / p.peak:.1e}")
    for n in (12, 16):
        Bn = box_grid(n, 8.0, center=p.u)
        rng = np.random.default_rng(1000)
        f, g = random_smooth_distribution(Bn, rng), random_smooth_distribution(Bn, rng)
        Q = collision_Q(f, g, symmetric=True)
        print(f"  {n}^3 box: conservation defect of Q(f,g)+Q(g,f) = "
              f"{conservation_defect(Q, f, g).max():.2e}")

# 4. linearised operator: dissipative on microscopic data, invertible there
q = MaxwellParams(1.0, (0.0, 0.0, 0.0), 1.0)
B20 = box_grid(20)
ops = assemble_linearized(q, B20)
rng = np.random.default_rng(1)
Mq = maxwellian(q, B20)
g = project_P1(Distribution(Mq.values * rng.normal(size=B20.size), B20), q)
form, norm = ops.quadratic_form(g)
print(f"\n<g, L g> / |g|^2 = {form / norm:.3f}  (negative: H-theorem)")
h = ops.apply_L(g)
res = solve_LM_on_microspace(h, q)
err = np.linalg.norm(ops.apply_L(res.g).values - h.values) / np.linalg.norm(h.values)
print(f"L^-1 roundtrip: relative error {err:.1e} after {res.iterations} CG iterations, "
      f"C = {res.bound_constant:.2f}")
