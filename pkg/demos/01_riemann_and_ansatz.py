"""From two far-field states to a composite wave.

Walks through the construction used by every later stage:

1. the Riemann problem between a left and a right gas state is solved for
   the two intermediate ("star") states joined by a contact;
2. each rarefaction is smoothed with an exact Burgers solution, the contact
   with the self-similar solution of a nonlinear heat equation;
3. the three pieces are superposed, and the error they leave in the viscous
   equations is measured as time grows.

Run:  python demos/01_riemann_and_ansatz.py
"""
from __future__ import annotations

import numpy as np

from vpbwaves.diagnostics import decay_fit
from vpbwaves.eos_riemann import EndStates, ThermoState, solve_star_states, wave_strengths
from vpbwaves.wave_profiles import (build_composite, composite_eval, composite_residuals,
                                    region_speeds)

left = ThermoState(v=1.0, u=0.0, theta=1.0)
right = ThermoState(v=1.0, u=0.082458, theta=1.056575)
ends = EndStates(left, right)

stars = solve_star_states(ends)
print("star states")
print(f"  v_-* = {stars.v_minus_star:.6f}   v_+* = {stars.v_plus_star:.6f}")
print(f"  u*   = {stars.u_star:.6f}   p*   = {stars.p_star:.6f}")
print(f"  theta_-* = {stars.theta_minus_star:.6f}   theta_+* = {stars.theta_plus_star:.6f}")
for k, v in wave_strengths(ends, stars).items():
    print(f"  {k:14s} {v:.4f}")
lm, lp = region_speeds(stars)
print(f"  fans separate from the contact at speeds {lm:.4f} and {lp:.4f}")

wave = build_composite(ends)
print(f"\ncontact tail constants c1 = {wave.contact.c1_est:.3f}, c2 = {wave.contact.c2_est:.3f}")

# the profile spreads: fans linearly in t, the contact like sqrt(t)
x = np.linspace(-150, 150, 7)
for t in (0.0, 20.0, 100.0):
    S = composite_eval(wave, x, t)
    print(f"t = {t:5.0f}  theta(x) at x = {x.astype(int).tolist()}:")
    print("          " + "  ".join(f"{th:.4f}" for th in S.theta))

# residual of the contact part decays like (1+t)^(-3/2)
T = np.geomspace(10, 1000, 13)
R1 = [np.abs(composite_residuals(wave, np.linspace(-10, 10, 2001) * np.sqrt(1 + t), t)
             .contact_R1).max() for t in T]
fit = decay_fit(np.column_stack([T, R1]))
print(f"\nmax|R1| decays with exponent {fit.exponent:.3f} +- {fit.halfwidth:.3f} over t in [10, 1e3]")
