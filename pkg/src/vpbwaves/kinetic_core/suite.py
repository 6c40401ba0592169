"""Property checks on the discrete velocity-space operators.

Each check returns a :class:`CheckResult` holding the measured defect next to
its bound, so callers (the CLI, the test-suite) decide how to report it.
Random inputs come from a seeded ``numpy.random.Generator`` (PCG64).
"""
from __future__ import annotations

import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import GridTooCoarse, ValidationError
from .collision import CollisionQuadrature, collision_pair, collision_Q, conservation_defect
from .grids import MaxwellParams, VelocityGrid, box_grid, hermite_grid
from .linearized import assemble_linearized, solve_LM_on_microspace
from .maxwell import (Distribution, _gauss, chi_basis, inner_product, maxwellian, project_P1,
                      project_Pc)


@dataclass
class CheckResult:
    name: str
    value: float
    bound: float
    passed: bool
    seconds: float
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def random_params(rng: np.random.Generator) -> MaxwellParams:
    return MaxwellParams(rng.uniform(0.7, 1.3), tuple(rng.uniform(-0.3, 0.3, 3)),
                         rng.uniform(0.8, 1.2))


def random_smooth_distribution(grid: VelocityGrid, rng: np.random.Generator) -> Distribution:
    """A random Maxwellian times a positive quadratic in the scaled velocity."""
    p = random_params(rng)
    b = rng.normal(0.0, 0.3, 3)
    B = rng.normal(0.0, 0.2, (3, 3))
    A = B @ B.T + np.outer(b, b) / 4 + 0.05 * np.eye(3)
    c = (grid.nodes - p.velocity) / p.thermal_speed
    poly = 1.0 + c @ b + np.einsum("ni,ij,nj->n", c, A, c)
    return Distribution(_gauss(grid.nodes, p) * poly / (1.0 + np.trace(A)), grid)


def _random_polynomial_perturbation(grid: VelocityGrid, p: MaxwellParams,
                                    rng: np.random.Generator) -> Distribution:
    """``M`` times a random polynomial of degree four in the scaled velocity."""
    c = (grid.nodes - p.velocity) / p.thermal_speed
    terms = [np.ones(grid.size)]
    for i in range(3):
        terms.append(c[:, i])
        for j in range(i, 3):
            terms.append(c[:, i] * c[:, j])
            for k in range(j, 3):
                terms.append(c[:, i] * c[:, j] * c[:, k])
    r2 = np.einsum("ij,ij->i", c, c)
    terms += [r2**2, r2 * c[:, 0]]
    coef = rng.normal(size=len(terms))
    return Distribution(_gauss(grid.nodes, p) * (coef @ np.vstack(terms)), grid)


def check_orthonormality(n_states: int = 20, order: int = 24, seed: int = 0,
                         bound: float = 1e-10) -> CheckResult:
    """Largest ``|<chi_i, chi_j> - delta_ij|`` on matched Gauss-Hermite grids."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        p = random_params(rng)
        G = hermite_grid(p, order)
        chis = chi_basis(p, G)
        M = maxwellian(p, G)
        gram = np.array([[inner_product(a, b, M) for b in chis] for a in chis])
        worst = max(worst, float(np.abs(gram - np.eye(5)).max()))
    return CheckResult("orthonormality", worst, bound, worst <= bound,
                       time.perf_counter() - t0, {"states": n_states, "order": order})


def check_conservation(n: int = 24, pairs: int = 5, seed: int = 1000,
                       refinement: tuple[int, ...] = (16, 24, 32), bound: float = 1e-3,
                       quad: CollisionQuadrature | None = None) -> CheckResult:
    """Conservation defects of the collision quadrature on random smooth pairs.

    ``Q(f, g)`` conserves mass only, so each pair contributes its mass defect
    and the five defects of ``Q(f, g) + Q(g, f)``.  Pair ``k`` uses the seed
    ``seed + k``.  The first pair is repeated on the ``refinement`` grids, whose
    defects must decrease.
    """
    t0 = time.perf_counter()
    quad = quad or CollisionQuadrature(conservation_bound=np.inf)
    cache: dict[int, VelocityGrid] = {}

    def defect(m: int, k: int) -> float:
        G = cache.setdefault(m, box_grid(m))
        rng = np.random.default_rng(seed + k)
        f, g = random_smooth_distribution(G, rng), random_smooth_distribution(G, rng)
        a, b = collision_pair(f, g, quad)
        return float(max(conservation_defect(a, f, g, 1)[0],
                         conservation_defect(a + b, f, g).max()))

    per_pair = [defect(n, k) for k in range(pairs)]
    ladder = [per_pair[0] if m == n else defect(m, 0) for m in refinement]
    monotone = all(b < a for a, b in zip(ladder, ladder[1:]))
    worst = max(per_pair)
    if worst > bound:
        warnings.warn(GridTooCoarse(f"conservation defect {worst:.2e} exceeds {bound:.0e} on {n}^3"),
                      stacklevel=2)
    return CheckResult("conservation", worst, bound, worst <= bound and monotone,
                       time.perf_counter() - t0,
                       {"grid": n, "per_pair": per_pair, "refinement": list(refinement),
                        "refinement_defects": ladder, "monotone": monotone})


def _reference_state(seed: int) -> MaxwellParams:
    rng = np.random.default_rng(seed)
    return MaxwellParams(rng.uniform(0.8, 1.2), tuple(rng.uniform(-0.2, 0.2, 3)),
                         rng.uniform(0.9, 1.1))


def check_dissipativity(n: int = 20, samples: int = 100, seed: int = 0,
                        star_fraction: float = 0.9, bound_QMM: float = 1e-3,
                        bound_form: float = 1e-8) -> CheckResult:
    """``Q(M, M) = 0`` and the signs of ``<g, L_M g>`` and ``<h, N_M h>``.

    The quadratic forms use the weight ``1 / M_star`` with
    ``theta_star = star_fraction * theta``.  ``value`` is the largest of
    ``max|Q(M,M)| / peak(M)`` and the two normalised forms, each measured
    against its own bound in ``details``.
    """
    if not 0.5 < star_fraction < 1.0:
        raise ValidationError("star_fraction must lie in (1/2, 1)")
    t0 = time.perf_counter()
    p = _reference_state(seed)
    G = box_grid(n, center=p.u, theta=p.theta)
    q = float(np.abs(collision_Q(maxwellian(p, G), maxwellian(p, G)).values).max() / p.peak)
    ops = assemble_linearized(p, G)
    ref = MaxwellParams(p.rho, p.u, star_fraction * p.theta)
    rng = np.random.default_rng(seed + 1)
    worst_L = worst_N = -np.inf
    for _ in range(samples):
        g = project_P1(_random_polynomial_perturbation(G, p, rng), p)
        a, b = ops.quadratic_form(g, "L", ref)
        worst_L = max(worst_L, a / b)
        h = project_Pc(_random_polynomial_perturbation(G, p, rng), p)
        a, b = ops.quadratic_form(h, "N", ref)
        worst_N = max(worst_N, a / b)
    ok = q <= bound_QMM and worst_L <= bound_form and worst_N <= bound_form
    return CheckResult("dissipativity", max(q, worst_L, worst_N), bound_QMM, ok,
                       time.perf_counter() - t0,
                       {"grid": n, "Q_MM_over_peak": q, "max_L_form": worst_L,
                        "max_N_form": worst_N, "form_bound": bound_form, "samples": samples})


def check_inverse(n: int = 20, samples: int = 20, seed: int = 0, tol: float = 1e-8,
                  bound: float = 1e-5) -> CheckResult:
    """``L_M (L_M^{-1} h) = h`` for random microscopic ``h`` (``M``-weighted norm)."""
    t0 = time.perf_counter()
    p = _reference_state(seed)
    G = box_grid(n, center=p.u, theta=p.theta)
    ops = assemble_linearized(p, G)
    act = ops.active
    w = G.weights[act] / _gauss(G.nodes[act], p)
    rng = np.random.default_rng(seed + 2)
    worst, consts = 0.0, []
    for _ in range(samples):
        h = project_P1(_random_polynomial_perturbation(G, p, rng), p)
        r = solve_LM_on_microspace(h, p, tol)
        e = (ops.apply_L(r.g) - h).values[act]
        hv = h.values[act]
        worst = max(worst, float(np.sqrt((w * e * e).sum() / (w * hv * hv).sum())))
        consts.append(r.bound_constant)
    C = float(max(consts))
    return CheckResult("inverse_roundtrip", worst, bound, worst <= bound and np.isfinite(C),
                       time.perf_counter() - t0, {"grid": n, "bound_constant": C,
                                                  "samples": samples})


def run_suite(seed: int = 0, *, hermite_order: int = 24, conservation_grid: int = 24,
              conservation_pairs: int = 5, refinement: tuple[int, ...] = (16, 24, 32),
              linear_grid: int = 20, samples: int = 100, inverse_samples: int = 20,
              progress=None) -> list[CheckResult]:
    out = []
    for fn in (lambda: check_orthonormality(20, hermite_order, seed),
               lambda: check_conservation(conservation_grid, conservation_pairs, 1000 + seed,
                                          refinement),
               lambda: check_dissipativity(linear_grid, samples, seed),
               lambda: check_inverse(linear_grid, inverse_samples, seed)):
        out.append(fn())
        if progress is not None:
            progress(out[-1])
    return out
