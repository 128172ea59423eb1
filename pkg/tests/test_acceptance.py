"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line that is printed in the terminal
summary under "acceptance criteria".  Run with ``pytest tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from blockmac import build, database, enlarge, position, residual, solve
from blockmac.basis import BasisRule, vandermonde
from blockmac.profile import performance_profile
from blockmac.realization import (
    SolverOptions,
    build_pencil_null,
    build_shift_maps,
    linear_shift,
    random_shift,
)

from conftest import (
    maximal_minor_system,
    pair_distance,
    planted_grid_system,
    random_system,
    resultant_roots,
    structure_at_final_degree,
)

ROUTE_SEEDS = range(10)
SHIFT_SEEDS = range(20)


def timed(problem, opts=None):
    t0 = time.perf_counter()
    sol = solve(problem, opts)
    return sol, time.perf_counter() - t0


def test_noon3(criterion):
    p = database.get("noon3")
    parts, ok = [], True
    for route in ["null", "column"]:
        sol, dt = timed(p, SolverOptions(route=route))
        good = (len(sol.points) == 21 and sol.diagnostics["nullity"] == 27
                and sol.residual_abs.max() < 1e-8 and dt < 30)
        ok &= good
        parts.append(f"{route}: {len(sol.points)}/{sol.diagnostics['nullity']} "
                     f"max res {sol.residual_abs.max():.1e} in {dt:.2f}s")
    criterion(ok, "; ".join(parts))


@pytest.mark.slow
def test_cyclic5(criterion):
    sol, dt = timed(database.get("cyclic5"))
    criterion(len(sol.points) == 70 and sol.diagnostics["nullity"] == 120
              and sol.residual_abs.max() < 1e-6 and dt < 600,
              f"{len(sol.points)}/{sol.diagnostics['nullity']} max res {sol.residual_abs.max():.1e} in {dt:.1f}s")


def test_generic_conics(criterion):
    p = database.get("conics")
    oracle = resultant_roots(p)
    dists = [pair_distance(solve(p, SolverOptions(route=r)).points, oracle) for r in ["null", "column"]]
    criterion(len(oracle) == 4 and max(dists) <= 1e-8,
              f"4 roots, distance to resultant oracle null {dists[0]:.1e}, column {dists[1]:.1e}")


def test_planted_mep_l1(criterion):
    sol = solve(database.get("mep_planted"))
    dist = pair_distance(sol.points, database.PLANTED_MEP_ROOTS)
    y_ok = np.allclose(sol.eigenvectors, 1, atol=1e-12)
    criterion(len(sol.points) == 4 and dist <= 1e-8 and y_ok, f"distance {dist:.1e}, y* = 1: {y_ok}")


def test_random_quadratic_mep(criterion):
    p = database.get("mep_random_3x2")
    sol = solve(p)
    smin = max(residual(p, x)[0] for x in sol.points)
    oracle = solve(maximal_minor_system(p))
    dist = pair_distance(sol.points, oracle.points)
    criterion(len(sol.points) == 12 and smin < 1e-8 and len(oracle.points) == 12 and dist <= 1e-6,
              f"{len(sol.points)} eigen-tuples, max sigma_min {smin:.1e}, "
              f"minor-system oracle distance {dist:.1e}")


def test_route_equivalence(criterion):
    worst, counts = 0.0, []
    for seed in ROUTE_SEEDS:
        p = random_system(seed)
        a = solve(p, SolverOptions(route="null")).points
        b = solve(p, SolverOptions(route="column")).points
        counts.append(len(a))
        worst = max(worst, pair_distance(a, b))
    criterion(worst <= 1e-6, f"{len(ROUTE_SEEDS)} systems ({sum(counts)} roots), worst pairing {worst:.1e}")


def test_shift_invariance(criterion):
    worst_id, worst_g = 0.0, 0.0
    for seed in SHIFT_SEEDS:
        p, pts = planted_grid_system(seed)
        M, _, rs, order = structure_at_final_degree(p)
        V = np.column_stack([vandermonde(order, BasisRule("monomial"), x, M.d) for x in pts])
        gcoef = random_shift(2, np.random.default_rng(seed))
        s0, smap = build_shift_maps(rs, linear_shift(gcoef, 2), BasisRule("monomial"), order)
        g_true = gcoef[0] + pts @ gcoef[1:]
        worst_id = max(worst_id, np.linalg.norm(V[s0] * g_true - smap.apply(V)) / np.linalg.norm(V))
        pencil = build_pencil_null(V, s0, smap)
        ev = np.linalg.eigvals(np.linalg.solve(pencil.B, pencil.A))
        worst_g = max(worst_g, pair_distance(ev[:, None], g_true[:, None]))
    criterion(worst_id <= 1e-12 and worst_g <= 1e-10,
              f"{len(SHIFT_SEEDS)} instances, identity {worst_id:.1e}*|V|, pencil g error {worst_g:.1e}")


def test_basis_order_invariance(criterion):
    configs = [("monomial", "grevlex"), ("monomial", "grinvlex"), ("chebyshev", "grevlex")]
    worst = 0.0
    for seed in ROUTE_SEEDS:
        p = random_system(seed)
        sols = [solve(p, SolverOptions(basis_id=b, order_id=o)).points for b, o in configs]
        worst = max(worst, max(pair_distance(sols[0], s) for s in sols[1:]))
    criterion(worst <= 1e-8, f"{len(ROUTE_SEEDS)} systems x 3 configurations, worst pairing {worst:.1e}")


def test_position_anchors(criterion):
    a, b = position("grinvlex", (2, 1)), position("grevlex", (2, 1))
    criterion(a == 8 and b == 9, f"grinvlex (2,1) -> {a}, grevlex (2,1) -> {b}")


def test_enlargement_identity(criterion):
    bad, checked = [], 0
    for name in database.names():
        p = database.get(name)
        M = build(p, p.degree)
        for d in range(p.degree + 1, 9):
            M = enlarge(M, d)
            checked += 1
            if not M == build(p, d):
                bad.append((name, d))
    criterion(not bad, f"{len(database.names())} problems, {checked} degrees compared, mismatches {bad}")


def test_clustering(criterion):
    p = database.get("doubleroot")
    sol = solve(p)
    big = max(sol.clusters, key=len)
    center = sol.points[big[0]]
    raw = sol.diagnostics["raw_points"][list(big)]
    r_center = residual(p, center)[0]
    r_raw = min(residual(p, x)[0] for x in raw)
    flat = solve(p, SolverOptions(cluster=False))
    near = [x for x in flat.points if np.linalg.norm(x - [3, 4]) < 1e-4]
    criterion(len(big) == 2 and r_center < r_raw and len(near) == 2,
              f"cluster size {len(big)}, center residual {r_center:.1e} < raw {r_raw:.1e}, "
              f"unclustered points near the root: {len(near)}")


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 4)),
              elements=st.one_of(st.floats(0.01, 100.0), st.just(np.inf))))
def _profile_property(times):
    import warnings

    from blockmac.errors import AllFailRow

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AllFailRow)
        prof = performance_profile(times)
    assert np.all((prof.rho >= 0) & (prof.rho <= 1))
    assert np.all(np.diff(prof.rho, axis=0) >= 0)


def test_performance_profile(criterion):
    prof = performance_profile([[1, 2], [2, 1]], ["A", "B"])
    exact = prof.rho_at(1)[0] == 0.5 and prof.rho_at(2)[0] == 1.0 and prof.rho_at(1)[1] == 0.5
    _profile_property()
    criterion(exact, f"rho_A(1) = {prof.rho_at(1)[0]}, rho_A(2) = {prof.rho_at(2)[0]}; "
                     "monotone and in [0, 1] on 100 random tables")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
