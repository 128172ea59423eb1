import itertools

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from blockmac import make_mep, make_system


def dense_support(m, d):
    return [e for e in itertools.product(range(d + 1), repeat=m) if sum(e) <= d]


def random_system(seed, m=2, max_degree=3):
    """Dense real system with ``m`` equations of random degrees in ``1..max_degree``."""
    rng = np.random.default_rng(seed)
    degrees = rng.integers(1, max_degree + 1, size=m)
    eqs = [[(e, rng.standard_normal()) for e in dense_support(m, int(dj))] for dj in degrees]
    return make_system(eqs, m)


def planted_system(seed, m=2, degree=2):
    """Random system whose constant terms are adjusted so that ``x*`` is a root."""
    rng = np.random.default_rng(seed)
    root = rng.uniform(-1, 1, size=m)
    eqs = []
    for _ in range(m):
        terms = {e: rng.standard_normal() for e in dense_support(m, degree)}
        value = sum(c * np.prod(root ** np.array(e)) for e, c in terms.items())
        terms[(0,) * m] -= value
        eqs.append(terms)
    return make_system(eqs, m), root


def pair_distance(a, b):
    """Largest distance after optimal one-to-one pairing of two point sets."""
    a, b = np.atleast_2d(a), np.atleast_2d(b)
    if len(a) != len(b):
        return np.inf
    cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if len(r) else 0.0


@pytest.fixture
def conics():
    return make_system(
        [[((2, 0), 1.0), ((0, 2), 1.0), ((0, 0), -5.0)],
         [((1, 1), 1.0), ((0, 0), -2.0)]], 2)


@pytest.fixture
def small_mep():
    rng = np.random.default_rng(3)
    return make_mep([(e, rng.standard_normal((3, 2))) for e in dense_support(2, 2)], 2)


def resultant_roots(problem, digits=50):
    """Common roots of a bivariate two-equation system via a high-precision resultant.

    The eliminant in ``x1`` is built exactly from rational coefficients, its
    roots are found with mpmath, and ``x2`` is the root of the first equation
    that best satisfies the second one.
    """
    import mpmath
    import sympy

    x1, x2 = sympy.symbols("x1 x2")

    def to_expr(j):
        return sum(sympy.Rational(float(c[0, 0].real)) * x1 ** int(e[0]) * x2 ** int(e[1])
                   for e, c in problem.terms(j))

    f, g = to_expr(0), to_expr(1)
    res = sympy.Poly(sympy.resultant(f, g, x2), x1)
    with mpmath.workdps(digits):
        coeffs = [mpmath.mpf(sympy.Rational(c).p) / sympy.Rational(c).q for c in res.all_coeffs()]
        r1 = mpmath.polyroots(coeffs, maxsteps=200, extraprec=4 * digits)
        fp = sympy.Poly(f, x2)
        gl = sympy.lambdify((x1, x2), g, "mpmath")
        out = []
        for a in r1:
            cs = [sympy.lambdify(x1, c, "mpmath")(a) for c in fp.all_coeffs()]
            cands = mpmath.polyroots(cs, maxsteps=200, extraprec=4 * digits) if len(cs) > 2 else [-cs[1] / cs[0]]
            b = min(cands, key=lambda z: abs(gl(a, z)))
            out.append([complex(a), complex(b)])
    return np.array(out)


def maximal_minor_system(problem):
    """Polynomial system of all l x l minors of a k x l MEP in the monomial basis."""
    import itertools as it

    import sympy

    from blockmac import make_system

    xs = sympy.symbols(f"x1:{problem.m + 1}")
    k, l = problem.k, problem.l
    P = sympy.zeros(k, l)
    for e, c in problem.terms(0):
        mono = sympy.prod([x ** int(v) for x, v in zip(xs, e)])
        for i in range(k):
            for j in range(l):
                z = complex(c[i, j])
                P[i, j] += (sympy.Rational(z.real) + sympy.I * sympy.Rational(z.imag)) * mono
    eqs = []
    for rows in it.combinations(range(k), l):
        poly = sympy.Poly(sympy.expand(P.extract(list(rows), list(range(l))).det()), *xs)
        eqs.append([(e, complex(v)) for e, v in poly.as_dict().items()])
    return make_system(eqs, problem.m)


def planted_grid_system(seed, n_points=4):
    """Two quadrics through ``n_points`` random points (4 for a full Bezout count).

    With four generic points the two quadrics meet exactly there, so every
    root is known in advance.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, size=(n_points, 2))
    sup = dense_support(2, 2)
    V = np.array([[x ** e[0] * y ** e[1] for e in sup] for x, y in pts])
    _, _, vh = np.linalg.svd(V)
    basis = vh[n_points:]
    mix = rng.standard_normal((2, len(basis)))
    coefs = mix @ basis
    return make_system([list(zip(sup, row)) for row in coefs], 2), pts


def structure_at_final_degree(problem, order_id="grevlex"):
    from blockmac import build, solve
    from blockmac.basis import OrderRule
    from blockmac.realization import SolverOptions
    from blockmac.subspace import nullspace, rank_structure

    d = solve(problem, SolverOptions(order_id=order_id)).diagnostics["final_degree"]
    order = OrderRule(order_id, problem.m)
    M = build(problem, d, order)
    S = nullspace(M)
    return M, S, rank_structure(S), order


# --- acceptance reporting ---

ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call ``check(ok, detail)`` once per criterion."""
    state = {}

    def check(ok, detail=""):
        state["ok"], state["detail"] = bool(ok), detail
        assert ok, detail

    yield check
    ok = state.get("ok", False) and not getattr(request.node, "_failed_call", False)
    name = request.node.name.removeprefix("test_")
    ACCEPTANCE.append((name, ok, state.get("detail", "did not complete")))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and rep.failed:
        item._failed_call = True


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
