"""Shift-invariance realization and the full solver pipeline.

The solver enlarges the subspace degree by degree, waits for the nullity to
stabilize, locates the gap, and then turns the shift relation into ``m + 1``
generalized eigenvalue problems that share one Schur triangularization.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import fcluster, linkage

from .basis import BasisRule, OrderRule
from .errors import (
    DegreeCapExceeded,
    NoGap,
    PositiveDimensionalAffine,
    ShiftEscapesSubspace,
    SingularPencil,
)
from .macaulay import build, enlarge, new_rows
from .problem import SolutionSet, convert_basis, residual
from .subspace import (
    BLOCK,
    COLUMN,
    DEFAULT_TOL,
    NULL,
    column_compress,
    column_subspace,
    nullspace,
    nullspace_recursive,
    rank_structure,
    stabilized,
)

log = logging.getLogger(__name__)


@dataclass
class SolverOptions:
    route: str = NULL
    enlarge: str = "recursive"
    rank_mode: str = BLOCK
    posdim: bool = False
    cluster: bool = True
    tol: float = DEFAULT_TOL
    ctol: float = 1e-6
    maxdeg: int = 25
    seed: int = 1
    basis_id: str | None = None
    order_id: str = "grevlex"

    def __post_init__(self):
        if self.route not in (NULL, COLUMN):
            raise ValueError(f"route must be 'null' or 'column', not {self.route!r}")
        if self.enlarge not in ("iterative", "recursive"):
            raise ValueError(f"enlarge must be 'iterative' or 'recursive', not {self.enlarge!r}")
        if self.rank_mode not in (BLOCK, "row"):
            raise ValueError(f"rank mode must be 'block' or 'row', not {self.rank_mode!r}")
        if self.tol <= 0 or self.ctol <= 0:
            raise ValueError("tol and ctol must be positive")
        if self.maxdeg < 1:
            raise ValueError("maxdeg must be at least 1")


@dataclass(frozen=True)
class ShiftMap:
    """Sparse row combination ``(S_g W)[t] = sum coef * W[src]``, never materialized."""

    target: np.ndarray
    source: np.ndarray
    coef: np.ndarray
    size: int

    def apply(self, W):
        out = np.zeros((self.size,) + W.shape[1:], dtype=np.result_type(W, self.coef))
        np.add.at(out, self.target, self.coef[:, None] * W[self.source])
        return out

    def dense(self, ncols):
        out = np.zeros((self.size, ncols), dtype=self.coef.dtype)
        np.add.at(out, (self.target, self.source), self.coef)
        return out


@dataclass(frozen=True, eq=False)
class ShiftPencil:
    A: np.ndarray
    B: np.ndarray
    shift_poly: tuple = ()


@dataclass(frozen=True)
class ClusterSet:
    assignments: tuple
    centers: np.ndarray


def linear_shift(coefs, m):
    """Basis terms of ``c_0 + c_1 x_1 + ... + c_m x_m`` (``x_i`` is ``phi`` of a unit exponent)."""
    terms = []
    for i, c in enumerate(coefs):
        if c == 0:
            continue
        e = [0] * m
        if i > 0:
            e[i - 1] = 1
        terms.append((c, tuple(e)))
    return tuple(terms)


def random_shift(m, rng):
    """Coefficients of a linear polynomial drawn uniformly from the complex unit disc."""
    r = np.sqrt(rng.uniform(size=m + 1))
    phase = rng.uniform(0, 2 * np.pi, size=m + 1)
    return r * np.exp(1j * phase)


def build_shift_maps(rs, g, basis, order, l=1):
    """Base rows ``S0`` and the row combination that multiplies them by ``g``.

    ``g`` is a sequence of ``(coefficient, exponent)`` basis terms.
    """
    s0 = np.array(rs.affine_rows, dtype=int)
    target, source, coef = [], [], []
    for t, row in enumerate(s0):
        e = order.exponent_at(row // l + 1)
        comp = row % l
        acc = {}
        for cg, eg in g:
            for w, e2 in basis.shift(e, eg):
                src = (order.position(e2) - 1) * l + comp
                if src >= rs.nrows:
                    raise ShiftEscapesSubspace(
                        f"row {row} shifted to row {src}, past the affine part ({rs.nrows} rows)"
                    )
                acc[src] = acc.get(src, 0) + cg * w
        for src in sorted(acc):
            target.append(t)
            source.append(src)
            coef.append(acc[src])
    smap = ShiftMap(np.array(target, dtype=int), np.array(source, dtype=int),
                    np.array(coef, dtype=complex), len(s0))
    return s0, smap


def build_pencil_null(W11, s0, smap):
    if W11.shape[1] != len(s0):
        raise ValueError(f"W11 has {W11.shape[1]} columns but {len(s0)} base rows")
    return ShiftPencil(A=smap.apply(W11), B=W11[s0])


def _column_projection(M, rs, tol):
    """Rows of ``M`` restricted to the affine columns, with the rest projected out."""
    a = M.toarray()
    top, rest = a[:, : rs.nrows], a[:, rs.nrows:]
    if rest.shape[1]:
        u, sv, _ = scipy.linalg.svd(rest, full_matrices=False)
        r = int(np.count_nonzero(sv > tol * max(sv[0], np.linalg.norm(a, 2)))) if sv.size else 0
        u = u[:, :r]
        top = top - u @ (u.conj().T @ top)
    # any row-equivalent matrix has the same null space; keep it square
    _, K = scipy.linalg.qr(top, mode="economic")
    return K


def build_pencil_column(M, rs, smap, tol=DEFAULT_TOL, K=None):
    """Pencil ``(-R34, R33)`` from a backward QR of the reordered Macaulay matrix.

    The high-degree columns are projected out first.  The ``g``-shifted base
    rows become extra unknowns ``u = S_g z`` appended through the rows
    ``[-S_g  I]``, so the reordered matrix is ``[base | shifted | other]``.  A
    QR factorization of its column-reversed copy leaves, after the ``other``
    block, the relation ``R33 u + R34 z_base = 0``.
    """
    if K is None:
        K = _column_projection(M, rs, tol)
    n = rs.m_a
    base = np.array(rs.affine_rows, dtype=int)
    other = np.setdiff1d(np.arange(rs.nrows), base)
    nk = K.shape[0]
    dtype = np.result_type(K, smap.coef)
    aug = np.zeros((nk + n, rs.nrows + n), dtype=dtype)
    aug[:nk, : rs.nrows] = K
    aug[nk:, : rs.nrows] = -smap.dense(rs.nrows)
    aug[nk:, rs.nrows:] = np.eye(n)
    shifted = rs.nrows + np.arange(n)
    order = np.concatenate([base, shifted, other])
    _, R = scipy.linalg.qr(aug[:, order[::-1]], mode="economic")
    R = R[:, ::-1]
    c = len(other)
    rows = slice(c, c + n)
    R33 = R[rows, n: 2 * n]
    R34 = R[rows, :n]
    return ShiftPencil(A=-R34, B=R33)


def solve_multishift(pencils, reject_tol=1e-12):
    """Eigenvalue tuples from ``m + 1`` pencils sharing one Schur basis.

    The first pencil (random shift) is reduced by QZ; every other pencil is
    multiplied by the same unitary pair and its diagonal ratios read off.
    Pencils with different ``B`` matrices are first brought to standard form
    ``B^{-1} A`` so that they act on common coordinates.
    """
    B = pencils[0].B
    same_b = all(p.B is B or (p.B.shape == B.shape and np.array_equal(p.B, B)) for p in pencils)
    if same_b:
        As = [p.A for p in pencils]
    else:
        As = [scipy.linalg.solve(p.B, p.A) for p in pencils]
        B = np.eye(B.shape[0])
    n = B.shape[0]
    AA, BB, Q, Zr = scipy.linalg.qz(As[0].astype(complex), B.astype(complex), output="complex")
    b_diag = np.diag(BB)
    a_diag = np.diag(AA)
    thr = reject_tol * max(np.linalg.norm(B, 2), 1e-300)
    thr_a = reject_tol * max(np.linalg.norm(As[0], 2), 1e-300)
    small_b = np.abs(b_diag) < thr
    small_a = np.abs(a_diag) < thr_a
    singular = small_a & small_b
    infinite = small_b & ~small_a
    keep = ~(singular | infinite)
    if n and not keep.any():
        raise SingularPencil("every eigenvalue of the shift pencil was rejected")
    g_values = a_diag[keep] / b_diag[keep]
    comps, offdiag = [], 0.0
    for A in As[1:]:
        T = Q.conj().T @ A @ Zr
        comps.append(np.diag(T)[keep] / b_diag[keep])
        offdiag = max(offdiag, float(np.linalg.norm(np.tril(T, -1))))
    tuples = np.array(comps).T if comps else np.zeros((int(keep.sum()), 0))
    info = {"rejected_infinite": int(infinite.sum()), "rejected_singular": int(singular.sum()),
            "offdiag_norm": offdiag}
    return tuples, g_values, info


def cluster(tuples, g_values, ctol=1e-6):
    """Single-linkage grouping of the shift values; centers are component means."""
    tuples = np.asarray(tuples)
    n = len(g_values)
    if n == 0:
        return ClusterSet((), tuples.copy())
    if n == 1:
        return ClusterSet(((0,),), tuples.copy())
    pts = np.column_stack([np.real(g_values), np.imag(g_values)])
    spread = float(np.max(np.ptp(pts, axis=0))) if n > 1 else 0.0
    spread = max(spread, float(np.max(np.abs(g_values))), np.finfo(float).tiny)
    labels = fcluster(linkage(pts, method="single"), t=ctol * spread, criterion="distance")
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    assignments = tuple(tuple(g) for g in sorted(groups.values(), key=lambda g: g[0]))
    centers = np.array([tuples[list(g)].mean(axis=0) for g in assignments])
    return ClusterSet(assignments, centers)


@dataclass
class _Trace:
    rows: list = field(default_factory=list)

    def add(self, d, M, n, rs):
        self.rows.append({
            "d": d, "p": M.shape[0] if M is not None else None, "q": M.shape[1] if M is not None else None,
            "nullity": n,
            "increments": list(rs.rank_increment_per_degree) if rs else None,
            "gap": rs is not None,
        })


def _affine_structure(S, opts, history):
    if not stabilized(history, opts.posdim):
        return None
    try:
        rs = rank_structure(S, opts.rank_mode, opts.tol)
    except NoGap:
        return None
    return rs


def solve(problem, opts=None):
    """Every isolated affine solution of ``problem`` (system or MEP)."""
    opts = opts or SolverOptions()
    t_start = time.perf_counter()
    timings = {}
    if opts.basis_id and opts.basis_id != problem.basis:
        problem = convert_basis(problem, opts.basis_id)
    order = OrderRule(opts.order_id, problem.m)
    basis = BasisRule(problem.basis)
    m, l = problem.m, problem.l

    d = problem.degree
    if d > opts.maxdeg:
        raise DegreeCapExceeded(f"problem degree {d} exceeds maxdeg {opts.maxdeg}")
    history, trace = [], _Trace()
    M = build(problem, d, order)
    S = None
    while True:
        if opts.route == COLUMN:
            S = column_subspace(M, opts.tol)
        elif opts.enlarge == "iterative" or S is None:
            S = nullspace(M, opts.tol)
        history.append(S.nullity)
        rs = _affine_structure(S, opts, history)
        trace.add(d, M, S.nullity, rs)
        log.debug("degree %d: nullity %d%s", d, S.nullity, " (gap)" if rs else "")
        if rs is not None:
            break
        if d >= opts.maxdeg:
            if not opts.posdim and not stabilized(history):
                raise PositiveDimensionalAffine(
                    f"nullity never stabilized up to degree {d} (history {history}); "
                    "the affine solution set is probably positive-dimensional"
                )
            raise DegreeCapExceeded(f"no usable gap up to degree {d}")
        d += 1
        if opts.route == NULL and opts.enlarge == "recursive":
            extra, _ = new_rows(M, d)
            S = nullspace_recursive(S, extra, opts.tol)
        M = enlarge(M, d)
    timings["subspace"] = time.perf_counter() - t_start

    rng = np.random.default_rng(opts.seed)
    gcoef = random_shift(m, rng)
    shifts = [linear_shift(gcoef, m)] + [linear_shift(np.eye(m + 1)[i], m) for i in range(1, m + 1)]
    t0 = time.perf_counter()
    info = {"rejected_infinite": 0, "rejected_singular": 0, "offdiag_norm": 0.0}
    if rs.m_a == 0:
        tuples = np.zeros((0, m), dtype=complex)
        g_values = np.zeros(0, dtype=complex)
    else:
        if opts.route == NULL:
            W11 = column_compress(S, rs)
            pencils = []
            for g in shifts:
                s0, smap = build_shift_maps(rs, g, basis, order, l)
                pencils.append(build_pencil_null(W11, s0, smap))
        else:
            K = _column_projection(M, rs, opts.tol)
            pencils = []
            for g in shifts:
                s0, smap = build_shift_maps(rs, g, basis, order, l)
                pencils.append(build_pencil_column(M, rs, smap, opts.tol, K=K))
        tuples, g_values, info = solve_multishift(pencils)
    timings["realization"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    raw = tuples.copy()
    if opts.cluster and len(g_values) > 1:
        cs = cluster(tuples, g_values, opts.ctol)
        for members, center in zip(cs.assignments, cs.centers):
            tuples[list(members)] = center
        clusters = cs.assignments
    else:
        clusters = tuple((i,) for i in range(len(g_values)))
    timings["cluster"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    res_abs, res_rel, ys = [], [], []
    for x in tuples:
        ra, rr, y = residual(problem, x)
        res_abs.append(ra)
        res_rel.append(rr)
        ys.append(y)
    timings["residual"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - t_start

    diagnostics = {
        "final_degree": d,
        "nullity": int(S.nullity),
        "affine_count": int(rs.m_a),
        "gap_degree": rs.gap_degree,
        "subspace_route": opts.route,
        "basis_id": problem.basis,
        "order_id": opts.order_id,
        "nullity_history": [int(h) for h in history],
        "increments": list(rs.rank_increment_per_degree),
        "shift_coefficients": [[float(c.real), float(c.imag)] for c in gcoef],
        "g_values": g_values,
        "raw_points": raw,
        "per_degree": trace.rows,
        "options": asdict(opts),
        "timings": timings,
        **info,
    }
    return SolutionSet(
        points=np.asarray(tuples, dtype=complex).reshape(-1, m),
        eigenvectors=np.array(ys, dtype=complex).reshape(-1, l),
        residual_abs=np.array(res_abs, dtype=float),
        residual_rel=np.array(res_rel, dtype=float),
        clusters=clusters,
        diagnostics=diagnostics,
    )
