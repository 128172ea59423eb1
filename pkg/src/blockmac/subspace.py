"""Solution subspace of the Macaulay matrix and its rank structure.

The null-space route keeps an orthonormal basis ``Z`` of ``null(M(d))``; the
column-space route never forms ``Z`` and reads the same information from the
linearly dependent columns of ``M`` (checked right to left).  Both produce a
:class:`RankStructure` which locates the affine standard rows and the gap
block that separates them from the solutions at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import cumulative_size
from .errors import GapMissing, NoGap, RankAmbiguous

NULL = "null"
COLUMN = "column"
BLOCK = "block"
ROW = "row"
DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    Z: np.ndarray | None
    d: int
    route: str
    m: int
    l: int
    macaulay: object = None
    nullity: int | None = None

    def __post_init__(self):
        if self.nullity is None:
            object.__setattr__(self, "nullity", self.Z.shape[1])

    def block_rows(self):
        """Row (or column) boundaries ``[0, b_0, b_0 + b_1, ...]`` per degree block."""
        return [self.l * cumulative_size(self.m, k) for k in range(-1, self.d + 1)]


@dataclass(frozen=True)
class RankStructure:
    nullity: int
    rank_increment_per_degree: tuple
    standard_rows: tuple
    gap_degree: int | None
    m_a: int
    nrows: int
    route: str = NULL

    @property
    def affine_rows(self):
        return tuple(r for r in self.standard_rows if r < self.nrows)


def _svd_values(a):
    if a.size == 0:
        return np.zeros(0)
    try:
        return scipy.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError:
        return scipy.linalg.svd(a, compute_uv=False, lapack_driver="gesvd")


def _svd(a):
    try:
        return scipy.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError:
        return scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesvd")


def _check_ambiguous(sv, thr, where):
    close = sv[(sv > thr / 10) & (sv <= thr * 10)]
    if close.size:
        raise RankAmbiguous(
            f"{where}: singular value(s) {close.tolist()} within a factor 10 of the "
            f"threshold {thr:.3e}; adjust tol",
            threshold=thr,
            ambiguous=close,
        )


def _null_of_dense(a, tol, where):
    """Orthonormal null-space basis of a dense matrix and its rank."""
    q = a.shape[1]
    if a.shape[0] == 0 or not np.any(a):
        return np.eye(q, dtype=a.dtype), 0
    _, sv, vh = _svd(a)
    thr = tol * sv[0]
    _check_ambiguous(sv, thr, where)
    rank = int(np.count_nonzero(sv > thr))
    return vh[rank:].conj().T, rank


def numerical_rank(M, tol=DEFAULT_TOL):
    a = M.toarray() if hasattr(M, "toarray") else np.asarray(M)
    sv = _svd_values(a)
    if sv.size == 0 or sv[0] == 0:
        return 0
    thr = tol * sv[0]
    _check_ambiguous(sv, thr, "rank")
    return int(np.count_nonzero(sv > thr))


def nullspace(M, tol=DEFAULT_TOL):
    """Null space of a Macaulay matrix from one dense SVD."""
    Z, _ = _null_of_dense(M.toarray(), tol, f"null space at degree {M.d}")
    return SubspaceBasis(Z, M.d, NULL, M.problem.m, M.problem.l)


def nullspace_recursive(prev, rows, tol=DEFAULT_TOL):
    """Update ``null(M(d-1))`` to ``null(M(d))`` using only the new rows.

    ``rows`` are the rows of ``M(d)`` absent from ``M(d-1)``, already spanning
    all ``q(d)`` columns.  Any null vector of ``M(d)`` is ``[Zprev a; b]``, so
    the new basis is ``blockdiag(Zprev, I) @ null(rows @ blockdiag(Zprev, I))``.
    """
    q_old, n_old = prev.Z.shape
    q_new = rows.shape[1]
    dtype = np.result_type(prev.Z, rows.dtype)
    extra = q_new - q_old
    if rows.shape[0] == 0:
        Z = np.zeros((q_new, n_old + extra), dtype=dtype)
        Z[:q_old, :n_old] = prev.Z
        Z[q_old:, n_old:] = np.eye(extra)
        return SubspaceBasis(Z, prev.d + 1, NULL, prev.m, prev.l)
    rows = rows.tocsc()
    a = np.empty((rows.shape[0], n_old + extra), dtype=dtype)
    a[:, :n_old] = rows[:, :q_old] @ prev.Z
    a[:, n_old:] = rows[:, q_old:].toarray()
    N, _ = _null_of_dense(a, tol, f"recursive null space at degree {prev.d + 1}")
    Z = np.empty((q_new, N.shape[1]), dtype=np.result_type(dtype, N))
    Z[:q_old] = prev.Z @ N[:n_old]
    Z[q_old:] = N[n_old:]
    return SubspaceBasis(Z, prev.d + 1, NULL, prev.m, prev.l)


def column_subspace(M, tol=DEFAULT_TOL):
    """Column-space route handle; only the nullity is computed here."""
    n = M.shape[1] - numerical_rank(M, tol)
    return SubspaceBasis(None, M.d, COLUMN, M.problem.m, M.problem.l, macaulay=M, nullity=n)


class _Span:
    """Growing orthonormal basis for greedy top-to-bottom independence tests."""

    def __init__(self, dim, dtype, capacity):
        self.Q = np.zeros((max(capacity, 1), dim), dtype=dtype)
        self.r = 0

    def residual(self, v):
        Q = self.Q[: self.r]
        for _ in range(2):
            v = v - (v @ Q.conj().T) @ Q
        return v

    def add(self, v):
        self.Q[self.r] = v / np.linalg.norm(v)
        self.r += 1


def _select(vectors, span, thr, limit=None):
    """Indices of vectors independent of their predecessors, in order."""
    picked = []
    for i, v in enumerate(vectors):
        if limit is not None and len(picked) >= limit:
            break
        res = span.residual(v)
        if np.linalg.norm(res) > thr:
            span.add(res)
            picked.append(i)
    return picked


def _fill(vectors, span, picked, want):
    """Top up a block selection with the most independent remaining vectors."""
    rest = [i for i in range(len(vectors)) if i not in picked]
    while len(picked) < want and rest:
        res = [span.residual(vectors[i]) for i in rest]
        best = int(np.argmax([np.linalg.norm(r) for r in res]))
        span.add(res[best])
        picked.append(rest.pop(best))
    return sorted(picked)


def _null_increments(S, mode, tol):
    Z = S.Z
    bounds = S.block_rows()
    span = _Span(Z.shape[1], Z.dtype, Z.shape[1])
    increments, standard = [], []
    prev_rank = 0
    for k in range(S.d + 1):
        lo, hi = bounds[k], bounds[k + 1]
        rows = Z[lo:hi]
        if mode == BLOCK:
            sv = _svd_values(Z[:hi])
            rank = int(np.count_nonzero(sv > tol))
            inc = rank - prev_rank
            prev_rank = rank
            picked = _select(rows, span, tol, limit=inc)
            if len(picked) < inc:
                picked = _fill(rows, span, picked, inc)
        else:
            picked = _select(rows, span, tol)
            inc = len(picked)
        increments.append(inc)
        standard.extend(lo + i for i in picked)
    return increments, standard


def _column_increments(S, mode, tol):
    a = S.macaulay.toarray()
    scale = np.linalg.norm(a, 2) if a.size else 1.0
    thr = tol * scale
    bounds = S.block_rows()
    span = _Span(a.shape[0], a.dtype, min(a.shape))
    dependent = {}
    for k in range(S.d, -1, -1):
        lo, hi = bounds[k], bounds[k + 1]
        cols = a[:, lo:hi].T[::-1]
        if mode == BLOCK:
            block = cols - (cols @ span.Q[: span.r].conj().T) @ span.Q[: span.r]
            sv = _svd_values(block)
            indep = int(np.count_nonzero(sv > thr))
            picked = _select(cols, span, thr, limit=indep)
            if len(picked) < indep:
                picked = _fill(cols, span, picked, indep)
        else:
            picked = _select(cols, span, thr)
        picked = {hi - 1 - i for i in picked}
        dependent[k] = [c for c in range(lo, hi) if c not in picked]
    increments = [len(dependent[k]) for k in range(S.d + 1)]
    standard = [c for k in range(S.d + 1) for c in dependent[k]]
    return increments, standard


def rank_structure(S, mode=BLOCK, tol=DEFAULT_TOL):
    """Per-degree rank increments, standard rows and the gap of a subspace.

    Raises :class:`NoGap` when no degree block adds zero rank; the caller
    should then enlarge the subspace.
    """
    if S.route == NULL:
        increments, standard = _null_increments(S, mode, tol)
    else:
        increments, standard = _column_increments(S, mode, tol)
    gap = next((k for k, inc in enumerate(increments) if inc == 0), None)
    if gap is None:
        raise NoGap(f"no zero-increment degree block at degree {S.d}")
    m_a = sum(increments[:gap])
    nrows = S.l * cumulative_size(S.m, gap)
    return RankStructure(
        nullity=S.nullity if S.route == COLUMN else S.Z.shape[1],
        rank_increment_per_degree=tuple(increments),
        standard_rows=tuple(int(r) for r in standard),
        gap_degree=gap,
        m_a=m_a,
        nrows=nrows,
        route=S.route,
    )


def stabilized(history, posdim=False):
    """True once the last two nullities agree (always true with ``posdim``)."""
    if not history:
        raise ValueError("empty nullity history")
    if posdim:
        return True
    return len(history) >= 2 and history[-1] == history[-2]


def column_compress(Z, rs):
    """Orthonormal basis ``W11`` of the affine part of the top ``nrows`` rows of ``Z``."""
    if rs.gap_degree is None:
        raise GapMissing("column compression needs a rank structure with a gap")
    Z = Z.Z if isinstance(Z, SubspaceBasis) else Z
    top = Z[: rs.nrows]
    u, _, _ = scipy.linalg.svd(top, full_matrices=False)
    return u[:, : rs.m_a]
