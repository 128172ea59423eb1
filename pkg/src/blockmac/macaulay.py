"""(Block) Macaulay matrix construction and enlargement.

Rows are grouped by their total degree ``deg(shift) + d_j``; inside one row
degree the equations appear in input order and the shifts in position order.
With this ordering ``M(d)`` is exactly the first rows of ``M(d + 1)`` (with
zero columns appended), which is what makes recursive enlargement cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import BasisRule, OrderRule, cumulative_size
from .errors import DegreeSkip, DegreeTooSmall


@dataclass(frozen=True)
class RowBlock:
    equation: int
    shift: tuple
    start: int
    stop: int


@dataclass(frozen=True, eq=False)
class MacaulayMatrix:
    matrix: sp.csr_matrix
    d: int
    problem: object
    order: OrderRule
    row_blocks: tuple

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def basis(self):
        return BasisRule(self.problem.basis)

    @property
    def col_blocks(self):
        """``[(start, stop), ...]`` column range of every degree block ``0..d``."""
        m, l = self.problem.m, self.problem.l
        return [(l * cumulative_size(m, k - 1), l * cumulative_size(m, k)) for k in range(self.d + 1)]

    def rows_upto(self, d):
        """Number of rows whose row degree is at most ``d``."""
        return sum(b.stop - b.start for b in self.row_blocks
                   if sum(b.shift) + self.problem.degrees[b.equation] <= d)

    def toarray(self):
        return self.matrix.toarray()

    def __eq__(self, other):
        if not isinstance(other, MacaulayMatrix):
            return NotImplemented
        a, b = self.matrix, other.matrix
        return (
            self.d == other.d and self.order == other.order and self.row_blocks == other.row_blocks
            and a.shape == b.shape and a.dtype == b.dtype
            and np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    __hash__ = None


def _dtype(problem):
    return float if problem.is_real else complex


def _rows_of_degree(problem, order, D, row_offset):
    """Row blocks whose row degree is exactly ``D`` as COO triplets."""
    basis = BasisRule(problem.basis)
    k, l = problem.k, problem.l
    dtype = _dtype(problem)
    rows, cols, vals, blocks = [], [], [], []
    r = row_offset
    for j, dj in enumerate(problem.degrees):
        if dj > D:
            continue
        terms = [(sup, np.asarray(c.real if dtype is float else c)) for sup, c in problem.terms(j)]
        for shift in order.block(D - dj):
            acc = {}
            for sup, coef in terms:
                for w, e in basis.shift(shift, sup):
                    col = order.position(e) - 1
                    if col in acc:
                        acc[col] = acc[col] + w * coef
                    else:
                        acc[col] = w * coef
            for col in sorted(acc):
                block = acc[col]
                ii, jj = np.nonzero(block)
                rows.append(r + ii)
                cols.append(col * l + jj)
                vals.append(block[ii, jj])
            blocks.append(RowBlock(j, shift, r, r + k))
            r += k
    if rows:
        rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals).astype(dtype)
    else:
        rows = cols = np.zeros(0, dtype=int)
        vals = np.zeros(0, dtype=dtype)
    return rows, cols, vals, blocks, r


def _assemble(parts, nrows, ncols, dtype):
    rows = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, int)
    cols = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0, int)
    vals = np.concatenate([p[2] for p in parts]) if parts else np.zeros(0, dtype)
    return sp.csr_matrix((vals.astype(dtype), (rows, cols)), shape=(nrows, ncols))


def build(problem, d, order=None):
    """Macaulay matrix ``M(d)`` of ``problem`` in the given monomial order."""
    order = order or OrderRule("grevlex", problem.m)
    if d < problem.degree:
        raise DegreeTooSmall(f"degree {d} below the problem degree {problem.degree}")
    parts, blocks, r = [], [], 0
    for D in range(min(problem.degrees), d + 1):
        rows, cols, vals, new_blocks, r = _rows_of_degree(problem, order, D, r)
        parts.append((rows, cols, vals))
        blocks.extend(new_blocks)
    q = problem.l * cumulative_size(problem.m, d)
    mat = _assemble(parts, r, q, _dtype(problem))
    return MacaulayMatrix(mat, d, problem, order, tuple(blocks))


def new_rows(M, d):
    """Rows of ``M(d)`` that are absent from ``M(d - 1) = M``, as a sparse matrix."""
    if d != M.d + 1:
        raise DegreeSkip(f"cannot go from degree {M.d} to {d}")
    p = M.problem
    rows, cols, vals, blocks, r = _rows_of_degree(p, M.order, d, M.shape[0])
    q = p.l * cumulative_size(p.m, d)
    mat = _assemble([(rows - M.shape[0], cols, vals)], r - M.shape[0], q, _dtype(p))
    return mat, tuple(blocks)


def enlarge(M, d):
    """``M(d)`` from ``M(d - 1)`` by appending columns and the new row blocks."""
    extra, blocks = new_rows(M, d)
    q = extra.shape[1]
    old = M.matrix.copy()
    old.resize((old.shape[0], q))
    mat = sp.vstack([old, extra], format="csr")
    mat.sort_indices()
    return MacaulayMatrix(mat, d, M.problem, M.order, M.row_blocks + blocks)


def export_triplets(M):
    """Coordinate text, one ``row col re im`` line per nonzero (1-based indices)."""
    coo = M.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{M.shape[0]} {M.shape[1]} {coo.nnz}"]
    for i in order:
        v = complex(coo.data[i])
        lines.append(f"{coo.row[i] + 1} {coo.col[i] + 1} {v.real:.17g} {v.imag:.17g}")
    return "\n".join(lines) + "\n"
