"""Unified problem object for polynomial systems and rectangular MEPs.

Both problem types are a list of matrix equations ``P_j(x) y = 0``.  A
polynomial system is the special case ``k = l = 1`` with ``y = 1``; a
rectangular multiparameter eigenvalue problem (MEP) is a single ``k x l``
matrix polynomial with ``k >= l + m - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis import BASES, BasisRule
from .errors import EmptyEquation, ShapeMismatch, SupportLengthMismatch, UnderDetermined

SYSTEM = "system"
MEP = "mep"


def _frozen(a):
    a = np.array(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Problem:
    """Immutable problem: per-equation supports and coefficient stacks.

    ``supports[j]`` is a ``(t_j, m)`` integer array and ``coefficients[j]`` a
    ``(t_j, k, l)`` complex array holding the matching coefficient matrices.
    """

    kind: str
    m: int
    supports: tuple
    coefficients: tuple
    basis: str = "monomial"

    @property
    def s(self):
        return len(self.supports)

    @property
    def k(self):
        return self.coefficients[0].shape[1]

    @property
    def l(self):
        return self.coefficients[0].shape[2]

    @property
    def degrees(self):
        return tuple(int(sup.sum(axis=1).max()) for sup in self.supports)

    @property
    def degree(self):
        return max(self.degrees)

    @property
    def is_real(self):
        return all(not np.any(c.imag) for c in self.coefficients)

    def terms(self, j):
        """Iterate ``(support tuple, k x l coefficient)`` pairs of equation ``j``."""
        for sup, coef in zip(self.supports[j], self.coefficients[j]):
            yield tuple(int(v) for v in sup), coef

    def scaled(self, alpha):
        return Problem(self.kind, self.m, self.supports,
                       tuple(_frozen(alpha * c) for c in self.coefficients), self.basis)

    def coefficient_norm(self):
        """Sum of absolute values of every coefficient entry."""
        return float(sum(np.abs(c).sum() for c in self.coefficients))

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        if (self.kind, self.m, self.basis, self.s) != (other.kind, other.m, other.basis, other.s):
            return False
        return all(
            np.array_equal(a, b) and c.shape == e.shape and np.array_equal(c, e)
            for a, b, c, e in zip(self.supports, other.supports, self.coefficients, other.coefficients)
        )

    __hash__ = None


def _merge_terms(terms, m, shape):
    merged = {}
    for support, coef in terms:
        support = tuple(int(v) for v in support)
        if len(support) != m:
            raise SupportLengthMismatch(f"support {support} does not have length {m}")
        if any(v < 0 for v in support):
            raise SupportLengthMismatch(f"support {support} has a negative entry")
        coef = np.asarray(coef, dtype=complex)
        if shape is None:
            coef = coef.reshape(1, 1)
        elif coef.shape != shape:
            raise ShapeMismatch(f"coefficient of shape {coef.shape}, expected {shape}")
        if support in merged:
            merged[support] = merged[support] + coef
        else:
            merged[support] = coef
    merged = {e: c for e, c in merged.items() if np.any(c != 0)}
    if not merged:
        raise EmptyEquation("equation without nonzero terms")
    sups = np.array(list(merged), dtype=int).reshape(-1, m)
    coefs = np.array(list(merged.values()), dtype=complex)
    return _frozen(sups), _frozen(coefs)


def _as_pairs(terms):
    if isinstance(terms, dict):
        return list(terms.items())
    return list(terms)


def make_system(equations, m, basis="monomial"):
    """Polynomial system from ``s`` term lists of ``(support, scalar)`` pairs.

    Each equation may also be a ``{support: coefficient}`` dict.  Terms sharing
    a support are summed.
    """
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}")
    if not equations:
        raise EmptyEquation("a system needs at least one equation")
    sups, coefs = [], []
    for eq in equations:
        pairs = _as_pairs(eq)
        for _, c in pairs:
            if np.ndim(c) != 0:
                raise ShapeMismatch("system coefficients must be scalars")
        s, c = _merge_terms(pairs, m, None)
        sups.append(s)
        coefs.append(c)
    return Problem(SYSTEM, m, tuple(sups), tuple(coefs), basis)


def make_mep(terms, m, basis="monomial"):
    """Rectangular MEP from ``(support, k x l matrix)`` pairs."""
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}")
    pairs = _as_pairs(terms)
    if not pairs:
        raise EmptyEquation("an MEP needs at least one term")
    shape = np.asarray(pairs[0][1]).shape
    if len(shape) != 2:
        raise ShapeMismatch("MEP coefficients must be matrices")
    k, l = shape
    if k < l + m - 1:
        raise UnderDetermined(f"k={k} < l+m-1={l + m - 1}")
    s, c = _merge_terms(pairs, m, shape)
    return Problem(MEP, m, (s,), (c,), basis)


def evaluate(p, x):
    """Stack of ``P_j(x)``: an ``(s, 1)`` vector for systems, ``P(x)`` for MEPs."""
    x = np.asarray(x, dtype=complex).reshape(p.m)
    rule = BasisRule(p.basis)
    blocks = []
    for sup, coef in zip(p.supports, p.coefficients):
        phi = rule.values(sup, x)
        blocks.append(np.tensordot(phi, coef, axes=1))
    return np.vstack(blocks)


def residual(p, x):
    """Absolute and relative residual of ``x`` and the matching unit vector ``y``.

    The absolute residual is the smallest singular value of ``evaluate(p, x)``;
    ``y`` is the corresponding right singular vector (``[1]`` for systems).
    """
    val = evaluate(p, x)
    if p.l == 1:
        res = float(np.linalg.norm(val))
        y = np.ones(1, dtype=complex)
    else:
        _, sv, vh = scipy.linalg.svd(val)
        res = float(sv[-1])
        y = vh[-1].conj()
        # fix the phase for reproducible output
        j = int(np.argmax(np.abs(y)))
        y = y * (abs(y[j]) / y[j])
    rel = res / p.coefficient_norm()
    return res, rel, y


@dataclass(frozen=True, eq=False)
class SolutionSet:
    points: np.ndarray
    eigenvectors: np.ndarray
    residual_abs: np.ndarray
    residual_rel: np.ndarray
    clusters: tuple
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.points)
        if not (len(self.eigenvectors) == len(self.residual_abs) == len(self.residual_rel) == n):
            raise ValueError("solution arrays of different length")
        seen = sorted(i for c in self.clusters for i in c)
        if seen != list(range(n)):
            raise ValueError("clusters do not partition the solution indices")

    def __len__(self):
        return len(self.points)

    def cluster_ids(self):
        ids = np.empty(len(self.points), dtype=int)
        for cid, members in enumerate(self.clusters):
            ids[list(members)] = cid
        return ids

    def to_csv(self):
        m = self.points.shape[1] if self.points.ndim == 2 else 0
        head = []
        for i in range(1, m + 1):
            head += [f"re_x{i}", f"im_x{i}"]
        head += ["res_abs", "res_rel", "cluster_id"]
        lines = [",".join(head)]
        for pt, ra, rr, cid in zip(self.points, self.residual_abs, self.residual_rel, self.cluster_ids()):
            cells = []
            for v in pt:
                cells += [f"{v.real:.17g}", f"{v.imag:.17g}"]
            cells += [f"{ra:.17g}", f"{rr:.17g}", str(cid)]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def convert_basis(p, target):
    """Exact change of basis between the monomial and Chebyshev representations."""
    from numpy.polynomial import chebyshev as C

    if target == p.basis:
        return p
    if {p.basis, target} != {"monomial", "chebyshev"}:
        raise ValueError(f"no conversion from {p.basis} to {target}")
    univariate = C.poly2cheb if target == "chebyshev" else C.cheb2poly
    out_terms = []
    for j in range(p.s):
        acc = {}
        for sup, coef in p.terms(j):
            parts = [{(): 1.0}]
            for e in sup:
                unit = np.zeros(e + 1)
                unit[e] = 1.0
                row = univariate(unit)
                parts.append({(i,): float(w) for i, w in enumerate(row) if w != 0})
            expansion = {(): 1.0}
            for part in parts[1:]:
                expansion = {a + b: wa * wb for a, wa in expansion.items() for b, wb in part.items()}
            for e, w in expansion.items():
                acc[e] = acc.get(e, 0) + w * coef
        out_terms.append(list(acc.items()))
    if p.kind == SYSTEM:
        return make_system([[(e, complex(c[0, 0])) for e, c in t] for t in out_terms], p.m, target)
    return make_mep(out_terms[0], p.m, target)
