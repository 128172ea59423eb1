"""Monomial orders and polynomial bases.

Every other module asks an :class:`OrderRule` where an exponent lives and a
:class:`BasisRule` what the product of two basis functions expands to, so the
Macaulay construction and the shift maps never hard-code either choice.

Positions are 1-based.  All orders are graded: the constant comes first,
then the degree-1 block, and so on.  Inside a degree block the orders list
exponents as follows (``x1 > x2 > ... > xm``):

``grevlex``
    ascending graded reverse lexicographic order.
``grlex``
    ascending graded lexicographic order.
``grinvlex``
    graded inverse lexicographic order, i.e. grlex listed in descending order
    (the reading order ``x1^2, x1 x2, x2^2``).
``grnlex``
    graded negative lexicographic order, taken here as grevlex listed in
    descending order.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .errors import IndexOutOfRange

ORDERS = ("grevlex", "grlex", "grinvlex", "grnlex")
BASES = ("monomial", "chebyshev")


def block_size(m, d):
    """Number of exponents in ``m`` variables of total degree exactly ``d``."""
    if m < 1 or d < 0:
        raise ValueError("need m >= 1 and d >= 0")
    return _checked(comb(m + d - 1, m - 1))


def cumulative_size(m, d):
    """Number of exponents in ``m`` variables of total degree at most ``d``."""
    if m < 1:
        raise ValueError("need m >= 1")
    if d < 0:
        return 0
    return _checked(comb(m + d, m))


def _checked(n):
    if n > sys.maxsize:
        raise OverflowError(f"count {n} exceeds the platform integer")
    return n


# Sort keys inside one degree block; smaller key = earlier position.
_BLOCK_KEYS = {
    "grlex": lambda e: tuple(e),
    "grevlex": lambda e: tuple(-v for v in reversed(e)),
    "grinvlex": lambda e: tuple(-v for v in e),
    "grnlex": lambda e: tuple(reversed(e)),
}


def register_order(name, block_key):
    """Register a graded order given the sort key used inside a degree block."""
    _BLOCK_KEYS[name] = block_key
    _block.cache_clear()
    _block_index.cache_clear()


@lru_cache(maxsize=None)
def _block(order_id, m, d):
    exps = []
    for combo in combinations_with_replacement(range(m), d):
        e = [0] * m
        for v in combo:
            e[v] += 1
        exps.append(tuple(e))
    exps.sort(key=_BLOCK_KEYS[order_id])
    return tuple(exps)


@lru_cache(maxsize=None)
def _block_index(order_id, m, d):
    return {e: i for i, e in enumerate(_block(order_id, m, d))}


@dataclass(frozen=True)
class OrderRule:
    id: str
    m: int

    def __post_init__(self):
        if self.id not in _BLOCK_KEYS:
            raise ValueError(f"unknown monomial order {self.id!r}")
        if self.m < 1:
            raise ValueError("an order needs at least one variable")

    def block(self, d):
        """Exponents of total degree ``d`` in position order."""
        return _block(self.id, self.m, d)

    def position(self, e):
        e = tuple(int(v) for v in e)
        if len(e) != self.m:
            raise ValueError(f"exponent {e} does not have length {self.m}")
        d = sum(e)
        return cumulative_size(self.m, d - 1) + _block_index(self.id, self.m, d)[e] + 1

    def exponent_at(self, idx):
        if idx < 1:
            raise IndexOutOfRange(f"position {idx} < 1")
        d = 0
        while cumulative_size(self.m, d) < idx:
            d += 1
        return self.block(d)[idx - 1 - cumulative_size(self.m, d - 1)]

    def exponents(self, d):
        """All exponents of total degree at most ``d`` in position order."""
        out = []
        for k in range(d + 1):
            out.extend(self.block(k))
        return out


def position(o, e):
    """1-based position of ``e``; ``o`` is an :class:`OrderRule` or an order id."""
    if isinstance(o, str):
        o = OrderRule(o, len(e))
    return o.position(e)


def exponent_at(o, idx):
    return o.exponent_at(idx)


def chebyshev_values(n, x):
    """Array ``[T_0(x), ..., T_n(x)]`` from the three-term recurrence."""
    x = np.asarray(x)
    out = np.empty((n + 1,) + x.shape, dtype=np.result_type(x, float))
    out[0] = 1.0
    if n >= 1:
        out[1] = x
    for k in range(2, n + 1):
        out[k] = 2 * x * out[k - 1] - out[k - 2]
    return out


def _monomial_values(n, x):
    x = np.asarray(x)
    out = np.empty((n + 1,) + x.shape, dtype=np.result_type(x, float))
    out[0] = 1.0
    for k in range(1, n + 1):
        out[k] = out[k - 1] * x
    return out


@lru_cache(maxsize=200_000)
def _monomial_shift(a, c):
    return ((1.0, tuple(i + j for i, j in zip(a, c))),)


@lru_cache(maxsize=200_000)
def _chebyshev_shift(a, c):
    # T_i T_j = (T_{i+j} + T_{|i-j|}) / 2, one variable at a time
    terms = {(): 1.0}
    for i, j in zip(a, c):
        factors = [(1.0, i + j)] if i == 0 or j == 0 else [(0.5, i + j), (0.5, abs(i - j))]
        nxt = {}
        for e, w in terms.items():
            for f, k in factors:
                key = e + (k,)
                nxt[key] = nxt.get(key, 0.0) + w * f
        terms = nxt
    return tuple((w, e) for e, w in terms.items())


@dataclass(frozen=True)
class BasisRule:
    """A tensor-product polynomial basis with a closed-form product rule."""

    id: str

    def __post_init__(self):
        if self.id not in _BASIS_IMPL:
            raise ValueError(f"unknown polynomial basis {self.id!r}")

    def shift(self, a, c):
        """Expansion of ``phi_a * phi_c`` as ``[(coefficient, exponent), ...]``."""
        a = tuple(int(v) for v in a)
        c = tuple(int(v) for v in c)
        if len(a) != len(c):
            raise ValueError("exponents of different length")
        return list(_BASIS_IMPL[self.id][0](a, c))

    def univariate(self, n, x):
        """Values of the first ``n + 1`` univariate basis functions at ``x``."""
        return _BASIS_IMPL[self.id][1](n, x)

    def values(self, exponents, x):
        """Basis functions ``phi_e(x)`` for every row ``e`` of ``exponents``."""
        exponents = np.asarray(exponents, dtype=int).reshape(-1, len(x))
        x = np.asarray(x)
        top = int(exponents.max()) if exponents.size else 0
        tables = [self.univariate(top, xi) for xi in x]
        out = np.ones(len(exponents), dtype=np.result_type(x, float))
        for v, table in enumerate(tables):
            out = out * table[exponents[:, v]]
        return out


_BASIS_IMPL = {
    "monomial": (_monomial_shift, _monomial_values),
    "chebyshev": (_chebyshev_shift, chebyshev_values),
}


def register_basis(name, shift, univariate):
    """Register a basis from its product rule and its univariate evaluator."""
    _BASIS_IMPL[name] = (lru_cache(maxsize=200_000)(shift), univariate)


def shift_rule(b, a, c):
    """Product expansion of ``phi_a * phi_c``; ``b`` is a :class:`BasisRule` or a basis id."""
    if isinstance(b, str):
        b = BasisRule(b)
    return b.shift(a, c)


def vandermonde(order, basis, x, d, y=None):
    """Block Vandermonde vector up to degree ``d`` at ``x`` (kron with ``y``)."""
    x = np.asarray(x)
    v = basis.values(order.exponents(d), x)
    if y is None:
        return v
    return np.kron(v, np.asarray(y))
