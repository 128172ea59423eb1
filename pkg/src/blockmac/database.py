"""Small embedded set of test problems with reconstructible definitions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import UnknownProblem
from .mlp import serialize_problem
from .problem import MEP, make_mep, make_system


def noonburg(n, c=1.1):
    """Noonburg neural network: ``x_i * sum_{j != i} x_j^2 - c x_i + 1``."""
    eqs = []
    for i in range(n):
        terms = []
        for j in range(n):
            if j == i:
                continue
            e = [0] * n
            e[i] += 1
            e[j] += 2
            terms.append((tuple(e), 1.0))
        e = [0] * n
        e[i] = 1
        terms += [(tuple(e), -c), ((0,) * n, 1.0)]
        eqs.append(terms)
    return make_system(eqs, n)


def cyclic(n):
    """Cyclic n-roots: elementary cyclic sums of every length, last one ``prod x - 1``."""
    eqs = []
    for k in range(1, n):
        terms = []
        for i in range(n):
            e = [0] * n
            for j in range(k):
                e[(i + j) % n] += 1
            terms.append((tuple(e), 1.0))
        eqs.append(terms)
    eqs.append([((1,) * n, 1.0), ((0,) * n, -1.0)])
    return make_system(eqs, n)


def katsura(n):
    """Katsura-n in the ``n + 1`` unknowns ``u_0..u_n``."""
    nv = n + 1

    def u(i):
        i = abs(i)
        return i if i <= n else None

    eqs = []
    for mi in range(n):
        acc = {}
        for li in range(-n, n + 1):
            a, b = u(li), u(mi - li)
            if a is None or b is None:
                continue
            e = [0] * nv
            e[a] += 1
            e[b] += 1
            acc[tuple(e)] = acc.get(tuple(e), 0.0) + 1.0
        e = [0] * nv
        e[mi] = 1
        acc[tuple(e)] = acc.get(tuple(e), 0.0) - 1.0
        eqs.append(list(acc.items()))
    lin = [((0,) * nv, -1.0)]
    for li in range(nv):
        e = [0] * nv
        e[li] = 1
        lin.append((tuple(e), 1.0 if li == 0 else 2.0))
    eqs.append(lin)
    return make_system(eqs, nv)


QUADRATIC_2D = ((2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0))


def generic_conics(seed=2024):
    rng = np.random.default_rng(seed)
    return make_system([[(e, rng.standard_normal()) for e in QUADRATIC_2D] for _ in range(2)], 2)


def double_root(a=3.0, b=4.0, c=-2.0):
    """``x2 - b = (x1 - a)^2`` and ``(x2 - b)(x1 - c) = 0``.

    Double root ``(a, b)``, simple root ``(c, b + (c - a)^2)``, one root at
    infinity.
    """
    p1 = {(0, 1): 1.0, (0, 0): -b - a * a, (2, 0): -1.0, (1, 0): 2 * a}
    p2 = {(1, 1): 1.0, (0, 1): -c, (1, 0): -b, (0, 0): b * c}
    return make_system([p1, p2], 2)


PLANTED_MEP_ROOTS = ((0.5, -0.75), (0.5, 1.25), (-1.5, -0.75), (-1.5, 1.25))


def planted_mep(alpha=0.6, beta=-0.35):
    """2 x 1 quadratic MEP whose eigenvalues are the grid ``{a, b} x {c, e}``."""
    (a, c), (_, e) = PLANTED_MEP_ROOTS[0], PLANTED_MEP_ROOTS[1]
    b = PLANTED_MEP_ROOTS[2][0]
    f = {(2, 0): 1.0, (1, 0): -(a + b), (0, 0): a * b}
    h = {(0, 2): 1.0, (0, 1): -(c + e), (0, 0): c * e}
    terms = {}
    for row, (first, second, w) in enumerate(((f, h, alpha), (h, f, beta))):
        for sup, val in first.items():
            terms.setdefault(sup, np.zeros((2, 1)))[row, 0] += val
        for sup, val in second.items():
            terms.setdefault(sup, np.zeros((2, 1)))[row, 0] += w * val
    return make_mep(list(terms.items()), 2)


def random_quadratic_mep(seed=7, k=3, l=2):
    """Random real quadratic two-parameter MEP of shape ``k x l``."""
    rng = np.random.default_rng(seed)
    return make_mep([(e, rng.standard_normal((k, l))) for e in QUADRATIC_2D], 2)


@dataclass(frozen=True)
class Entry:
    name: str
    build: object
    description: str
    m_b: int | None = None
    m_a: int | None = None

    def info(self):
        p = self.build()
        out = {"name": self.name, "kind": p.kind, "s": p.s, "k": p.k, "l": p.l,
               "d": p.degree, "m": p.m, "m_b": self.m_b, "m_a": self.m_a,
               "basis": p.basis, "description": self.description}
        if p.kind == MEP:
            out.pop("s")
        return out


_ENTRIES = [
    Entry("noon3", partial(noonburg, 3), "Noonburg neural network, n=3", 27, 21),
    Entry("noon4", partial(noonburg, 4), "Noonburg neural network, n=4"),
    Entry("cyclic5", partial(cyclic, 5), "cyclic 5-roots", 120, 70),
    Entry("conics", generic_conics, "two generic real conics (seed 2024)", 4, 4),
    Entry("doubleroot", double_root, "planted double root at (3, 4)", 4, 3),
    Entry("mep_planted", planted_mep, "2x1 quadratic MEP with planted grid of 4 eigenvalues", 4, 4),
    Entry("mep_random_3x2", random_quadratic_mep,
          "random quadratic 3x2 two-parameter MEP (seed 7)", 12, 12),
]
for _n in range(1, 8):
    _ENTRIES.append(Entry(f"katsura{_n}", partial(katsura, _n), f"Katsura-{_n}",
                          *((128, 128) if _n == 7 else (None, None))))

DATABASE = {e.name: e for e in _ENTRIES}


def names():
    return list(DATABASE)


def entry(name):
    try:
        return DATABASE[name]
    except KeyError:
        raise UnknownProblem(f"no problem named {name!r} in the database") from None


def get(name):
    return entry(name).build()


def show(name):
    return entry(name).info()


def export(name):
    return serialize_problem(get(name))
