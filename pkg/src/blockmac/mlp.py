"""Reader and writer for the line-oriented MLP problem format.

::

    mlp 1
    kind system            # or: kind mep
    vars 2
    basis monomial         # or: basis chebyshev
    eqs 2
    poly 1 terms 2
    2 0 1 0                # i_1 ... i_m re im
    0 0 -1 0
    ...

An MEP replaces the ``eqs`` section with ``size <k> <l>``, ``terms <t>`` and,
per term, ``support <i_1> ... <i_m>`` followed by ``k`` rows of ``l``
``(re,im)`` pairs.  Everything after ``#`` on a line is ignored.
"""

from __future__ import annotations

import re

import numpy as np

from .basis import BASES
from .errors import FormatError, ProblemError, VersionError
from .problem import MEP, SYSTEM, make_mep, make_system

VERSION = 1
_PAIR = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def _num(x):
    return format(float(x), ".17g")


def serialize_problem(p):
    out = [f"mlp {VERSION}", f"kind {p.kind}", f"vars {p.m}", f"basis {p.basis}"]
    if p.kind == SYSTEM:
        out.append(f"eqs {p.s}")
        for j in range(p.s):
            out.append(f"poly {j + 1} terms {len(p.supports[j])}")
            for sup, coef in p.terms(j):
                c = coef[0, 0]
                out.append(" ".join(str(v) for v in sup) + f" {_num(c.real)} {_num(c.imag)}")
    else:
        out.append(f"size {p.k} {p.l}")
        out.append(f"terms {len(p.supports[0])}")
        for sup, coef in p.terms(0):
            out.append("support " + " ".join(str(v) for v in sup))
            for row in coef:
                out.append(" ".join(f"({_num(c.real)},{_num(c.imag)})" for c in row))
    return "\n".join(out) + "\n"


class _Lines:
    def __init__(self, text):
        self._items = []
        for no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self._items.append((no, body))
        self._pos = 0
        self.last = len(text.splitlines()) or 1

    def next(self, what):
        if self._pos >= len(self._items):
            raise FormatError(self.last, f"unexpected end of input, expected {what}")
        item = self._items[self._pos]
        self._pos += 1
        return item

    def keyword(self, key, nargs):
        no, body = self.next(f"'{key}'")
        parts = body.split()
        if parts[0] != key or (nargs is not None and len(parts) != nargs + 1):
            raise FormatError(no, f"expected '{key}' with {nargs} argument(s), got {body!r}")
        return no, parts[1:]

    def done(self):
        if self._pos < len(self._items):
            no, body = self._items[self._pos]
            raise FormatError(no, f"trailing content {body!r}")


def _ints(no, words, minimum=0):
    try:
        vals = [int(w) for w in words]
    except ValueError:
        raise FormatError(no, f"expected integers, got {' '.join(words)!r}") from None
    if any(v < minimum for v in vals):
        raise FormatError(no, f"integer below {minimum} in {' '.join(words)!r}")
    return vals


def _float(no, word):
    try:
        return float(word)
    except ValueError:
        raise FormatError(no, f"not a number: {word!r}") from None


def parse_problem(text):
    lines = _Lines(text)
    no, body = lines.next("'mlp <version>'")
    parts = body.split()
    if len(parts) != 2 or parts[0] != "mlp":
        raise FormatError(no, "missing 'mlp <version>' header")
    if parts[1] != str(VERSION):
        raise VersionError(no, f"unsupported MLP version {parts[1]!r}")
    no, (kind,) = lines.keyword("kind", 1)
    if kind not in (SYSTEM, MEP):
        raise FormatError(no, f"unknown kind {kind!r}")
    no, args = lines.keyword("vars", 1)
    (m,) = _ints(no, args, minimum=1)
    no, (basis,) = lines.keyword("basis", 1)
    if basis not in BASES:
        raise FormatError(no, f"unknown basis {basis!r}")

    if kind == SYSTEM:
        no, args = lines.keyword("eqs", 1)
        (s,) = _ints(no, args, minimum=1)
        equations = []
        for j in range(1, s + 1):
            no, body = lines.next(f"'poly {j} terms <t>'")
            parts = body.split()
            if len(parts) != 4 or parts[0] != "poly" or parts[2] != "terms":
                raise FormatError(no, f"expected 'poly {j} terms <t>', got {body!r}")
            idx, t = _ints(no, [parts[1], parts[3]])
            if idx != j:
                raise FormatError(no, f"equation number {idx}, expected {j}")
            terms = []
            for _ in range(t):
                no, body = lines.next("a term line")
                words = body.split()
                if len(words) != m + 2:
                    raise FormatError(no, f"term line needs {m} exponents and 2 numbers")
                sup = _ints(no, words[:m])
                terms.append((tuple(sup), complex(_float(no, words[m]), _float(no, words[m + 1]))))
            equations.append(terms)
        lines.done()
        try:
            return make_system(equations, m, basis)
        except ProblemError as exc:
            raise FormatError(no, str(exc)) from exc

    no, args = lines.keyword("size", 2)
    k, l = _ints(no, args, minimum=1)
    no, args = lines.keyword("terms", 1)
    (t,) = _ints(no, args, minimum=1)
    terms = []
    for _ in range(t):
        no, args = lines.keyword("support", m)
        sup = _ints(no, args)
        mat = np.empty((k, l), dtype=complex)
        for r in range(k):
            no, body = lines.next("a coefficient row")
            pairs = _PAIR.findall(body)
            if len(pairs) != l or _PAIR.sub("", body).strip():
                raise FormatError(no, f"expected {l} (re,im) pairs")
            mat[r] = [complex(_float(no, a), _float(no, b)) for a, b in pairs]
        terms.append((tuple(sup), mat))
    lines.done()
    try:
        return make_mep(terms, m, basis)
    except ProblemError as exc:
        raise FormatError(no, str(exc)) from exc
