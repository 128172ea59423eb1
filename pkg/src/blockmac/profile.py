"""Performance profiles and the configuration benchmark."""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import AllFailRow, MacaulayError

FAIL = np.inf


@dataclass(frozen=True, eq=False)
class ProfileTable:
    times: np.ndarray       # n_i x n_j, FAIL entries are +inf
    ratios: np.ndarray      # r_ij = t_ij / min_j' t_ij'
    taus: np.ndarray
    rho: np.ndarray         # len(taus) x n_j
    solvers: tuple
    excluded: tuple = ()

    def rho_at(self, tau):
        """Exact profile values ``rho_j(tau)`` for every solver."""
        return np.mean(self.ratios <= tau, axis=0) if len(self.ratios) else np.zeros(len(self.solvers))

    def to_csv(self):
        lines = [",".join(["tau"] + [f"rho_{s}" for s in self.solvers])]
        for tau, row in zip(self.taus, self.rho):
            lines.append(",".join([f"{tau:.6g}"] + [f"{v:.6g}" for v in row]))
        return "\n".join(lines) + "\n"


def tau_grid(tau_max=64.0, per_octave=8):
    """Log-spaced grid on ``[1, tau_max]`` that hits every power of two exactly."""
    octaves = np.log2(tau_max)
    n = int(np.ceil(octaves * per_octave))
    grid = np.exp2(np.arange(n + 1) / per_octave)
    grid[-1] = min(grid[-1], tau_max)
    return grid


def performance_profile(times, solvers=None, tau_max=64.0):
    times = np.array(times, dtype=float)
    times[~np.isfinite(times) | (times <= 0)] = FAIL
    n_j = times.shape[1]
    solvers = tuple(solvers) if solvers is not None else tuple(f"s{j + 1}" for j in range(n_j))
    # with a single solver an unsolved problem is information, not noise
    failed = ~np.isfinite(times).any(axis=1) if n_j > 1 else np.zeros(len(times), dtype=bool)
    if failed.any():
        warnings.warn(AllFailRow(f"{int(failed.sum())} problem(s) unsolved by every solver excluded"))
    kept = times[~failed]
    best = kept.min(axis=1, keepdims=True) if len(kept) else np.ones((0, 1))
    with np.errstate(invalid="ignore"):
        ratios = kept / best
    ratios[~np.isfinite(kept)] = np.inf
    taus = tau_grid(tau_max)
    rho = np.array([np.mean(ratios <= t, axis=0) if len(ratios) else np.zeros(n_j) for t in taus])
    return ProfileTable(times, ratios, taus, rho, solvers, tuple(np.flatnonzero(failed)))


def relative_times(times):
    """Times divided by the slowest finished configuration of each problem."""
    times = np.array(times, dtype=float)
    out = np.full_like(times, np.nan)
    for i, row in enumerate(times):
        ok = np.isfinite(row)
        if ok.any():
            out[i, ok] = row[ok] / row[ok].max()
    return out


def time_solve(problem, opts, timeout=300.0, warmup=True):
    """Wall time of one solve, or ``FAIL`` on solver error or timeout.

    The timeout is checked after the call returns; a runaway solve is not
    interrupted.
    """
    from .realization import solve

    try:
        if warmup:
            solve(problem, opts)
        t0 = time.perf_counter()
        solve(problem, opts)
        elapsed = time.perf_counter() - t0
    except (MacaulayError, np.linalg.LinAlgError):
        return FAIL
    return elapsed if elapsed <= timeout else FAIL


def bench(problems, configurations, timeout=300.0, warmup=True, parallel=False):
    """Time every ``(problem, configuration)`` pair.

    ``problems`` maps names to problems, ``configurations`` maps labels to
    :class:`SolverOptions`.  Cells run sequentially unless ``parallel`` is set,
    in which case distinct problems run concurrently (the configurations of
    one problem always stay sequential).  Returns the raw time table, the
    relative-time table and the performance profile.
    """
    names = list(problems)
    labels = list(configurations)

    def row(name):
        return [time_solve(problems[name], configurations[lab], timeout, warmup) for lab in labels]

    if parallel:
        with ThreadPoolExecutor() as pool:
            rows = list(pool.map(row, names))
    else:
        rows = [row(name) for name in names]
    times = np.array(rows, dtype=float).reshape(len(names), len(labels))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AllFailRow)
        profile = performance_profile(times, labels)
    return times, relative_times(times), profile
