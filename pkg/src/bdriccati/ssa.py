"""Exact stochastic simulation (Gillespie) of a birth-death chain."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distribution import Distribution
from .schedules import RateSchedule

__all__ = [
    "Trajectory",
    "gillespie_run",
    "empirical_stationary",
    "total_variation",
    "write_trajectory_csv",
    "RNG_ALGORITHM",
]

RNG_ALGORITHM = "PCG64"
_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Jump records ``(times[k], states[k])``; ``times[0] = 0`` is the initial state.

    The last state is held until ``t_end``.  ``frozen`` is set when the chain
    reached a state with zero total rate.
    """

    times: np.ndarray
    states: np.ndarray
    seed: int
    schedule_id: str
    N: int
    t_end: float
    frozen: bool = False
    rng_algorithm: str = RNG_ALGORITHM

    @property
    def n_jumps(self) -> int:
        return len(self.times) - 1

    def __post_init__(self):
        for name in ("times", "states"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def gillespie_run(s: RateSchedule, n0: int, t_max: float, seed: int) -> Trajectory:
    """Simulate the chain from ``n0`` until ``t_max``.

    At state ``n`` the total rate is ``b_n [n < N] + d_n [n > 0]``; the
    waiting time is exponential with that rate and the jump goes up with
    probability ``b_n / R``.
    """
    N = s.N
    if not 0 <= n0 <= N:
        raise ValueError(f"initial state {n0} outside [0, {N}]")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    up = [s.b(n) if n < N else 0.0 for n in range(N + 1)]
    down = [s.d(n) for n in range(N + 1)]
    total = [u + d for u, d in zip(up, down)]
    p_up = [u / r if r > 0 else 0.0 for u, r in zip(up, total)]

    rng = np.random.Generator(np.random.PCG64(seed))
    times = [0.0]
    states = [n0]
    t, n = 0.0, n0
    frozen = False
    while True:
        exps = rng.standard_exponential(_CHUNK).tolist()
        unis = rng.random(_CHUNK).tolist()
        done = False
        for e, u in zip(exps, unis):
            r = total[n]
            if r <= 0.0:
                frozen = done = True
                break
            t += e / r
            if t >= t_max:
                done = True
                break
            n = n + 1 if u < p_up[n] else n - 1
            times.append(t)
            states.append(n)
        if done:
            break
    return Trajectory(
        np.array(times), np.array(states, dtype=np.int64), seed, s.label, N, float(t_max), frozen
    )


def empirical_stationary(tr: Trajectory, burn_in: float | None = None) -> Distribution:
    """Time-weighted occupation fractions after ``burn_in`` (default 10% of the run)."""
    if burn_in is None:
        burn_in = 0.1 * tr.t_end
    if not burn_in < tr.t_end:
        raise ValueError(f"burn_in {burn_in} leaves an empty window (t_end = {tr.t_end})")
    starts = np.maximum(tr.times, burn_in)
    ends = np.maximum(np.append(tr.times[1:], tr.t_end), burn_in)
    durations = ends - starts
    occ = np.bincount(tr.states, weights=durations, minlength=tr.N + 1)
    return Distribution.from_weights(occ, "empirical")


def total_variation(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return 0.5 * float(np.sum(np.abs(p - q)))


def write_trajectory_csv(tr: Trajectory, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "state"])
        for t, n in zip(tr.times.tolist(), tr.states.tolist()):
            w.writerow([format(t, ".17g"), n])
