"""Birth-death rate schedules.

A schedule describes a finite chain on states ``0..N`` with birth rates
``b_i`` (jump ``i -> i+1``) and death rates ``d_i`` (jump ``i -> i-1``).
Rates are stored two indices past the chain end (``b`` through ``N+1``,
``d`` through ``N+2``) because the product/sum terms of the Riccati
solution reach that far.  The boundary conventions ``b_{-1} = 0`` and
``d_0 = 0`` are enforced by the accessors, never by the stored arrays.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

__all__ = [
    "ScheduleError",
    "RateSchedule",
    "PositivityReport",
    "make_constant",
    "make_asymmetric",
    "make_offset_exponential",
    "make_explicit",
    "load_schedule",
    "save_schedule",
    "schedule_to_dict",
    "check_positivity_condition",
]

KINDS = ("constant", "asymmetric", "offset_exponential", "explicit")


class ScheduleError(ValueError):
    """Invalid schedule parameters or config document.

    ``index`` names the offending rate index when there is one.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RateSchedule:
    """Immutable birth/death rates of a chain with states ``0..N``.

    Parameters
    ----------
    N : int
        Index of the last state.
    birth : array of length ``N + 2``
        Stored ``b_0 .. b_{N+1}``.
    death : array of length ``N + 3``
        Stored ``d_0 .. d_{N+2}``.  ``death[0]`` is kept for completeness but
        the accessor :meth:`d` returns 0 there.
    label : str
        Human-readable family name.
    params : dict
        Builder parameters, used to serialize the schedule compactly.
    """

    N: int
    birth: np.ndarray
    death: np.ndarray
    label: str = "explicit"
    kind: str = "explicit"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "birth", _frozen(self.birth))
        object.__setattr__(self, "death", _frozen(self.death))
        _validate(self.N, self.birth, self.death)

    def b(self, i: int) -> float:
        if i == -1:
            return 0.0
        if not 0 <= i <= self.N + 1:
            raise IndexError(f"birth rate index {i} outside [-1, {self.N + 1}]")
        return float(self.birth[i])

    def d(self, i: int) -> float:
        if i == 0:
            return 0.0
        if not 1 <= i <= self.N + 2:
            raise IndexError(f"death rate index {i} outside [0, {self.N + 2}]")
        return float(self.death[i])

    def sigma(self, n: int) -> float:
        return self.b(n) + self.d(n)

    def ratio(self, i: int) -> float:
        """Detailed-balance ratio ``b_i / d_{i+1}``."""
        return self.b(i) / self.d(i + 1)

    @property
    def n_states(self) -> int:
        return self.N + 1

    def __eq__(self, other):
        if not isinstance(other, RateSchedule):
            return NotImplemented
        return (
            self.N == other.N
            and np.array_equal(self.birth, other.birth)
            and np.array_equal(self.death, other.death)
        )

    def __hash__(self):
        return hash((self.N, self.birth.tobytes(), self.death.tobytes()))

    def __repr__(self):
        return f"RateSchedule(label={self.label!r}, N={self.N})"


def _validate(N, birth, death):
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool) or N < 1:
        raise ScheduleError(f"N must be an integer >= 1, got {N!r}")
    if birth.ndim != 1 or len(birth) != N + 2:
        raise ScheduleError(f"birth array must have length N+2 = {N + 2}, got {len(birth)}")
    if death.ndim != 1 or len(death) != N + 3:
        raise ScheduleError(f"death array must have length N+3 = {N + 3}, got {len(death)}")
    for name, arr in (("birth", birth), ("death", death)):
        bad = np.flatnonzero(~np.isfinite(arr) | (arr < 0))
        if bad.size:
            i = int(bad[0])
            raise ScheduleError(f"{name} rate at index {i} is {arr[i]!r}; rates must be finite and >= 0", i)
    # b_{i+1} divides in the f-products up to b_N; d_{k+2} up to d_{N+1}.
    zero_b = np.flatnonzero(birth[: N + 1] <= 0)
    if zero_b.size:
        i = int(zero_b[0])
        raise ScheduleError(f"birth rate b_{i} must be > 0 on [0, N]", i)
    zero_d = np.flatnonzero(death[1 : N + 2] <= 0)
    if zero_d.size:
        i = int(zero_d[0]) + 1
        raise ScheduleError(f"death rate d_{i} must be > 0 on [1, N+1]", i)


def make_constant(b_val: float, N: int) -> RateSchedule:
    """``b_i = d_i = b_val`` everywhere, with ``0 < b_val < 1``."""
    if not 0 < b_val < 1:
        raise ScheduleError(f"constant rate must lie in (0, 1), got {b_val}")
    if N < 1:
        raise ScheduleError(f"N must be >= 1, got {N}")
    return RateSchedule(
        N,
        np.full(N + 2, float(b_val)),
        np.full(N + 3, float(b_val)),
        label=f"constant b=d={b_val!r}",
        kind="constant",
        params={"b": float(b_val)},
    )


def asymmetry_q(epsilon: float) -> float:
    return (1.0 - epsilon) / (1.0 + epsilon)


def make_asymmetric(epsilon: float, N: int) -> RateSchedule:
    """Biased walk ``b = (1+eps)/2``, ``d = (1-eps)/2``."""
    if not 0 < epsilon < 1:
        raise ScheduleError(f"epsilon must lie in (0, 1), got {epsilon}")
    if N < 1:
        raise ScheduleError(f"N must be >= 1, got {N}")
    q = asymmetry_q(epsilon)
    return RateSchedule(
        N,
        np.full(N + 2, 0.5 * (1.0 + epsilon)),
        np.full(N + 3, 0.5 * (1.0 - epsilon)),
        label=f"asymmetric eps={epsilon!r} q={q!r}",
        kind="asymmetric",
        params={"epsilon": float(epsilon), "q": q},
    )


def make_offset_exponential(c_b, alpha_b, c_d, alpha_d, power, N) -> RateSchedule:
    """``b_i = c_b + exp(-alpha_b i^power)``, likewise for ``d_i``."""
    if c_b < 0 or c_d < 0:
        raise ScheduleError("offsets c_b, c_d must be >= 0")
    if alpha_b <= 0 or alpha_d <= 0:
        raise ScheduleError("decay constants alpha_b, alpha_d must be > 0")
    if power not in (1, 0.5):
        raise ScheduleError(f"power must be 1 or 1/2, got {power}")
    if N < 1:
        raise ScheduleError(f"N must be >= 1, got {N}")
    i = np.arange(N + 3, dtype=float)
    ip = i if power == 1 else np.sqrt(i)
    birth = c_b + np.exp(-alpha_b * ip[: N + 2])
    death = c_d + np.exp(-alpha_d * ip)
    root = "i" if power == 1 else "sqrt(i)"
    label = f"b_i={c_b!r}+exp(-{alpha_b!r}*{root}), d_i={c_d!r}+exp(-{alpha_d!r}*{root})"
    return RateSchedule(
        N,
        birth,
        death,
        label=label,
        kind="offset_exponential",
        params={
            "c_b": float(c_b),
            "alpha_b": float(alpha_b),
            "c_d": float(c_d),
            "alpha_d": float(alpha_d),
            "power": float(power),
        },
    )


def make_explicit(b, d, N: int, label: str = "explicit") -> RateSchedule:
    """Schedule from explicit arrays; extra trailing entries are ignored."""
    b = np.asarray(b, dtype=float)
    d = np.asarray(d, dtype=float)
    if len(b) < N + 2:
        raise ScheduleError(f"explicit b needs at least N+2 = {N + 2} entries, got {len(b)}")
    if len(d) < N + 3:
        raise ScheduleError(f"explicit d needs at least N+3 = {N + 3} entries, got {len(d)}")
    return RateSchedule(N, b[: N + 2], d[: N + 3], label=label, kind="explicit")


def schedule_to_dict(s: RateSchedule) -> dict:
    if s.kind == "explicit":
        return {
            "kind": "explicit",
            "N": s.N,
            "label": s.label,
            "b": s.birth.tolist(),
            "d": s.death.tolist(),
        }
    out = {"kind": s.kind, "N": s.N}
    out.update({k: v for k, v in s.params.items() if k != "q"})
    return out


def _require(doc, key, kind):
    if key not in doc:
        raise ScheduleError(f"schedule of kind {kind!r} is missing field {key!r}")
    return doc[key]


def schedule_from_dict(doc: Mapping[str, Any]) -> RateSchedule:
    if not isinstance(doc, Mapping):
        raise ScheduleError("schedule document must be a mapping")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScheduleError(f"unknown schedule kind {kind!r}; expected one of {KINDS}")
    N = _require(doc, "N", kind)
    if not isinstance(N, int) or isinstance(N, bool):
        raise ScheduleError(f"N must be an integer, got {N!r}")
    if kind == "constant":
        return make_constant(float(_require(doc, "b", kind)), N)
    if kind == "asymmetric":
        return make_asymmetric(float(_require(doc, "epsilon", kind)), N)
    if kind == "offset_exponential":
        keys = ("c_b", "alpha_b", "c_d", "alpha_d", "power")
        vals = [float(_require(doc, k, kind)) for k in keys]
        return make_offset_exponential(*vals, N)
    b = _require(doc, "b", kind)
    d = _require(doc, "d", kind)
    if not isinstance(b, list) or not isinstance(d, list):
        raise ScheduleError("explicit b and d must be lists of numbers")
    try:
        b = [float(x) for x in b]
        d = [float(x) for x in d]
    except (TypeError, ValueError) as exc:
        raise ScheduleError(f"explicit rates must be numbers: {exc}") from None
    return make_explicit(b, d, N, label=str(doc.get("label", "explicit")))


def load_schedule(source) -> RateSchedule:
    """Build a schedule from a mapping, a JSON string, or a path to a JSON file."""
    if isinstance(source, Mapping):
        return schedule_from_dict(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"malformed schedule document: {exc}") from None
    return schedule_from_dict(doc)


def save_schedule(s: RateSchedule, path=None) -> str:
    """Serialize to JSON; also writes ``path`` when given."""
    text = json.dumps(schedule_to_dict(s), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


@dataclass(frozen=True)
class PositivityReport:
    """Per-index outcome of ``b_i/d_{i+1} >= b_{i-1}/d_i`` for ``1 <= i <= N-1``.

    The condition is advisory: a failing index does not by itself mean the
    parametric solution is negative.
    """

    indices: np.ndarray
    holds: np.ndarray
    advisory: bool = True

    @property
    def verdict(self) -> bool:
        return bool(np.all(self.holds))

    @property
    def violations(self) -> list[int]:
        return [int(i) for i in self.indices[~self.holds]]


def check_positivity_condition(s: RateSchedule) -> PositivityReport:
    idx = np.arange(1, s.N)
    ratios = s.birth[: s.N] / s.death[1 : s.N + 1]  # b_i / d_{i+1}, i = 0..N-1
    holds = ratios[1:] >= ratios[:-1]
    return PositivityReport(idx, holds)
