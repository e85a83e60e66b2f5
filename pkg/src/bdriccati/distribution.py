from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Distribution",
    "PositivityError",
    "NonpositiveDenominator",
    "NonpositivePivot",
]


class PositivityError(ArithmeticError):
    """A formula would produce a zero or negative probability weight."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class NonpositiveDenominator(PositivityError):
    """The renormalization factor at ``index`` is singular or negative."""

    def __init__(self, index: int, value: float):
        super().__init__(
            f"denominator |D| + S_i - f_i b_i/d_(i+1) = {value!r} <= 0 at i = {index}; "
            "no positive parametric solution for this (schedule, D)",
            index,
        )
        self.value = value


class NonpositivePivot(PositivityError):
    def __init__(self, index: int, value: float):
        super().__init__(
            f"pivot y_n + (sigma_(n+1) - 1)/b_n = {value!r} <= 0 at n = {index}; "
            "sequence does not generate a positive distribution",
            index,
        )
        self.value = value


@dataclass(frozen=True, eq=False)
class Distribution:
    """Normalized probability vector over states ``0..N``.

    ``norm_constant`` is the prefactor multiplying the unnormalized weights
    (which start at ``weights[0] = 1`` for the product formulas).
    """

    p: np.ndarray
    norm_constant: float
    provenance: str
    weights: np.ndarray | None = None

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_weights(cls, w, provenance: str) -> "Distribution":
        w = np.asarray(w, dtype=float)
        total = float(np.sum(w))
        if not np.isfinite(total) or total <= 0:
            raise ValueError(f"weights must have a finite positive sum, got {total!r}")
        return cls(w / total, 1.0 / total, provenance, w)

    @property
    def N(self) -> int:
        return len(self.p) - 1

    def __len__(self):
        return len(self.p)

    def __array__(self, dtype=None, copy=None):
        return self.p if dtype is None else self.p.astype(dtype)

    def __repr__(self):
        return f"Distribution(N={self.N}, provenance={self.provenance!r})"
