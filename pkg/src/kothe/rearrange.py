"""Distribution functions, decreasing rearrangements and tail functionals.

The decreasing rearrangement (quantile function) of a random variable on a
finite space is represented exactly as a right-continuous nonincreasing step
function on [0, 1).  Keeping it exact removes discretization error from every
norm built on top of it: all integrals against a step function are closed
form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .space import FiniteProbSpace, Rv, _check_on_space

__all__ = [
    "StepFunction",
    "distribution_fn",
    "quantile",
    "quantile_integral",
    "cvar_infimum",
    "hardy_littlewood_sup",
]


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous step function on [0, 1).

    ``values[k]`` is the value on ``[breakpoints[k], breakpoints[k+1])``.
    Breakpoints are strictly increasing, starting at 0 and ending at 1.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        bp = np.array(self.breakpoints, dtype=float)
        vals = np.array(self.values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1 or bp.size != vals.size + 1:
            raise ValueError("need K+1 breakpoints for K plateau values")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __call__(self, t: float) -> float:
        """Value at t in [0, 1); t = 1 returns the last plateau value."""
        if not 0.0 <= t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        k = min(max(k, 0), self.values.size - 1)
        return float(self.values[k])

    def integral(self, t: float) -> float:
        """Exact integral over [0, t]; piecewise linear in t."""
        if not -1e-12 <= t <= 1.0 + 1e-12:
            raise ValueError("t must lie in [0, 1]")
        t = min(max(t, 0.0), 1.0)
        cum = self._cumulative()
        k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        k = min(max(k, 0), self.values.size - 1)
        return float(cum[k] + self.values[k] * (t - self.breakpoints[k]))

    def integrals_at_breakpoints(self) -> np.ndarray:
        """Integral values at every breakpoint, starting with 0."""
        cum = self._cumulative()
        return np.append(cum, cum[-1] + self.values[-1] * (1.0 - self.breakpoints[-2]))

    def _cumulative(self) -> np.ndarray:
        seg = self.values[:-1] * np.diff(self.breakpoints)[:-1]
        return np.concatenate([[0.0], np.cumsum(seg)])


def _quantile_levels(probs: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct |values| levels in descending order with their total masses."""
    a = np.abs(np.asarray(values, dtype=float))
    neg_levels, inverse = np.unique(-a, return_inverse=True)
    weights = np.bincount(inverse, weights=probs)
    return -neg_levels, weights


def distribution_fn(space: FiniteProbSpace, u: Rv, tau: float) -> float:
    """P(|u| > tau), with strict inequality."""
    _check_on_space(space, u)
    return float(space.probs[np.abs(u.values) > tau].sum())


def quantile(space: FiniteProbSpace, u: Rv) -> StepFunction:
    """Decreasing rearrangement of |u| as an exact step function.

    Atoms with equal |u| merge into a single plateau, so the representation
    is deterministic under permutations of equal values.
    """
    _check_on_space(space, u)
    levels, weights = _quantile_levels(space.probs, u.values)
    bp = np.concatenate([[0.0], np.cumsum(weights)])
    bp[-1] = 1.0  # guard against cumulative rounding
    return StepFunction(bp, levels)


def quantile_integral(q: StepFunction, t: float) -> float:
    """Running integral of a quantile step function over [0, t]."""
    return q.integral(t)


def cvar_infimum(space: FiniteProbSpace, u: Rv, t: float) -> float:
    """inf over s >= 0 of t*s + E[|u| - s]^+.

    The objective is piecewise linear and convex in s with kinks exactly at
    the values of |u|, so the infimum is attained on the finite candidate set
    {0} union {distinct |u| values} and is computed there exactly.
    """
    _check_on_space(space, u)
    if t <= 0.0:
        raise ValueError("t must be positive")
    if t > 1.0:
        raise ValueError("t must not exceed 1")
    a = np.abs(u.values)
    candidates = np.concatenate([[0.0], np.unique(a)])
    excess = np.clip(a[None, :] - candidates[:, None], 0.0, None)
    objective = t * candidates + excess @ space.probs
    return float(objective.min())


def hardy_littlewood_sup(space: FiniteProbSpace, u: Rv, y: Rv) -> float:
    """Integral of the product of the two decreasing rearrangements.

    Only defined here on spaces with equal atom probabilities, where it
    reduces to the comonotone (sorted-descending) dot product divided by the
    number of atoms, and upper-bounds E[(u o pi) * y] over permutations pi.
    """
    _check_on_space(space, u, "u")
    _check_on_space(space, y, "y")
    if not space.is_uniform:
        raise ValueError("rearrangement supremum requires equal atom probabilities")
    us = np.sort(np.abs(u.values))[::-1]
    ys = np.sort(np.abs(y.values))[::-1]
    return float(np.dot(us, ys) / space.n_atoms)
