"""Finite probability spaces and scalar random variables on them.

Everything in this package works over an explicit finite sample space:
atoms with strictly positive probabilities summing to one.  A random
variable is a plain value-per-atom vector.  All objects are immutable
values and every operation is a pure function, so concurrent evaluation
needs no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "FiniteProbSpace",
    "Rv",
    "Partition",
    "expectation",
    "pairing",
    "conditional_expectation",
    "indicator",
]


@dataclass(frozen=True)
class Tolerances:
    """Central numeric policy, overridable per call.

    linear:    absolute tolerance for identities exact up to rounding
    optim:     tolerance for quantities produced by an optimizer
    gauge_rel: relative bracket width at which gauge bisections stop
    golden:    absolute tolerance of one-dimensional golden-section searches
    """

    linear: float = 1e-12
    optim: float = 1e-8
    gauge_rel: float = 1e-12
    golden: float = 1e-9


DEFAULT_TOL = Tolerances()


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteProbSpace:
    """Atoms with strictly positive probabilities summing to one."""

    probs: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        probs = _frozen_array(self.probs, "probs")
        if probs.size == 0:
            raise ValueError("a probability space needs at least one atom")
        if not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite")
        # Zero-probability atoms are rejected: values are identified up to
        # null sets, and a zero atom would make quantile functions ambiguous.
        if np.any(probs <= 0.0):
            raise ValueError("all atom probabilities must be strictly positive")
        if abs(float(probs.sum()) - 1.0) > DEFAULT_TOL.linear:
            raise ValueError(f"probabilities must sum to 1, got {probs.sum()!r}")
        object.__setattr__(self, "probs", probs)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != probs.size:
                raise ValueError("labels must match the number of atoms")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, n: int, labels: Sequence[str] | None = None) -> "FiniteProbSpace":
        if n < 1:
            raise ValueError("need at least one atom")
        return cls(np.full(n, 1.0 / n), None if labels is None else tuple(labels))

    @property
    def n_atoms(self) -> int:
        return int(self.probs.size)

    @property
    def is_uniform(self) -> bool:
        return bool(np.ptp(self.probs) <= DEFAULT_TOL.linear)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"FiniteProbSpace(n={self.n_atoms})"


@dataclass(frozen=True, eq=False)
class Rv:
    """A real random variable: one finite value per atom."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = _frozen_array(self.values, "values")
        if not np.all(np.isfinite(values)):
            raise ValueError("random variable values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, c: float, n: int) -> "Rv":
        return cls(np.full(n, float(c)))

    @classmethod
    def zero(cls, n: int) -> "Rv":
        return cls(np.zeros(n))

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint nonempty blocks of atom indices; coverage is checked per space."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(int(i) for i in block) for block in self.blocks)
        if not blocks:
            raise ValueError("a partition needs at least one block")
        seen: set[int] = set()
        for block in blocks:
            if not block:
                raise ValueError("partition blocks must be nonempty")
            for i in block:
                if i < 0:
                    raise ValueError("atom indices must be nonnegative")
                if i in seen:
                    raise ValueError(f"atom {i} appears in more than one block")
                seen.add(i)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple((i,) for i in range(n)))

    def covered_atoms(self) -> set[int]:
        return {i for block in self.blocks for i in block}


def _check_on_space(space: FiniteProbSpace, u: Rv, name: str = "u") -> None:
    if len(u) != space.n_atoms:
        raise ValueError(
            f"{name} has {len(u)} values but the space has {space.n_atoms} atoms"
        )


def expectation(space: FiniteProbSpace, u: Rv) -> float:
    """E[u] under the space's probabilities."""
    _check_on_space(space, u)
    return float(np.dot(space.probs, u.values))


def pairing(space: FiniteProbSpace, u: Rv, y: Rv) -> float:
    """The bilinear form E[u*y]; symmetric in its two arguments."""
    _check_on_space(space, u, "u")
    _check_on_space(space, y, "y")
    return float(np.dot(space.probs, u.values * y.values))


def conditional_expectation(space: FiniteProbSpace, u: Rv, g: Partition) -> Rv:
    """Average u over each block of g; constant on blocks, linear in u."""
    _check_on_space(space, u)
    covered = g.covered_atoms()
    if covered != set(range(space.n_atoms)):
        raise ValueError("partition does not cover every atom of the space")
    out = np.empty(space.n_atoms)
    for block in g.blocks:
        idx = np.asarray(block, dtype=int)
        block_prob = float(space.probs[idx].sum())
        out[idx] = float(np.dot(space.probs[idx], u.values[idx])) / block_prob
    return Rv(out)


def indicator(space: FiniteProbSpace, atoms: Iterable[int]) -> Rv:
    """The 0/1 random variable of the given atom index set."""
    out = np.zeros(space.n_atoms)
    for i in atoms:
        i = int(i)
        if not 0 <= i < space.n_atoms:
            raise ValueError(f"atom index {i} out of range")
        out[i] = 1.0
    return Rv(out)
