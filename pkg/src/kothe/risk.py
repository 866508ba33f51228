"""Convex risk measures, their induced norms, penalties and dual norms.

A risk measure here is convex, nondecreasing, translation-equivariant on
constants and zero at zero.  Average value-at-risk and the entropic measure
are built in; arbitrary callables can be wrapped, with their declared
properties verified by the randomized axiom checker rather than trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from ._optim import ConvergenceError, bisect_gauge, minimize_scalar_convex
from .space import DEFAULT_TOL, FiniteProbSpace, Rv, Tolerances, _check_on_space

__all__ = [
    "RiskMeasureSpec",
    "avar",
    "entropic",
    "custom_risk",
    "evaluate_risk",
    "risk_norm",
    "PenaltyResult",
    "penalty",
    "penalty_gauge",
    "RiskDualResult",
    "risk_dual_norm",
    "RiskAxiomReport",
    "check_risk_axioms",
]

_INF = math.inf


@dataclass(frozen=True, eq=False)
class RiskMeasureSpec:
    """Tagged risk measure; build with avar(), entropic() or custom_risk()."""

    kind: str
    level: float = math.nan
    theta: float = math.nan
    fn: Callable[[FiniteProbSpace, np.ndarray], float] | None = None
    law_invariant: bool = True
    positively_homogeneous: bool = False

    @property
    def name(self) -> str:
        if self.kind == "avar":
            return f"avar({self.level:g})"
        if self.kind == "entropic":
            return f"entropic({self.theta:g})"
        return "custom-risk"


def avar(level: float) -> RiskMeasureSpec:
    """Average value-at-risk: the mean of the worst ``level`` tail."""
    if not 0.0 < level <= 1.0:
        raise ValueError("the tail level must lie in (0, 1]")
    return RiskMeasureSpec("avar", level=float(level), positively_homogeneous=True)


def entropic(theta: float) -> RiskMeasureSpec:
    """Entropic risk (1/theta) log E[exp(theta u)]."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    return RiskMeasureSpec("entropic", theta=float(theta))


def custom_risk(
    fn: Callable[[FiniteProbSpace, np.ndarray], float],
    *,
    law_invariant: bool = False,
    positively_homogeneous: bool = False,
) -> RiskMeasureSpec:
    return RiskMeasureSpec(
        "custom",
        fn=fn,
        law_invariant=law_invariant,
        positively_homogeneous=positively_homogeneous,
    )


def _avar_arr(probs: np.ndarray, x: np.ndarray, t: float) -> float:
    """min over s in the values of x of s + E[x - s]^+ / t.

    The objective is piecewise linear convex with kinks at the values of x,
    and its slope is nonnegative past the largest value, so the candidate
    grid of distinct values contains a minimizer.
    """
    candidates = np.unique(x)
    excess = np.clip(x[None, :] - candidates[:, None], 0.0, None)
    return float((candidates + (excess @ probs) / t).min())


def _entropic_arr(probs: np.ndarray, x: np.ndarray, theta: float) -> float:
    m = float(np.max(theta * x))
    return (m + math.log(float(np.dot(probs, np.exp(theta * x - m))))) / theta


def _risk_arr(space: FiniteProbSpace, rho: RiskMeasureSpec, x: np.ndarray) -> float:
    if rho.kind == "avar":
        return _avar_arr(space.probs, x, rho.level)
    if rho.kind == "entropic":
        return _entropic_arr(space.probs, x, rho.theta)
    assert rho.fn is not None
    return float(rho.fn(space, x))


def evaluate_risk(space: FiniteProbSpace, rho: RiskMeasureSpec, u: Rv) -> float:
    """The risk of u; the tail-mean form for avar, log-exponential otherwise."""
    _check_on_space(space, u)
    return _risk_arr(space, rho, u.values)


def _risk_norm_arr(
    space: FiniteProbSpace,
    rho: RiskMeasureSpec,
    x_abs: np.ndarray,
    tol: Tolerances,
) -> float:
    if not np.any(x_abs > 0.0):
        return 0.0
    if rho.positively_homogeneous:
        # the gauge of a positively homogeneous rho is rho itself
        return _risk_arr(space, rho, x_abs)
    if rho.kind == "entropic":
        return _entropic_gauge(space.probs, x_abs, rho.theta, tol)
    hi0 = max(float(x_abs.max()), abs(_risk_arr(space, rho, x_abs)), 1e-12)
    return bisect_gauge(
        lambda b: _risk_arr(space, rho, x_abs / b) <= 1.0,
        hi0=hi0,
        rel_tol=tol.gauge_rel,
    )


def _entropic_gauge(probs: np.ndarray, a: np.ndarray, theta: float, tol: Tolerances) -> float:
    """Solve rho(a/beta) = 1 by safeguarded Newton in s = 1/beta."""

    def g(s: float) -> float:
        return _entropic_arr(probs, s * a, theta) - 1.0

    def gprime(s: float) -> float:
        w = theta * s * a
        m = float(w.max())
        e = probs * np.exp(w - m)
        return float(np.dot(e, a) / e.sum())

    s_hi = 1.0 / float(a.max())
    while g(s_hi) < 0.0:
        s_hi *= 2.0
    s_lo = s_hi / 2.0
    while g(s_lo) > 0.0:
        s_hi = s_lo
        s_lo /= 2.0
        if s_lo < 1e-300:
            return _INF
    s = 0.5 * (s_lo + s_hi)
    for _ in range(80):
        val = g(s)
        if val > 0.0:
            s_hi = s
        else:
            s_lo = s
        step = val / gprime(s)
        s_new = s - step
        if not s_lo < s_new < s_hi:
            s_new = 0.5 * (s_lo + s_hi)
        if abs(s_new - s) <= tol.gauge_rel * s:
            s = s_new
            break
        s = s_new
    return 1.0 / s


def risk_norm(
    space: FiniteProbSpace,
    rho: RiskMeasureSpec,
    u: Rv,
    *,
    tol: Tolerances = DEFAULT_TOL,
    method: str = "auto",
) -> float:
    """inf{beta > 0 : rho(|u|/beta) <= 1}.

    ``method="bisect"`` forces the gauge bisection even where a shortcut is
    exact (positively homogeneous rho); used by tests as a cross-check.
    """
    _check_on_space(space, u)
    x_abs = np.abs(u.values)
    if method == "bisect":
        if not np.any(x_abs > 0.0):
            return 0.0
        hi0 = max(float(x_abs.max()), 1e-12)
        return bisect_gauge(
            lambda b: _risk_arr(space, rho, x_abs / b) <= 1.0,
            hi0=hi0,
            rel_tol=tol.gauge_rel,
        )
    return _risk_norm_arr(space, rho, x_abs, tol)


@dataclass(frozen=True, eq=False)
class PenaltyResult:
    """Outcome of the penalty supremum, with a certificate ray when infinite."""

    value: float
    bounded: bool
    ray: np.ndarray | None
    maximizer: np.ndarray | None = None


@lru_cache(maxsize=8)
def _subset_matrix(n: int) -> np.ndarray:
    masks = np.arange(1, 2**n, dtype=np.uint32)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def _penalty_value(space: FiniteProbSpace, rho: RiskMeasureSpec, xi: np.ndarray, z: np.ndarray) -> float:
    return float(np.dot(space.probs, xi * z)) - _risk_arr(space, rho, xi)


def _confirm_ray(space: FiniteProbSpace, rho: RiskMeasureSpec, xi: np.ndarray, z: np.ndarray) -> bool:
    v1 = _penalty_value(space, rho, xi, z)
    v2 = _penalty_value(space, rho, 2.0 * xi, z)
    v4 = _penalty_value(space, rho, 4.0 * xi, z)
    return v4 > v2 > v1 > 0.0


def penalty(
    space: FiniteProbSpace,
    rho: RiskMeasureSpec,
    y: Rv,
    *,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> PenaltyResult:
    """sup over nonnegative bounded xi of E[xi*y] - rho(xi), for y >= 0.

    For avar the candidate grid is built on scaled subset indicators: the
    objective is concave, positively homogeneous and linear on every
    arrangement cone, so a positive direction exists iff some indicator gives
    one (the avar values of indicators form a polymatroid bound).  Growth
    along the doubled ray certifies an infinite supremum.  The entropic case
    is a smooth concave maximization, solved by projected gradient ascent; it
    is unbounded exactly when E[y] > 1, along the constants ray.
    """
    _check_on_space(space, y, "y")
    z = y.values
    if np.any(z < 0.0):
        raise ValueError("the penalty argument must be nonnegative atomwise")
    if not np.any(z > 0.0):
        return PenaltyResult(0.0, True, None, np.zeros(space.n_atoms))
    scale = float(z.max())

    if rho.kind == "entropic":
        if float(np.dot(space.probs, z)) > 1.0 + 1e-12:
            ray = np.ones(space.n_atoms)
            assert _confirm_ray(space, rho, ray, z)
            return PenaltyResult(_INF, False, ray)
        return _penalty_entropic(space, rho.theta, z)

    n = space.n_atoms
    rng = np.random.default_rng(seed)
    threshold = 1e-11 * max(scale, 1.0)
    best_val, best_xi = 0.0, None

    # indicator directions are checked first: they span the growth cone for
    # tail-mean measures and give the cleanest certificates
    if rho.kind == "avar" and n <= 16:
        m = _subset_matrix(n)
        sums = m @ (space.probs * z)
        bound = np.minimum(m @ space.probs, rho.level) / rho.level
        viol = sums - bound
        k = int(np.argmax(viol))
        if viol[k] > threshold and _confirm_ray(space, rho, m[k], z):
            return PenaltyResult(_INF, False, m[k])
        best_val, best_xi = max(float(viol[k]), 0.0), m[k]
    else:
        indicators: list[np.ndarray] = []
        order = np.argsort(-z)
        for j in range(1, n + 1):
            xi = np.zeros(n)
            xi[order[:j]] = 1.0
            indicators.append(xi)
        for _ in range(128):
            indicators.append((rng.random(n) < 0.5).astype(float))
        for xi in indicators:
            v = _penalty_value(space, rho, xi, z)
            if v > best_val:
                best_val, best_xi = v, xi
            if v > threshold and _confirm_ray(space, rho, xi, z):
                return PenaltyResult(_INF, False, xi)

    extras: list[np.ndarray] = [z / scale]
    for _ in range(32):
        extras.append(np.abs(rng.standard_normal(n)))
    for xi in extras:
        v = _penalty_value(space, rho, xi, z)
        if v > best_val:
            best_val, best_xi = v, xi
        if v > threshold and _confirm_ray(space, rho, xi, z):
            return PenaltyResult(_INF, False, xi)
    return PenaltyResult(max(best_val, 0.0), True, None, best_xi)


def _entropic_ascent_start(probs: np.ndarray, z: np.ndarray, theta: float) -> np.ndarray:
    """Stationarity-informed starting point for the entropic penalty ascent.

    At an interior optimum exp(theta*xi_i) is proportional to z_i on the
    active support; scanning supports by descending z gives the consistent
    proportionality constant.
    """
    order = np.argsort(-z)
    zs = z[order]
    ps = probs[order]
    for k in range(zs.size, 0, -1):
        top = float(np.dot(ps[:k], zs[:k]))
        rest = float(ps[k:].sum())
        if top >= 1.0 - 1e-14 or rest <= 0.0:
            continue
        d = rest / (1.0 - top)
        if zs[k - 1] * d > 1.0 and (k == zs.size or zs[k] * d <= 1.0):
            xi = np.zeros_like(z)
            idx = order[:k]
            xi[idx] = np.log(z[idx] * d) / theta
            return xi
    return np.zeros_like(z)


def _penalty_entropic(space: FiniteProbSpace, theta: float, z: np.ndarray) -> PenaltyResult:
    probs = space.probs

    def value_and_grad(xi: np.ndarray) -> tuple[float, np.ndarray]:
        w = theta * xi
        m = float(w.max())
        e = probs * np.exp(w - m)
        total = float(e.sum())
        val = float(np.dot(probs, xi * z)) - (m + math.log(total)) / theta
        grad = probs * z - e / total
        return val, grad

    xi = _entropic_ascent_start(probs, z, theta)
    val, grad = value_and_grad(xi)
    zero_val, _ = value_and_grad(np.zeros_like(z))
    if zero_val > val:
        xi = np.zeros_like(z)
        val = zero_val
        _, grad = value_and_grad(xi)
    step = 1.0
    for _ in range(1500):
        proj_grad = np.where((xi <= 0.0) & (grad < 0.0), 0.0, grad)
        gnorm = float(np.linalg.norm(proj_grad))
        if gnorm <= 1e-12 * max(1.0, abs(val)):
            break
        for _ in range(60):
            cand = np.maximum(xi + step * proj_grad, 0.0)
            cand_val, cand_grad = value_and_grad(cand)
            if cand_val > val + 1e-18:
                xi, val, grad = cand, cand_val, cand_grad
                step *= 1.6
                break
            step *= 0.5
        else:
            break
    return PenaltyResult(max(val, 0.0), True, None, xi)


def penalty_gauge(
    space: FiniteProbSpace,
    rho: RiskMeasureSpec,
    y: Rv,
    *,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """inf{beta > 0 : penalty(|y|/beta) <= 1}."""
    _check_on_space(space, y, "y")
    z = np.abs(y.values)
    if not np.any(z > 0.0):
        return 0.0
    hi0 = max(float(np.dot(space.probs, z)), float(z.max()), 1e-12)

    def pred(beta: float) -> bool:
        return penalty(space, rho, Rv(z / beta), seed=seed, tol=tol).value <= 1.0

    return bisect_gauge(pred, hi0=hi0, rel_tol=1e-11)


def _avar_dual_gauge_exact(probs: np.ndarray, z: np.ndarray, t: float) -> float:
    """Exact dual norm against the tail-mean norm on up to 16 atoms.

    The penalty of a positively homogeneous measure is 0 or inf, so the
    infimal dual form reduces to the feasibility gauge, and feasibility is a
    finite family of subset bounds (the same polymatroid bounds the penalty
    candidates use):  beta >= t * sum_A p|z| / min(P(A), t) for every A.
    """
    z = np.abs(z)
    if not np.any(z > 0.0):
        return 0.0
    n = probs.size
    if n <= 16:
        m = _subset_matrix(n)
        sums = m @ (probs * z)
        bound = np.minimum(m @ probs, t) / t
        return float(np.max(sums / bound))
    order = np.argsort(-z)
    ps = probs[order]
    zs = z[order]
    sums = np.cumsum(ps * zs)
    bound = np.minimum(np.cumsum(ps), t) / t
    return float(np.max(sums / bound))


def _entropic_alpha_exact(probs: np.ndarray, z: np.ndarray, theta: float) -> float:
    """Exact entropic penalty by the stationarity support scan.

    Finite exactly when E[z] <= 1; on the active support S the optimizer has
    exp(theta*xi_i) = z_i * D with D = P(S^c) / (1 - sum_S p z), and the
    value collapses to (sum_S p z log z - (1 - sum_S p z) log D) / theta.
    """
    if not np.any(z > 0.0):
        return 0.0
    if float(np.dot(probs, z)) > 1.0 + 1e-13:
        return _INF
    order = np.argsort(-z)
    zs = z[order]
    ps = probs[order]
    best = 0.0
    for k in range(1, zs.size + 1):
        top = float(np.dot(ps[:k], zs[:k]))
        rest = float(ps[k:].sum())
        if top >= 1.0 - 1e-15 or rest <= 0.0:
            break
        d = rest / (1.0 - top)
        if zs[k - 1] * d <= 1.0:
            continue
        if k < zs.size and zs[k] * d > 1.0 + 1e-12:
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = float(np.dot(ps[:k] * zs[:k], np.log(zs[:k])))
        best = max(best, (ent - (1.0 - top) * math.log(d)) / theta)
    return best


def dual_gauge_exact(space: FiniteProbSpace, rho: RiskMeasureSpec, z: np.ndarray) -> float | None:
    """Fast exact dual-norm evaluator for the built-in risk measures.

    Used where the dual norm appears inside another optimization (bipolar
    round trips); the slower penalty-based infimal form stays the reference
    route in risk_dual_norm.
    """
    z = np.abs(z)
    if rho.kind == "avar":
        return _avar_dual_gauge_exact(space.probs, z, rho.level)
    if rho.kind == "entropic":
        if not np.any(z > 0.0):
            return 0.0

        def objective(beta: float) -> float:
            a = _entropic_alpha_exact(space.probs, z / beta, rho.theta)
            return beta * a + beta

        x0 = max(float(np.dot(space.probs, z)), 1e-12)
        return minimize_scalar_convex(objective, x0=x0, tol=1e-12)[1]
    return None


def _dual_inf_form(
    space: FiniteProbSpace,
    rho: RiskMeasureSpec,
    z: np.ndarray,
    *,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[float, float]:
    """(beta, value) minimizing beta * penalty(z/beta) + beta over beta > 0."""
    if not np.any(z > 0.0):
        return 0.0, 0.0

    def objective(beta: float) -> float:
        res = penalty(space, rho, Rv(z / beta), seed=seed, tol=tol)
        return beta * res.value + beta if res.bounded else _INF

    x0 = max(float(np.dot(space.probs, z)), 1e-12)
    # tight bracket: for 0/inf penalties the objective is beta on one side of
    # a jump, and the landing point should be exact to rounding
    return minimize_scalar_convex(objective, x0=x0, tol=1e-13)


@dataclass(frozen=True, eq=False)
class RiskDualResult:
    value: float           # the infimal form over beta
    polar_value: float     # direct supremum over the unit ball of the risk norm
    beta: float
    agreement: float


def risk_dual_norm(
    space: FiniteProbSpace,
    rho: RiskMeasureSpec,
    y: Rv,
    *,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
    agreement_tol: float = 1e-6,
) -> RiskDualResult:
    """Dual norm of y against the risk norm of rho.

    Computes inf over beta of beta * penalty(|y|/beta) + beta, and
    independently the direct polar supremum over the unit ball; raises
    ConvergenceError when the two disagree beyond ``agreement_tol``.
    """
    _check_on_space(space, y, "y")
    z = np.abs(y.values)
    if not np.any(z > 0.0):
        return RiskDualResult(0.0, 0.0, 0.0, 0.0)
    beta, value = _dual_inf_form(space, rho, z, seed=seed, tol=tol)

    from .duality import polar  # deferred: duality builds on this module
    from .norms import RiskNorm

    direct = polar(space, RiskNorm(rho), y, seed=seed, tol=tol)
    gap = abs(value - direct.value)
    if gap > agreement_tol * max(1.0, abs(value)):
        raise ConvergenceError(
            f"risk dual norm mismatch: infimal form {value!r} vs polar {direct.value!r}"
        )
    return RiskDualResult(value, direct.value, beta, gap)


@dataclass(frozen=True)
class RiskCheckItem:
    name: str
    passed: bool
    worst: float
    witness: str | None = None


@dataclass(frozen=True)
class RiskAxiomReport:
    items: tuple[RiskCheckItem, ...]

    @property
    def all_pass(self) -> bool:
        return all(item.passed for item in self.items)

    def as_dict(self) -> dict:
        return {
            "all_pass": self.all_pass,
            "items": [
                {"name": i.name, "passed": i.passed, "worst": i.worst, "witness": i.witness}
                for i in self.items
            ],
        }


def check_risk_axioms(
    space: FiniteProbSpace,
    rho: RiskMeasureSpec,
    trials: int = 40,
    *,
    seed: int = 0,
    slack: float = 1e-9,
) -> RiskAxiomReport:
    """Randomized verification of the risk-measure axioms on this space."""
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    n = space.n_atoms

    def r(x: np.ndarray) -> float:
        return _risk_arr(space, rho, x)

    items: list[RiskCheckItem] = []

    zero_gap = abs(r(np.zeros(n)))
    items.append(RiskCheckItem("zero", zero_gap <= slack, zero_gap))

    worst: dict[str, tuple[float, str | None]] = {
        "translation": (0.0, None),
        "monotone": (0.0, None),
        "convex": (0.0, None),
        "lebesgue": (0.0, None),
    }

    def bump(key: str, val: float, witness: str | None) -> None:
        if val > worst[key][0]:
            worst[key] = (val, witness)

    for _ in range(trials):
        u = rng.standard_normal(n) * 10 ** rng.uniform(-1.0, 1.0)
        v = rng.standard_normal(n) * 10 ** rng.uniform(-1.0, 1.0)
        scale = max(1.0, float(np.abs(u).max()), float(np.abs(v).max()))
        alpha = float(rng.standard_normal())
        bump(
            "translation",
            abs(r(u + alpha) - r(u) - alpha) / scale,
            _fmt(u),
        )
        upper = u + np.abs(rng.standard_normal(n))
        bump("monotone", (r(u) - r(upper)) / scale, _fmt(u))
        mid = 0.5 * (u + v)
        bump("convex", (r(mid) - 0.5 * (r(u) + r(v))) / scale, _fmt(mid))
        a = np.abs(u)
        alive = list(range(n))
        rng.shuffle(alive)
        prev = r(a)
        while alive:
            alive.pop()
            masked = np.zeros(n)
            masked[alive] = a[alive]
            cur = r(masked)
            bump("lebesgue", (cur - prev) / scale, _fmt(masked))
            prev = cur
        bump("lebesgue", abs(prev) / scale, None)

    for key in ("translation", "monotone", "convex", "lebesgue"):
        w, wit = worst[key]
        items.append(RiskCheckItem(key, w <= slack, w, wit if w > slack else None))
    return RiskAxiomReport(tuple(items))


def _fmt(x: np.ndarray) -> str:
    return np.array2string(np.asarray(x), precision=6, separator=", ")
