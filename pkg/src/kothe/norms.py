"""The seminorm families and their axioms checker.

Each family is a small class with a shared interface: evaluation on a random
variable, an optional closed-form dual, and optional starting profiles for
the polar optimizer.  Free functions mirror the class API for the common
cases.  The axiom checker is randomized and report-only; it never mutates
the spec it inspects.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._optim import bisect_gauge, minimize_convex_on_orthant, minimize_scalar_convex
from .risk import RiskMeasureSpec, _risk_norm_arr
from .space import DEFAULT_TOL, FiniteProbSpace, Rv, Tolerances, _check_on_space
from .young import MusielakFamily, YoungFunction

__all__ = [
    "PhiConcave",
    "phi_power_root",
    "phi_sqrt",
    "phi_identity",
    "phi_tabulated",
    "Seminorm",
    "LpNorm",
    "LuxemburgNorm",
    "MarcinkiewiczNorm",
    "LorentzNorm",
    "RiskNorm",
    "GenOrliczNorm",
    "CustomSeminorm",
    "lp_norm",
    "luxemburg_norm",
    "amemiya_dual_norm",
    "marcinkiewicz_norm",
    "lorentz_norm",
    "gen_orlicz_norm",
    "GenOrliczDualResult",
    "gen_orlicz_dual_norm",
    "CheckItem",
    "AxiomReport",
    "check_axioms",
    "FundamentalFunctions",
    "fundamental_functions",
    "family_membership",
]

_INF = math.inf


# ---------------------------------------------------------------------------
# concave weight functions for the Marcinkiewicz / Lorentz pair


@dataclass(frozen=True, eq=False)
class PhiConcave:
    """Nondecreasing concave function on [0, 1] with value 0 at 0."""

    kind: str  # "power_root" | "tabulated"
    a: float = math.nan
    ts: np.ndarray | None = None
    ys: np.ndarray | None = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-15) or np.any(t > 1.0 + 1e-12):
            raise ValueError("concave weights are defined on [0, 1]")
        out = self._eval(np.clip(t, 0.0, 1.0))
        return float(out) if out.ndim == 0 else out

    def _eval(self, t: np.ndarray) -> np.ndarray:
        # hot path: t already inside [0, 1]
        if self.kind == "power_root":
            return t**self.a
        assert self.ts is not None and self.ys is not None
        return np.interp(t, self.ts, self.ys)

    @property
    def name(self) -> str:
        if self.kind == "power_root":
            return f"t^{self.a:g}"
        return "tabulated"


def phi_power_root(a: float) -> PhiConcave:
    """t**a with a in (0, 1]."""
    if not 0.0 < a <= 1.0:
        raise ValueError("the root exponent must lie in (0, 1]")
    return PhiConcave("power_root", a=float(a))


def phi_sqrt() -> PhiConcave:
    return phi_power_root(0.5)


def phi_identity() -> PhiConcave:
    return phi_power_root(1.0)


def phi_tabulated(ts, ys) -> PhiConcave:
    ts = np.array(ts, dtype=float)
    ys = np.array(ys, dtype=float)
    if ts.ndim != 1 or ts.shape != ys.shape or ts.size < 2:
        raise ValueError("need matching 1-d node arrays with at least two nodes")
    if ts[0] != 0.0 or abs(ts[-1] - 1.0) > 1e-12 or ys[0] != 0.0:
        raise ValueError("nodes must run from (0, 0) to t = 1")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("node t values must be strictly increasing")
    if np.any(np.diff(ys) < -1e-12):
        raise ValueError("node values must be nondecreasing")
    slopes = np.diff(ys) / np.diff(ts)
    if np.any(np.diff(slopes) > 1e-9):
        raise ValueError("nodes must describe a concave function")
    ts.setflags(write=False)
    ys.setflags(write=False)
    return PhiConcave("tabulated", ts=ts, ys=ys)


# ---------------------------------------------------------------------------
# seminorm families


class Seminorm(abc.ABC):
    """A symmetric sublinear functional of a random variable."""

    name: str = "seminorm"
    rearrangement_invariant: bool = False

    def value(self, space: FiniteProbSpace, u: Rv, *, tol: Tolerances = DEFAULT_TOL) -> float:
        _check_on_space(space, u)
        return self._value_arr(space, u.values, tol)

    @abc.abstractmethod
    def _value_arr(self, space: FiniteProbSpace, x: np.ndarray, tol: Tolerances) -> float:
        """Evaluation on a raw value vector; the optimizer hot path."""

    def dual_value_arr(
        self, space: FiniteProbSpace, z: np.ndarray, tol: Tolerances
    ) -> float | None:
        """Closed-form dual norm when one is known and valid on this space."""
        return None

    def polar_start_profiles(self, space: FiniteProbSpace, z: np.ndarray) -> list[np.ndarray]:
        """Optional starting profiles for the polar optimizer."""
        return []

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"<{type(self).__name__} {self.name}>"


def _conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return _INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _lp_arr(probs: np.ndarray, x: np.ndarray, p: float) -> float:
    a = np.abs(x)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    if p == 1.0:
        return float(np.dot(probs, a))
    with np.errstate(over="ignore"):
        return float(np.dot(probs, a**p) ** (1.0 / p))


class LpNorm(Seminorm):
    rearrangement_invariant = True

    def __init__(self, p: float):
        p = float(p)
        if p < 1.0:
            raise ValueError("Lp norms need p >= 1")
        self.p = p
        self.name = "Linf" if math.isinf(p) else f"L{p:g}"

    def _value_arr(self, space, x, tol):
        return _lp_arr(space.probs, x, self.p)

    def dual_value_arr(self, space, z, tol):
        return _lp_arr(space.probs, z, _conjugate_exponent(self.p))

    def polar_start_profiles(self, space, z):
        if math.isinf(self.p):
            return [np.ones(z.size)]
        if self.p == 1.0:
            spike = np.zeros(z.size)
            spike[0] = 1.0
            return [spike]
        return [np.abs(z) ** (1.0 / (self.p - 1.0))]


class LuxemburgNorm(Seminorm):
    """inf{beta > 0 : E Phi(|u|/beta) <= 1} for a per-atom Young family."""

    def __init__(self, family: MusielakFamily):
        self.family = family
        self.rearrangement_invariant = family.is_constant
        self.name = "luxemburg"
        self._conjugate_family: MusielakFamily | None = None

    def _value_arr(self, space, x, tol):
        if len(self.family) != x.size:
            raise ValueError("Young family and space have different sizes")
        a = np.abs(x)
        if not np.any(a > 0.0):
            return 0.0
        pw = self.family._pow_p  # type: ignore[attr-defined]
        if pw is not None:
            return _power_modular_gauge(
                space.probs, a, pw, self.family._pow_scale, tol  # type: ignore[attr-defined]
            )
        hi0 = max(float(a.max()), 1e-12)
        return bisect_gauge(
            lambda b: self.family.modular(space.probs, a / b) <= 1.0,
            hi0=hi0,
            rel_tol=tol.gauge_rel,
        )

    def dual_value_arr(self, space, z, tol):
        if self._conjugate_family is None:
            self._conjugate_family = self.family.conjugate()
        return _amemiya_arr(space.probs, z, self._conjugate_family, tol)

    def polar_start_profiles(self, space, z):
        return [np.abs(z)]


def _power_modular_gauge(
    probs: np.ndarray,
    a: np.ndarray,
    pw: np.ndarray,
    scale: np.ndarray,
    tol: Tolerances,
) -> float:
    """Solve E Phi(a/beta) = 1 for all-power families by safeguarded Newton.

    The modular is sum(c_i * beta**-p_i) with positive coefficients: smooth,
    decreasing and convex in beta, so Newton from a bracketed start converges
    fast and the bracket guards the remaining cases.
    """
    mask = a > 0.0
    c = probs[mask] * scale[mask] * a[mask] ** pw[mask]
    p = pw[mask]

    def g(beta: float) -> float:
        return float(np.dot(c, beta**-p)) - 1.0

    def gprime(beta: float) -> float:
        return float(np.dot(c * -p, beta ** -(p + 1.0)))

    hi = float(a.max())
    while g(hi) > 0.0:
        hi *= 2.0
    lo = hi / 2.0
    while g(lo) < 0.0:
        hi = lo
        lo /= 2.0
        if lo < 1e-300:
            return 0.0
    beta = hi
    for _ in range(100):
        val = g(beta)
        if val > 0.0:
            lo = beta
        else:
            hi = beta
        nxt = beta - val / gprime(beta)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - beta) <= tol.gauge_rel * beta:
            return nxt
        beta = nxt
    return beta


def _breakpoint_data(probs: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Plateau levels, breakpoints (ending at 1) and running integrals there.

    Ties are left unmerged: the running integral and any evaluation at the
    extra breakpoints are unchanged by merging, and skipping it is cheaper.
    """
    a = np.abs(x)
    order = np.argsort(-a, kind="stable")
    levels = a[order]
    weights = probs[order]
    bp = np.cumsum(weights)
    bp[-1] = 1.0
    integrals = np.cumsum(levels * weights)
    return levels, bp, integrals


class MarcinkiewiczNorm(Seminorm):
    """sup over t of the running integral of the rearrangement against phi.

    Between breakpoints of the rearrangement the running integral is affine
    and phi is concave, so the ratio is quasiconvex there and attains its
    supremum at breakpoints; only those and t = 1 are evaluated.
    """

    rearrangement_invariant = True

    def __init__(self, phi: PhiConcave):
        self.phi = phi
        self.name = f"marcinkiewicz({phi.name})"

    def _value_arr(self, space, x, tol):
        if not np.any(np.abs(x) > 0.0):
            return 0.0
        _, bp, integrals = _breakpoint_data(space.probs, x)
        weights = self.phi._eval(bp)
        if np.any(weights <= 0.0):
            raise ValueError("phi must be positive on (0, 1]")
        return float((integrals / weights).max())

    def dual_value_arr(self, space, z, tol):
        if not space.is_uniform:
            return None
        return _lorentz_arr(space.probs, z, self.phi)

    def polar_start_profiles(self, space, z):
        cum = np.concatenate([[0.0], np.cumsum(np.sort(space.probs)[::-1])])
        cum[-1] = 1.0
        inc = np.diff(self.phi(cum)) / np.diff(cum)
        return [np.maximum(inc, 0.0)]


def _lorentz_arr(probs: np.ndarray, x: np.ndarray, phi: PhiConcave) -> float:
    levels, bp, _ = _breakpoint_data(probs, x)
    edges = phi._eval(np.concatenate([[0.0], bp]))
    return float(np.dot(levels, np.diff(edges)))


class LorentzNorm(Seminorm):
    """Stieltjes integral of the decreasing rearrangement against phi."""

    rearrangement_invariant = True

    def __init__(self, phi: PhiConcave):
        self.phi = phi
        self.name = f"lorentz({phi.name})"
        self._dual = None

    def _value_arr(self, space, x, tol):
        return _lorentz_arr(space.probs, x, self.phi)

    def dual_value_arr(self, space, z, tol):
        if not space.is_uniform:
            return None
        if self._dual is None:
            self._dual = MarcinkiewiczNorm(self.phi)
        return self._dual._value_arr(space, z, tol)

    def polar_start_profiles(self, space, z):
        n = z.size
        return [np.concatenate([np.ones(k), np.zeros(n - k)]) for k in range(1, n + 1)]


class RiskNorm(Seminorm):
    """inf{beta > 0 : rho(|u|/beta) <= 1} for a convex risk measure rho."""

    def __init__(self, rho: RiskMeasureSpec):
        self.rho = rho
        self.rearrangement_invariant = rho.law_invariant
        self.name = f"risknorm({rho.name})"

    def _value_arr(self, space, x, tol):
        return _risk_norm_arr(space, self.rho, np.abs(x), tol)

    def polar_start_profiles(self, space, z):
        n = z.size
        return [np.concatenate([np.ones(k), np.zeros(n - k)]) for k in range(1, n + 1)]


class GenOrliczNorm(Seminorm):
    """inf{beta > 0 : r(Phi(|u|/beta)) <= 1} for an inner seminorm r."""

    def __init__(self, phi: YoungFunction, inner: Seminorm):
        if not phi.is_finite:
            raise ValueError("the Young function must be finite-valued here")
        self.phi = phi
        self.inner = inner
        self.rearrangement_invariant = inner.rearrangement_invariant
        self.name = f"genorlicz({inner.name})"
        self._inner_checked: set[bytes] = set()

    def _ensure_inner(self, space: FiniteProbSpace) -> None:
        key = space.probs.tobytes()
        if key in self._inner_checked:
            return
        report = check_axioms(space, self.inner, trials=6, seed=20210)
        if not report.core_pass:
            raise ValueError(
                f"inner seminorm fails the axiom spot check: {report.failure_names()}"
            )
        self._inner_checked.add(key)

    def _value_arr(self, space, x, tol):
        self._ensure_inner(space)
        a = np.abs(x)
        if not np.any(a > 0.0):
            return 0.0
        hi0 = max(float(a.max()), 1e-12)
        return bisect_gauge(
            lambda b: self.inner._value_arr(space, self.phi.eval_array(a / b), tol) <= 1.0,
            hi0=hi0,
            rel_tol=tol.gauge_rel,
        )


class CustomSeminorm(Seminorm):
    """Wrap a callable (space, values) -> float with declared properties."""

    def __init__(
        self,
        fn: Callable[[FiniteProbSpace, np.ndarray], float],
        *,
        rearrangement_invariant: bool = False,
        name: str = "custom",
    ):
        self.fn = fn
        self.rearrangement_invariant = rearrangement_invariant
        self.name = name

    def _value_arr(self, space, x, tol):
        return float(self.fn(space, x))


# ---------------------------------------------------------------------------
# free-function forms

NormFamily = Sequence[Seminorm]


def lp_norm(space: FiniteProbSpace, u: Rv, p: float) -> float:
    """(E|u|^p)^(1/p), or max|u| for p = inf."""
    return LpNorm(p).value(space, u)


def luxemburg_norm(
    space: FiniteProbSpace,
    u: Rv,
    family: MusielakFamily,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """inf{beta > 0 : E Phi(|u|/beta) <= 1}, by bisection on the modular."""
    return LuxemburgNorm(family).value(space, u, tol=tol)


def _amemiya_arr(
    probs: np.ndarray,
    z: np.ndarray,
    conj_family: MusielakFamily,
    tol: Tolerances,
) -> float:
    a = np.abs(z)
    if not np.any(a > 0.0):
        return 0.0

    def objective(beta: float) -> float:
        return beta * conj_family.modular(probs, a / beta) + beta

    x0 = max(float(np.dot(probs, a)), 1e-12)
    _, value = minimize_scalar_convex(objective, x0=x0, tol=tol.golden)
    return value


def amemiya_dual_norm(
    space: FiniteProbSpace,
    y: Rv,
    family: MusielakFamily,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """inf over beta of beta * E Phi*(|y|/beta) + beta.

    One-dimensional convex minimization by bracketing plus golden section;
    the reported number is the infimal value, not a minimizer.
    """
    _check_on_space(space, y, "y")
    if len(family) != space.n_atoms:
        raise ValueError("Young family and space have different sizes")
    return _amemiya_arr(space.probs, y.values, family.conjugate(), tol)


def marcinkiewicz_norm(space: FiniteProbSpace, u: Rv, phi: PhiConcave) -> float:
    return MarcinkiewiczNorm(phi).value(space, u)


def lorentz_norm(space: FiniteProbSpace, y: Rv, phi: PhiConcave) -> float:
    return LorentzNorm(phi).value(space, y)


def gen_orlicz_norm(
    space: FiniteProbSpace,
    u: Rv,
    phi: YoungFunction,
    r: Seminorm,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    return GenOrliczNorm(phi, r).value(space, u, tol=tol)


@dataclass(frozen=True, eq=False)
class GenOrliczDualResult:
    """Dual norm of the generalized Orlicz construction, both variational forms."""

    value: float      # inf over v of E[v Phi*(y/v)] + r_polar(v)
    max_form: float   # inf over v of max(r_polar(v), E[v Phi*(y/v)])
    v: np.ndarray
    converged: bool


def _perspective_modular(
    probs: np.ndarray, z: np.ndarray, phi_star: YoungFunction, v: np.ndarray
) -> float:
    """E[v Phi*(z/v)] with the closed perspective convention at v = 0.

    At v_i = 0 the term is 0 when z_i = 0 and +inf otherwise; Phi* of a
    finite-valued Young function grows superlinearly, so this is its lower
    semicontinuous limit.
    """
    pos = v > 0.0
    if np.any(~pos & (z > 0.0)):
        return _INF
    if not np.any(pos):
        return 0.0
    vals = phi_star.eval_array(z[pos] / v[pos])
    if np.any(np.isinf(vals)):
        return _INF
    return float(np.dot(probs[pos] * v[pos], vals))


def _dual_gauge_of(space: FiniteProbSpace, r: Seminorm, tol: Tolerances):
    """Positively homogeneous callable computing the polar of r on arrays."""

    def closed(v: np.ndarray) -> float | None:
        return r.dual_value_arr(space, v, tol)

    if closed(np.ones(space.n_atoms)) is not None:
        return lambda v: closed(v)

    from .duality import polar  # deferred import; duality builds on this module

    return lambda v: polar(space, r, Rv(v), tol=tol).value


def gen_orlicz_dual_norm(
    space: FiniteProbSpace,
    y: Rv,
    phi: YoungFunction,
    r: Seminorm,
    *,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
    n_restarts: int = 1,
    max_passes: int = 12,
) -> GenOrliczDualResult:
    """Minimize E[v Phi*(y/v)] + r_polar(v) over nonnegative densities v.

    Both this sum form and the max form inf_v max(r_polar(v), E[v Phi*(y/v)])
    are convex in v; they are minimized by line-search descent along
    coordinates, the multiplicative scaling direction and random directions,
    restarted from several seeded points.
    """
    _check_on_space(space, y, "y")
    GenOrliczNorm(phi, r)._ensure_inner(space)
    z = np.abs(y.values)
    n = space.n_atoms
    if not np.any(z > 0.0):
        return GenOrliczDualResult(0.0, 0.0, np.zeros(n), True)
    phi_star = phi.conjugate()
    r_polar = _dual_gauge_of(space, r, tol)
    probs = space.probs

    def modular(v: np.ndarray) -> float:
        return _perspective_modular(probs, z, phi_star, v)

    def d_sum(v: np.ndarray) -> float:
        m = modular(v)
        return m + r_polar(v) if math.isfinite(m) else _INF

    def d_max(v: np.ndarray) -> float:
        m = modular(v)
        return max(m, r_polar(v)) if math.isfinite(m) else _INF

    rng = np.random.default_rng(seed)
    scale = float(np.dot(probs, z))
    starts = [z / float(np.linalg.norm(z)), np.full(n, scale)]
    for _ in range(n_restarts):
        starts.append(np.abs(rng.standard_normal(n)) * scale + 1e-3 * scale)

    sum_val, v_sum, ok_sum = minimize_convex_on_orthant(
        d_sum, starts, rng, max_passes=max_passes
    )
    # the max-form optimum has the same support structure; warm-start there
    max_val, _, ok_max = minimize_convex_on_orthant(
        d_max, [v_sum] + starts[:2], rng, max_passes=max_passes
    )
    return GenOrliczDualResult(sum_val, max_val, v_sum, ok_sum and ok_max)


# ---------------------------------------------------------------------------
# axiom checking


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    worst: float
    witness: str | None = None


_CORE_ITEMS = (
    "nonnegative",
    "symmetry",
    "homogeneity",
    "subadditivity",
    "lower_l1_bound",
    "bounded_by_sup",
    "solid_monotone",
    "order_continuity",
    "decomposable",
)


@dataclass(frozen=True)
class AxiomReport:
    items: tuple[CheckItem, ...]
    c_lower: float  # empirical constant with c * ||u||_1 <= p(u)
    c_upper: float  # empirical constant with p(u) <= c * ||u||_inf

    @property
    def all_pass(self) -> bool:
        return all(i.passed for i in self.items)

    @property
    def core_pass(self) -> bool:
        core = {i.name: i.passed for i in self.items}
        return all(core.get(k, False) for k in _CORE_ITEMS)

    def failure_names(self) -> list[str]:
        return [i.name for i in self.items if not i.passed]

    def as_dict(self) -> dict:
        return {
            "all_pass": self.all_pass,
            "c_lower": self.c_lower,
            "c_upper": self.c_upper,
            "items": [
                {"name": i.name, "passed": i.passed, "worst": i.worst, "witness": i.witness}
                for i in self.items
            ],
        }


def check_axioms(
    space: FiniteProbSpace,
    spec: Seminorm,
    trials: int = 40,
    *,
    seed: int = 0,
    slack: float = 1e-8,
    tol: Tolerances = DEFAULT_TOL,
) -> AxiomReport:
    """Randomized report on the seminorm axioms for this spec on this space.

    Checks nonnegativity, symmetry under sign flips, positive homogeneity,
    subadditivity, the lower L1 bound (with the empirical constant), the
    upper sup-norm bound, monotonicity under pointwise domination, decay
    along shrinking atom sets, and finiteness on indicators.  Solidity and
    decomposability of the induced space reduce on a finite space to the
    domination axiom plus finiteness on indicators, which is what is
    reported.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    n = space.n_atoms

    def p(x: np.ndarray) -> float:
        return spec._value_arr(space, x, tol)

    worst: dict[str, tuple[float, str | None]] = {}

    def bump(key: str, val: float, witness: np.ndarray | None) -> None:
        prev = worst.get(key, (-_INF, None))
        if val > prev[0]:
            worst[key] = (val, None if witness is None else _fmt(witness))

    c_lower, c_upper = _INF, 0.0
    indicator_ok = True
    for k in range(trials):
        u = rng.standard_normal(n) * 10 ** rng.uniform(-1.0, 1.0)
        v = rng.standard_normal(n) * 10 ** rng.uniform(-1.0, 1.0)
        pu, pv = p(u), p(v)
        scale = max(1.0, abs(pu), abs(pv))
        bump("nonnegative", -pu / scale, u)
        bump("symmetry", abs(p(-u) - pu) / scale, u)
        alpha = float(np.exp(rng.uniform(-2.0, 2.0)))
        bump("homogeneity", abs(p(alpha * u) - alpha * pu) / (alpha * scale), u)
        bump("subadditivity", (p(u + v) - pu - pv) / scale, u + v)
        dominated = u * rng.uniform(0.0, 1.0, size=n) * rng.choice([-1.0, 1.0], size=n)
        bump("solid_monotone", (p(dominated) - pu) / scale, dominated)
        l1 = float(np.dot(space.probs, np.abs(u)))
        linf = float(np.abs(u).max())
        if l1 > 0 and np.isfinite(pu):
            c_lower = min(c_lower, pu / l1)
        if linf > 0 and np.isfinite(pu):
            c_upper = max(c_upper, pu / linf)
        # decay along a nested shrinking sequence of atom sets
        alive = list(range(n))
        rng.shuffle(alive)
        prev = pu
        while alive:
            alive.pop()
            masked = np.zeros(n)
            masked[alive] = u[alive]
            cur = p(masked)
            bump("order_continuity", (cur - prev) / scale, masked)
            prev = cur
        bump("order_continuity", abs(prev) / scale, None)
        idx = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
        ind = np.zeros(n)
        ind[idx] = 1.0
        if not np.isfinite(p(ind)):
            indicator_ok = False

    items = [
        CheckItem("nonnegative", worst["nonnegative"][0] <= slack, *_wit(worst["nonnegative"], slack)),
        CheckItem("symmetry", worst["symmetry"][0] <= slack, *_wit(worst["symmetry"], slack)),
        CheckItem("homogeneity", worst["homogeneity"][0] <= slack, *_wit(worst["homogeneity"], slack)),
        CheckItem("subadditivity", worst["subadditivity"][0] <= slack, *_wit(worst["subadditivity"], slack)),
        CheckItem("lower_l1_bound", c_lower > 1e-10, c_lower),
        CheckItem("bounded_by_sup", np.isfinite(c_upper), c_upper),
        CheckItem("solid_monotone", worst["solid_monotone"][0] <= slack, *_wit(worst["solid_monotone"], slack)),
        CheckItem("order_continuity", worst["order_continuity"][0] <= slack, *_wit(worst["order_continuity"], slack)),
        CheckItem("decomposable", indicator_ok, 0.0 if indicator_ok else _INF),
    ]
    return AxiomReport(tuple(items), c_lower, c_upper)


def _wit(pair: tuple[float, str | None], slack: float) -> tuple[float, str | None]:
    val, wit = pair
    return val, (wit if val > slack else None)


def _fmt(x: np.ndarray) -> str:
    return np.array2string(np.asarray(x), precision=6, separator=", ")


# ---------------------------------------------------------------------------
# fundamental functions and families


@dataclass(frozen=True, eq=False)
class FundamentalFunctions:
    """Upper and lower fundamental functions on the achievable measure grid."""

    ts: np.ndarray
    upper: np.ndarray  # sup{p(1_A) : P(A) <= t}
    lower: np.ndarray  # inf{p(1_A) : P(A) >= t}

    def as_dict(self) -> dict:
        return {
            "ts": self.ts.tolist(),
            "upper": self.upper.tolist(),
            "lower": self.lower.tolist(),
        }


def fundamental_functions(
    space: FiniteProbSpace,
    spec: Seminorm,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> FundamentalFunctions:
    """Exact fundamental functions by subset enumeration.

    On more than 20 atoms enumeration is refused unless the spec is declared
    rearrangement invariant and the space is uniform, in which case only the
    subset cardinality matters.
    """
    n = space.n_atoms
    if spec.rearrangement_invariant and space.is_uniform:
        vals = np.array(
            [
                spec._value_arr(space, np.concatenate([np.ones(k), np.zeros(n - k)]), tol)
                for k in range(1, n + 1)
            ]
        )
        ts = np.arange(1, n + 1) / n
        # monotone under domination, so the sup and inf both land on vals
        return FundamentalFunctions(ts, vals, vals)
    if n > 20:
        raise ValueError("too many atoms for subset enumeration")
    pas = []
    vals = []
    for mask in range(1, 2**n):
        sel = np.array([(mask >> i) & 1 for i in range(n)], dtype=float)
        pas.append(float(np.dot(space.probs, sel)))
        vals.append(spec._value_arr(space, sel, tol))
    pas_arr = np.asarray(pas)
    vals_arr = np.asarray(vals)
    order = np.argsort(pas_arr, kind="stable")
    pas_arr, vals_arr = pas_arr[order], vals_arr[order]
    prefix_max = np.maximum.accumulate(vals_arr)
    suffix_min = np.minimum.accumulate(vals_arr[::-1])[::-1]
    keep = np.concatenate([np.abs(np.diff(pas_arr)) > 1e-12, [True]])
    first = np.concatenate([[True], np.abs(np.diff(pas_arr)) > 1e-12])
    ts = pas_arr[keep]
    upper = prefix_max[keep]
    lower = suffix_min[first]
    return FundamentalFunctions(ts, upper, lower)


def family_membership(
    space: FiniteProbSpace,
    u: Rv,
    family: NormFamily,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Evaluate every seminorm of the family on u; all finite on finite spaces."""
    if not family:
        raise ValueError("the family must be nonempty")
    return np.array([spec.value(space, u, tol=tol) for spec in family])
