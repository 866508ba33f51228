"""One-dimensional searches and the small convex solvers behind the norms.

Nothing here knows about probability spaces; callers pass plain vectors and
evaluation callbacks.  All routines tolerate +inf objective values, which the
gauge and perspective constructions produce routinely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ConvergenceError",
    "bisect_gauge",
    "minimize_scalar_convex",
    "golden_max_interval",
    "pav_decreasing",
    "project_decreasing_nonneg",
    "MaximizeResult",
    "maximize_linear_on_ball",
]

_INF = math.inf
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget without meeting tolerance."""


def bisect_gauge(
    pred: Callable[[float], bool],
    *,
    hi0: float = 1.0,
    rel_tol: float = 1e-12,
    max_expand: int = 400,
) -> float:
    """inf{b > 0 : pred(b)} for pred that is monotone (False below, True above).

    Returns 0.0 when pred holds arbitrarily close to zero and +inf when it
    never holds within the expansion budget.
    """
    hi = max(hi0, 1e-300)
    for _ in range(max_expand):
        if pred(hi):
            break
        hi *= 2.0
    else:
        return _INF
    lo = hi / 2.0
    while pred(lo):
        hi = lo
        lo /= 2.0
        if lo < 1e-300:
            return 0.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def minimize_scalar_convex(
    f: Callable[[float], float],
    *,
    x0: float = 1.0,
    tol: float = 1e-9,
    max_expand: int = 400,
) -> tuple[float, float]:
    """Minimize a quasiconvex f over (0, inf); f may be +inf near zero.

    Brackets the minimizer by doubling / halving from x0, then refines with
    golden section.  When f decreases monotonically toward 0+ the infimum is
    approached and the value at the smallest probed point is returned.
    """
    x0 = max(x0, 1e-300)
    xm, fm = x0, f(x0)
    for _ in range(max_expand):
        if math.isfinite(fm):
            break
        xm *= 2.0
        fm = f(xm)
    else:
        raise ConvergenceError("objective is +inf on the whole probed range")

    hi, f_hi = xm, fm
    while f(hi * 2.0) < f_hi:
        hi *= 2.0
        f_hi = f(hi)
        if hi > 1e280:
            raise ConvergenceError("objective keeps decreasing toward +inf")
    hi *= 2.0

    lo, f_lo = xm, fm
    shrink = 0
    while f(lo / 2.0) < f_lo and shrink < max_expand:
        lo /= 2.0
        f_lo = f(lo)
        shrink += 1
        if lo < 1e-290:
            return lo, f_lo  # infimum approached at 0+
    lo /= 2.0

    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol * max(1.0, abs(a), abs(b)) and b - a > 1e-300:
        if f1 > f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    if f1 <= f2:
        return x1, f1
    return x2, f2


def golden_max_interval(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    rel_xtol: float = 3e-10,
    max_iter: int = 80,
) -> tuple[float, float]:
    """Maximize a unimodal g on [lo, hi]; tolerates -inf values."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    g1, g2 = g(x1), g(x2)
    xtol = rel_xtol * max(1.0, abs(lo), abs(hi))
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if g1 < g2:
            a, x1, g1 = x1, x2, g2
            x2 = a + _GOLDEN * (b - a)
            g2 = g(x2)
        else:
            b, x2, g2 = x2, x1, g1
            x1 = b - _GOLDEN * (b - a)
            g1 = g(x1)
    ge = g(lo)
    gf = g(hi)
    best = max((g1, x1), (g2, x2), (ge, lo), (gf, hi))
    return best[1], best[0]


def pav_decreasing(y: np.ndarray) -> np.ndarray:
    """L2 projection onto nonincreasing vectors (pool adjacent violators)."""
    n = y.size
    level = y.astype(float).copy()
    weight = np.ones(n)
    # stack of (value, weight) blocks
    vals: list[float] = []
    wts: list[float] = []
    for i in range(n):
        v, w = level[i], weight[i]
        while vals and vals[-1] < v:
            v = (v * w + vals[-1] * wts[-1]) / (w + wts[-1])
            w += wts[-1]
            vals.pop()
            wts.pop()
        vals.append(v)
        wts.append(w)
    out = np.empty(n)
    pos = 0
    for v, w in zip(vals, wts):
        cnt = int(round(w))
        out[pos : pos + cnt] = v
        pos += cnt
    return out


def project_decreasing_nonneg(y: np.ndarray) -> np.ndarray:
    """Projection onto {w : w_1 >= ... >= w_n >= 0}."""
    return np.maximum(pav_decreasing(y), 0.0)


@dataclass(frozen=True)
class MaximizeResult:
    value: float
    x: np.ndarray
    converged: bool
    n_evals: int


def golden_min_interval(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    rel_xtol: float = 3e-10,
    max_iter: int = 80,
) -> tuple[float, float]:
    """Minimize a unimodal f on [lo, hi]; tolerates +inf values."""
    x, g = golden_max_interval(lambda t: -f(t), lo, hi, rel_xtol=rel_xtol, max_iter=max_iter)
    return x, -g


def minimize_convex_on_orthant(
    f: Callable[[np.ndarray], float],
    starts: Sequence[np.ndarray],
    rng: np.random.Generator,
    *,
    max_passes: int = 12,
    tol: float = 1e-11,
    span: float = 16.0,
) -> tuple[float, np.ndarray, bool]:
    """Minimize a convex f (values may be +inf) over the nonnegative orthant.

    Line searches run along coordinates, the multiplicative scaling direction
    v itself, the all-ones direction, support-block indicators and a few
    random directions per pass.  Every slice of a convex function is
    unimodal, so golden section is safe on each; the scaling and block
    directions cross the kinks that coordinate moves alone can stall on.
    """
    best_v: np.ndarray | None = None
    best_val = _INF
    converged = False
    xtols = [3e-5, 3e-7, 3e-9, 3e-11]
    for v0 in starts:
        v = np.maximum(np.asarray(v0, dtype=float), 0.0)
        val = f(v)
        if not math.isfinite(val):
            continue
        local_ok = False
        xtol_idx = 0
        for _ in range(max_passes):
            val_pass = val
            n = v.size
            directions: list[np.ndarray] = [np.eye(n)[i] for i in range(n)]
            directions.append(v.copy())  # multiplicative rescaling
            directions.append(np.ones(n))
            directions.append((v > 0).astype(float))
            for _ in range(max(2, n // 2)):
                directions.append(rng.standard_normal(n))
            scale = max(float(np.abs(v).max()), 1e-12)
            for d in directions:
                dn = float(np.abs(d).max())
                if dn <= 0:
                    continue
                d = d / dn
                t_lo, t_hi = _feasible_interval(v, d, monotone=False)
                t_lo = max(t_lo, -span * scale)
                t_hi = min(t_hi, span * scale)
                if t_hi - t_lo <= 1e-16 * scale:
                    continue
                t_best, f_best = golden_min_interval(
                    lambda t: f(np.maximum(v + t * d, 0.0)),
                    t_lo,
                    t_hi,
                    rel_xtol=xtols[xtol_idx],
                )
                if f_best < val:
                    v = np.maximum(v + t_best * d, 0.0)
                    val = f_best
            if val_pass - val <= tol * max(1.0, abs(val)):
                if xtol_idx == len(xtols) - 1:
                    local_ok = True
                    break
                xtol_idx = len(xtols) - 1
            else:
                xtol_idx = min(xtol_idx + 1, len(xtols) - 1)
        if val < best_val:
            best_val, best_v = val, v
        converged = converged or local_ok
    if best_v is None:
        raise ConvergenceError("no start produced a finite objective value")
    return best_val, best_v, converged


def _greedy_staircase(norm_fn: Callable[[np.ndarray], float], n: int) -> np.ndarray | None:
    """Tight nonincreasing profile: fill coordinates left to right, raising
    each as far as the unit ball (and the previous coordinate) allows.  On
    polyhedral balls this walks to an extreme staircase, the natural start
    for maximizing a linear functional."""
    w = np.zeros(n)
    for i in range(n):
        cap = _INF if i == 0 else float(w[i - 1])
        if cap <= 0.0:
            break
        step = np.zeros(n)
        step[i] = 1.0
        hi = min(cap, 1.0)
        for _ in range(60):
            if norm_fn(w + hi * step) >= 1.0 or hi >= cap:
                break
            hi = min(2.0 * hi, cap)
        else:
            return None  # the ball is unbounded in this direction
        if norm_fn(w + hi * step) < 1.0:
            w[i] = hi  # the previous coordinate binds before the ball does
            continue
        lo = 0.0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if norm_fn(w + mid * step) <= 1.0:
                lo = mid
            else:
                hi = mid
        w[i] = lo
    return w if w.max() > 0 else None


def _feasible_interval(w: np.ndarray, d: np.ndarray, monotone: bool) -> tuple[float, float]:
    """t-range keeping w + t*d inside the cone (w itself feasible)."""
    t_lo, t_hi = -_INF, _INF
    if monotone:
        alpha = np.concatenate([w[:-1] - w[1:], w[-1:]])
        beta = np.concatenate([d[:-1] - d[1:], d[-1:]])
    else:
        alpha, beta = w, d
    alpha = np.maximum(alpha, 0.0)
    for a, b in zip(alpha, beta):
        if b > 1e-300:
            t_lo = max(t_lo, -a / b)
        elif b < -1e-300:
            t_hi = min(t_hi, a / -b)
    return min(t_lo, 0.0), max(t_hi, 0.0)


def maximize_linear_on_ball(
    c: np.ndarray,
    norm_fn: Callable[[np.ndarray], float],
    *,
    monotone: bool,
    rng: np.random.Generator,
    extra_starts: Sequence[np.ndarray] = (),
    n_random_starts: int = 6,
    subgrad_iters: int = 40,
    max_passes: int = 18,
    polish_from: int = 2,
    ratio_tol: float = 1e-12,
) -> MaximizeResult:
    """Maximize <c, w> over {w in cone : norm_fn(w) <= 1}.

    cone is the nonnegative orthant, intersected with the nonincreasing cone
    when ``monotone`` is set.  norm_fn must be convex, positively homogeneous
    and nonnegative on the cone, which makes the ratio <c, w>/norm_fn(w)
    quasiconcave: every line slice is unimodal, so golden-section line
    searches cannot get trapped below the optimum except on flats, which the
    restarts and the extra direction families are there to cross.
    """
    n = c.size
    evals = 0

    def project(w: np.ndarray) -> np.ndarray:
        return project_decreasing_nonneg(w) if monotone else np.maximum(w, 0.0)

    def ratio(w: np.ndarray) -> float:
        nonlocal evals
        dot = float(np.dot(c, w))
        nrm = norm_fn(w)
        evals += 1
        if nrm <= 0.0:
            if dot > 1e-12 * max(1.0, float(np.abs(w).max())):
                raise ValueError(
                    "the seminorm vanishes along a direction with positive pairing; "
                    "the polar value is +inf"
                )
            return -_INF
        if math.isinf(nrm):
            return 0.0
        return dot / nrm

    starts: list[np.ndarray] = []
    cpos = project(c.copy())
    if cpos.max() > 0:
        starts.append(cpos)
    starts.append(np.ones(n))
    spike = np.zeros(n)
    spike[0 if monotone else int(np.argmax(c))] = 1.0
    starts.append(spike)
    if monotone:
        greedy = _greedy_staircase(norm_fn, n)
        if greedy is not None:
            starts.append(greedy)
    for h in extra_starts:
        h = project(np.asarray(h, dtype=float))
        if h.max() > 0:
            starts.append(h)
    for _ in range(n_random_starts):
        starts.append(project(np.abs(rng.standard_normal(n))))

    c_dir = c / max(float(np.linalg.norm(c)), 1e-300)

    def ratio_from(dot: float, nrm: float, w: np.ndarray) -> float:
        if nrm <= 0.0:
            if dot > 1e-12 * max(1.0, float(np.abs(w).max())):
                raise ValueError(
                    "the seminorm vanishes along a direction with positive pairing; "
                    "the polar value is +inf"
                )
            return -_INF
        if math.isinf(nrm):
            return 0.0
        return dot / nrm

    scored: list[tuple[float, np.ndarray]] = []
    for w0 in starts:
        w = w0 / max(float(np.abs(w0).max()), 1e-300)
        nrm = norm_fn(w)
        evals += 1
        best_r = ratio_from(float(np.dot(c, w)), nrm, w)
        if nrm > 0 and math.isfinite(nrm):
            w = w / nrm
        best_w = w.copy()
        step0 = float(np.abs(w).max()) or 1.0
        for k in range(subgrad_iters):
            w = project(w + step0 / math.sqrt(k + 1.0) * c_dir)
            nrm = norm_fn(w)
            evals += 1
            r = ratio_from(float(np.dot(c, w)), nrm, w)
            if nrm > 1.0 and math.isfinite(nrm):
                w = w / nrm
            if r > best_r:
                best_r, best_w = r, w.copy()
        scored.append((best_r, best_w))

    scored.sort(key=lambda t: -t[0])
    overall_r, overall_w = scored[0]
    converged = False

    # coarse line searches first, full precision once a pass stops improving
    xtols = [3e-5, 3e-7, 3e-9, 3e-11]

    for _, w_start in scored[:polish_from]:
        w = w_start.copy()
        r_cur = ratio(w)
        local_converged = False
        xtol_idx = 0
        for pass_no in range(max_passes):
            r_pass = r_cur
            directions: list[np.ndarray] = [np.eye(n)[i] for i in range(n)]
            if monotone:
                directions += [
                    np.concatenate([np.ones(k), np.zeros(n - k)]) for k in range(2, n + 1)
                ]
                # transfers walk polytope edges that coordinate and prefix
                # moves stall on (raise a block, lower the next coordinate)
                for i in range(n - 1):
                    d = np.zeros(n)
                    d[: i + 1] = 1.0
                    d[i + 1] = -1.0
                    directions.append(d)
            directions.append(c_dir - w * (float(np.dot(c_dir, w)) / max(float(np.dot(w, w)), 1e-300)))
            for _ in range(max(2, n // 2)):
                directions.append(rng.standard_normal(n))
            scale_w = max(float(np.abs(w).max()), 1e-12)
            for d in directions:
                dn = float(np.abs(d).max())
                if dn <= 0:
                    continue
                d = d / dn
                t_lo, t_hi = _feasible_interval(w, d, monotone)
                t_lo = max(t_lo, -16.0 * scale_w)
                t_hi = min(t_hi, 16.0 * scale_w)
                if t_hi - t_lo <= 1e-16 * scale_w:
                    continue
                # w + t*d stays in the cone on [t_lo, t_hi]; no projection needed
                t_best, r_best = golden_max_interval(
                    lambda t: ratio(w + t * d),
                    t_lo,
                    t_hi,
                    rel_xtol=xtols[xtol_idx],
                )
                if r_best > r_cur:
                    w = project(w + t_best * d)
                    r_cur = r_best
                    m = float(np.abs(w).max())
                    if m > 0:
                        w = w / m
                        scale_w = 1.0
            if r_cur - r_pass <= ratio_tol * max(1.0, abs(r_cur)):
                # a stalled pass at full precision is converged; a stalled
                # coarse pass jumps straight to full precision
                if xtol_idx == len(xtols) - 1:
                    local_converged = True
                    break
                xtol_idx = len(xtols) - 1
            else:
                xtol_idx = min(xtol_idx + 1, len(xtols) - 1)
        if r_cur > overall_r:
            overall_r, overall_w = r_cur, w
        converged = converged or local_converged

    nrm = norm_fn(overall_w)
    if nrm <= 0.0 or math.isinf(nrm):
        return MaximizeResult(0.0, np.zeros(n), False, evals)
    x = overall_w / nrm
    return MaximizeResult(float(np.dot(c, x)), x, converged, evals)
