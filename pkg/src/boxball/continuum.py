"""Piecewise-linear paths, the continuous Pitman transform and zigzag samplers.

Paths are stored as breakpoint lists so that ``fractions.Fraction`` inputs
stay exact through the whole algebra; floats are used for Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Sequence

import numpy as np
from scipy import special, stats

from .lattice import ConfigurationError, DensityError, UndefinedDynamicsError
from .samplers import SamplerError, _rng

Number = Any  # float or Fraction


def _same_slope(a, b) -> bool:
    # exact for rationals; float breakpoints carry rounding from crossing times
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)
    return a == b


@dataclass(frozen=True)
class PiecewiseLinearPath:
    """Continuous path through ``(times[i], values[i])``, linear in between.

    ``left_slope``/``right_slope`` describe rays beyond the window (``None``
    means unknown).  A periodic path has ``times`` spanning ``[0, period]`` and
    extends by ``S(t + L) = S(t) + S(L) - S(0)``.
    """

    times: tuple
    values: tuple
    left_slope: Number | None = None
    right_slope: Number | None = None
    period: Number | None = None

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.times) != len(self.values) or len(self.times) < 1:
            raise ConfigurationError("times and values must be nonempty and of equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ConfigurationError("breakpoint times must be strictly increasing")
        if self.period is not None:
            if self.times[0] != 0 or self.times[-1] != self.period or self.values[0] != 0:
                raise ConfigurationError("periodic paths must span [0, L] with S(0) = 0")

    # -- basic access --------------------------------------------------------

    @property
    def start(self) -> Number:
        return self.times[0]

    @property
    def end(self) -> Number:
        return self.times[-1]

    @property
    def drift(self) -> Number:
        return self.values[-1] - self.values[0]

    def slopes(self) -> list:
        t, v = self.times, self.values
        return [(v[i + 1] - v[i]) / (t[i + 1] - t[i]) for i in range(len(t) - 1)]

    def segments(self) -> list[tuple]:
        """``(length, slope)`` for each segment."""
        t = self.times
        return [(t[i + 1] - t[i], s) for i, s in enumerate(self.slopes())]

    def value_at(self, t: Number) -> Number:
        if self.period is not None:
            L = self.period
            k = math.floor(t / L)
            return self._interior(t - k * L) + k * self.drift
        if t < self.start:
            if self.left_slope is None:
                raise IndexError(f"time {t} left of the path window")
            return self.values[0] - self.left_slope * (self.start - t)
        if t > self.end:
            if self.right_slope is None:
                raise IndexError(f"time {t} right of the path window")
            return self.values[-1] + self.right_slope * (t - self.end)
        return self._interior(t)

    def _interior(self, t: Number) -> Number:
        times = self.times
        lo, hi = 0, len(times) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if times[mid] <= t:
                lo = mid
            else:
                hi = mid
        if t == times[lo] or len(times) == 1:
            return self.values[lo]
        t0, t1 = times[lo], times[hi]
        v0, v1 = self.values[lo], self.values[hi]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    # -- transformations -----------------------------------------------------

    def simplify(self) -> "PiecewiseLinearPath":
        """Drop breakpoints where the slope does not change."""
        t, v = list(self.times), list(self.values)
        if len(t) <= 2:
            return self
        keep_t, keep_v = [t[0]], [v[0]]
        for i in range(1, len(t) - 1):
            s_in = (v[i] - keep_v[-1]) / (t[i] - keep_t[-1])
            s_out = (v[i + 1] - v[i]) / (t[i + 1] - t[i])
            if not _same_slope(s_in, s_out):
                keep_t.append(t[i])
                keep_v.append(v[i])
        keep_t.append(t[-1])
        keep_v.append(v[-1])
        return replace(self, times=tuple(keep_t), values=tuple(keep_v))

    def reverse(self) -> "PiecewiseLinearPath":
        """``R(t) = -S(-t)``; periodic paths are re-cut to ``[0, L]``."""
        if self.period is not None:
            L, d = self.period, self.values[-1]
            return PiecewiseLinearPath(tuple(L - t for t in reversed(self.times)),
                                       tuple(d - v for v in reversed(self.values)), period=L)
        return PiecewiseLinearPath(tuple(-t for t in reversed(self.times)),
                                   tuple(-v for v in reversed(self.values)),
                                   self.right_slope, self.left_slope)

    def shift(self, tau: Number) -> "PiecewiseLinearPath":
        """``theta^tau S (t) = S(t + tau) - S(tau)``."""
        base = self.value_at(tau)
        if self.period is None:
            return PiecewiseLinearPath(tuple(t - tau for t in self.times),
                                       tuple(v - base for v in self.values),
                                       self.left_slope, self.right_slope)
        L = self.period
        k = math.floor(tau / L)
        r = tau - k * L
        pts = [(t - r, self.values[i] - base + k * self.drift)
               for i, t in enumerate(self.times) if t >= r]
        pts += [(t + L - r, self.values[i] + self.drift - base + k * self.drift)
                for i, t in enumerate(self.times) if 0 < t <= r]
        if pts[0][0] != 0:
            pts.insert(0, (0 * L, 0 * L))
        if pts[-1][0] != L:
            pts.append((L, self.drift))
        times, values = zip(*pts)
        return PiecewiseLinearPath(times, values, period=L).simplify()

    def restrict(self, a: Number, b: Number) -> "PiecewiseLinearPath":
        inner = [(t, v) for t, v in zip(self.times, self.values) if a < t < b]
        pts = [(a, self.value_at(a))] + inner + [(b, self.value_at(b))]
        times, values = zip(*pts)
        return PiecewiseLinearPath(times, values)

    def unroll(self, left_periods: int, right_periods: int) -> "PiecewiseLinearPath":
        """Non-periodic copy of a periodic path on ``[-left L, (1 + right) L]``."""
        if self.period is None:
            raise ConfigurationError("only periodic paths can be unrolled")
        L, d = self.period, self.drift
        times, values = [], []
        for k in range(-left_periods, right_periods + 1):
            for i, (t, v) in enumerate(zip(self.times, self.values)):
                if i == 0 and times:
                    continue
                times.append(t + k * L)
                values.append(v + k * d)
        return PiecewiseLinearPath(times, values)

    def local_maxima(self) -> list:
        """Breakpoints where the slope changes from positive to negative."""
        sl = self.slopes()
        out = []
        if self.period is not None:
            n = len(sl)
            for i in range(n):
                if sl[i - 1] > 0 and sl[i] < 0:
                    out.append(self.times[i])
            return out
        before = [self.left_slope] + sl
        after = sl + [self.right_slope]
        for i, t in enumerate(self.times):
            b, a = before[i], after[i]
            if b is not None and a is not None and b > 0 and a < 0:
                out.append(t)
        return out

    def to_dict(self) -> dict:
        f = float
        return {"times": [f(t) for t in self.times], "values": [f(v) for v in self.values],
                "left_slope": None if self.left_slope is None else f(self.left_slope),
                "right_slope": None if self.right_slope is None else f(self.right_slope),
                "period": None if self.period is None else f(self.period)}


# --------------------------------------------------------------------------
# running maximum and Pitman's transformation


def _running_max(times: Sequence, values: Sequence, m0) -> tuple[list, list, list]:
    """Refine breakpoints with level crossings; return ``(times, S, M)``."""
    out_t, out_s, out_m = [times[0]], [values[0]], [max(m0, values[0])]
    m = out_m[0]
    for i in range(len(times) - 1):
        t0, t1 = times[i], times[i + 1]
        v0, v1 = values[i], values[i + 1]
        if v0 < m < v1:
            tc = t0 + (m - v0) * (t1 - t0) / (v1 - v0)
            if t0 < tc < t1:
                out_t.append(tc)
                out_s.append(m)
                out_m.append(m)
        m = max(m, v1)
        out_t.append(t1)
        out_s.append(v1)
        out_m.append(m)
    return out_t, out_s, out_m


def pl_running_max(path: PiecewiseLinearPath, past_max: Number | None = None) -> PiecewiseLinearPath:
    """Past maximum ``M_t = sup_{u <= t} S_u`` as a piecewise-linear path.

    The policy follows from the path: periodic paths look back one period;
    a nonnegative left ray means the supremum is attained in the window; an
    unknown left ray uses ``past_max`` (or the window alone).
    """
    if path.period is not None:
        if path.drift <= 0:
            raise DensityError("S_L <= 0: the periodic transform is undefined")
        ext = path.unroll(1, 0)
        t, _, m = _running_max(ext.times, ext.values, ext.values[0])
        pts = [(ti, mi) for ti, mi in zip(t, m) if ti >= 0]
        times, values = zip(*pts)
        return PiecewiseLinearPath(times, values, period=path.period).simplify()
    m0 = _left_sup(path, past_max)
    t, s, m = _running_max(path.times, path.values, m0)
    t, s, m, right = _right_extension(path, t, s, m)
    left = None if path.left_slope is None else max(path.left_slope, 0 * path.left_slope)
    return PiecewiseLinearPath(t, m, left, right).simplify()


def _left_sup(path: PiecewiseLinearPath, past_max):
    if path.left_slope is not None:
        if path.left_slope < 0:
            raise UndefinedDynamicsError("the path is unbounded above to the left")
        if past_max is not None:
            raise ConfigurationError("past_max only applies to paths with an unknown past")
        return path.values[0]
    return path.values[0] if past_max is None else max(path.values[0], past_max)


def _right_extension(path, t, s, m):
    rs = path.right_slope
    if rs is None:
        return t, s, m, None
    if rs > 0 and s[-1] < m[-1]:
        # the ray climbs back to the running maximum
        tc = t[-1] + (m[-1] - s[-1]) / rs
        return t + [tc], s + [m[-1]], m + [m[-1]], rs
    return t, s, m, (rs if rs > 0 else 0 * rs)


def pl_pitman(path: PiecewiseLinearPath, past_max: Number | None = None) -> PiecewiseLinearPath:
    """``TS = 2M - S - 2M_0`` with exact breakpoint arithmetic."""
    if path.period is not None:
        if path.drift <= 0:
            raise DensityError("S_L <= 0: the periodic transform is undefined")
        ext = path.unroll(1, 0)
        t, s, m = _running_max(ext.times, ext.values, ext.values[0])
        pts = [(ti, 2 * mi - si) for ti, si, mi in zip(t, s, m) if ti >= 0]
        base = pts[0][1]
        times, values = zip(*[(ti, vi - base) for ti, vi in pts])
        return PiecewiseLinearPath(times, values, period=path.period).simplify()
    if not path.start <= 0 <= path.end:
        raise UndefinedDynamicsError("the path window must contain time 0")
    m0 = _left_sup(path, past_max)
    t, s, m = _running_max(path.times, path.values, m0)
    t, s, m, _ = _right_extension(path, t, s, m)
    if 0 not in t:
        raise UndefinedDynamicsError("time 0 must be a breakpoint")
    m_at_0 = m[t.index(0)]
    ts = [2 * mi - si - 2 * m_at_0 for si, mi in zip(s, m)]
    ls = path.left_slope
    rs = path.right_slope
    return PiecewiseLinearPath(t, ts, ls, None if rs is None else abs(rs)).simplify()


def pl_inverse_pitman(path: PiecewiseLinearPath, future_min: Number | None = None) -> PiecewiseLinearPath:
    """Reflection in the future minimum, via time reversal and :func:`pl_pitman`."""
    past = None if future_min is None else -future_min
    return pl_pitman(path.reverse(), past).reverse()


def shift_to_local_max(path: PiecewiseLinearPath, origin: Number = 0) -> tuple[PiecewiseLinearPath, Number]:
    """``theta^tau S`` with ``tau`` the first local maximum at or after ``origin``."""
    maxima = [t for t in path.simplify().local_maxima() if t >= origin]
    if not maxima:
        raise ConfigurationError("no local maximum at or right of the origin inside the window")
    tau = maxima[0]
    return path.shift(tau), tau


def pl_tstar(path: PiecewiseLinearPath, past_max: Number | None = None) -> tuple[PiecewiseLinearPath, Number]:
    """``theta^tau (TS)``: Pitman's transformation followed by re-rooting at a local max."""
    return shift_to_local_max(pl_pitman(path, past_max))


# --------------------------------------------------------------------------
# rescaling


def rescale_path(values: Sequence[Number] | np.ndarray, a: Number, b: Number,
                 first: int = 0) -> PiecewiseLinearPath:
    """Path ``t -> a S_{t/b}`` from lattice values ``S_first, S_first+1, ...``."""
    if a <= 0 or b <= 0:
        raise ConfigurationError("scale factors must be positive")
    vals = np.asarray(values) if isinstance(values, np.ndarray) else values
    n = len(vals)
    if isinstance(vals, np.ndarray):
        times = ((np.arange(n) + first) * b).tolist()
        scaled = (vals * a).tolist()
    else:
        times = [(first + i) * b for i in range(n)]
        scaled = [a * v for v in vals]
    return PiecewiseLinearPath(times, scaled)


# --------------------------------------------------------------------------
# zigzag process


@dataclass(frozen=True)
class ZigzagSpec:
    lambda0: float
    lambda1: float

    def __post_init__(self):
        if self.lambda0 <= 0 or self.lambda1 <= 0:
            raise SamplerError("zigzag rates must be positive")

    @property
    def nu1(self) -> float:
        return self.lambda0 / (self.lambda0 + self.lambda1)

    @property
    def drift(self) -> float:
        return (self.lambda1 - self.lambda0) / (self.lambda1 + self.lambda0)

    @property
    def carrier_atom(self) -> float:
        return self.drift

    @property
    def carrier_mean(self) -> float:
        return 2 * self.lambda0 / (self.lambda1 ** 2 - self.lambda0 ** 2)

    def rate(self, state: int) -> float:
        return self.lambda1 if state else self.lambda0

    def carrier_tail(self, g):
        """``P(W_0 > g)`` for the stationary carrier (requires lambda0 < lambda1)."""
        g = np.asarray(g, dtype=float)
        tail = 2 * self.lambda0 / (self.lambda0 + self.lambda1) * np.exp(-(self.lambda1 - self.lambda0) * g)
        return np.where(g < 0, 1.0, tail)

    def _require_drift(self):
        if not self.lambda0 < self.lambda1:
            raise SamplerError("the carrier is finite only for lambda0 < lambda1")


def _backward_sup(rng: np.random.Generator, spec: ZigzagSpec, state: np.ndarray,
                  tolerance: float, max_rounds: int = 100000) -> tuple[np.ndarray, np.ndarray]:
    """``sup_{u <= a} S_u - S_a`` given the state just left of ``a``.

    Going left, a state-1 sojourn raises the path and a state-0 sojourn lowers
    it.  Rows stop once ``P(W > gap) / nu(next state)`` is below ``tolerance``.
    """
    spec._require_drift()
    n = state.shape[0]
    nu = np.array([1 - spec.nu1, spec.nu1])
    rates = np.array([spec.lambda0, spec.lambda1])
    height = np.zeros(n)
    best = np.zeros(n)
    cert = np.ones(n)
    s = state.astype(np.int8).copy()
    active = np.arange(n)
    for _ in range(max_rounds):
        if active.size == 0:
            return best, cert
        cur = s[active]
        length = rng.exponential(1.0 / rates[cur])
        height[active] += np.where(cur == 1, length, -length)
        best[active] = np.maximum(best[active], height[active])
        s[active] = 1 - cur
        cert[active] = spec.carrier_tail(best[active] - height[active]) / nu[s[active]]
        active = active[cert[active] >= tolerance]
    raise SamplerError("left buffer could not be certified")


def sample_zigzag_carrier(spec: ZigzagSpec, size: int, seed=None,
                          tolerance: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Stationary carrier ``W_0`` samples with their certificates."""
    rng = _rng(seed)
    state = (rng.random(size) < spec.nu1).astype(np.int8)
    return _backward_sup(rng, spec, state, tolerance)


def _sojourns(rng: np.random.Generator, spec: ZigzagSpec, state: int, horizon: float) -> list[tuple[float, int]]:
    # at least one sojourn, so that the one straddling the horizon is known
    out, total = [], 0.0
    while not out or total < horizon:
        length = float(rng.exponential(1.0 / spec.rate(state)))
        out.append((length, state))
        total += length
        state = 1 - state
    return out


def _build(left: list[tuple[float, int]], right: list[tuple[float, int]], a: float, b: float):
    """Breakpoints of the zigzag with sojourns listed outward from 0."""
    times, values = [0.0], [0.0]
    t = v = 0.0
    for length, st in right:
        end = min(t + length, b)
        if end == t:
            break
        v += (1 - 2 * st) * (end - t)
        t = end
        times.append(t)
        values.append(v)
        if t >= b:
            break
    lt, lv = [], []
    t = v = 0.0
    for length, st in left:
        end = max(t - length, a)
        if end == t:
            break
        v -= (1 - 2 * st) * (t - end)
        t = end
        lt.append(t)
        lv.append(v)
        if t <= a:
            break
    return lt[::-1] + times, lv[::-1] + values


@dataclass
class ZigzagSample:
    path: PiecewiseLinearPath
    past_max: float
    certificate: float
    window: tuple[float, float]

    def transformed(self) -> PiecewiseLinearPath:
        return pl_pitman(self.path, self.past_max)


def sample_zigzag(spec: ZigzagSpec, window, seed=None, tolerance: float = 1e-9,
                  start_state: int | None = None) -> ZigzagSample:
    """Stationary zigzag on ``[a, b]`` plus a certified ``sup_{u < a} S_u``."""
    rng = _rng(seed)
    a, b = float(window[0]), float(window[1])
    if not a <= 0 <= b:
        raise SamplerError("window must contain 0")
    s0 = int(rng.random() < spec.nu1) if start_state is None else start_state
    right = _sojourns(rng, spec, s0, b)
    left = _sojourns(rng, spec, s0, -a)
    return _finish(rng, spec, left, right, a, b, tolerance)


def _finish(rng, spec, left, right, a, b, tolerance) -> ZigzagSample:
    times, values = _build(left, right, a, b)
    # the sojourn crossing a continues beyond it; after that a fresh sojourn
    # of the other state starts, from where the certified backward sup takes over
    edge_state = left[-1][1]
    rest = sum(length for length, _ in left) + a
    step = rest if edge_state == 1 else -rest
    sup, cert = _backward_sup(rng, spec, np.array([1 - edge_state], dtype=np.int8), tolerance)
    rel = max(0.0, step, step + float(sup[0]))
    past = values[0] + rel
    path = PiecewiseLinearPath(times, values)
    return ZigzagSample(path, past, float(cert[0]), (a, b))


def sample_zigzag_palm(spec: ZigzagSpec, window, seed=None, tolerance: float = 1e-9) -> ZigzagSample:
    """Zigzag with a local maximum at 0: state 1 just right of 0, state 0 just left."""
    rng = _rng(seed)
    a, b = float(window[0]), float(window[1])
    if not a < 0 < b:
        raise SamplerError("Palm window must contain 0 in its interior")
    right = _sojourns(rng, spec, 1, b)
    left = _sojourns(rng, spec, 0, -a)
    return _finish(rng, spec, left, right, a, b, tolerance)


# --------------------------------------------------------------------------
# periodic paths


def sample_periodic_zigzag(spec: ZigzagSpec, L: float, seed=None, max_tries: int = 100000) -> PiecewiseLinearPath:
    """L-periodic zigzag: uniform start state, bridge ``eta_L = eta_0``, ``S_L > 0``.

    Reweighting the stationary law by ``nu(eta_0)^{-1}`` turns the initial
    state into a uniform draw, so plain rejection is exact.
    """
    rng = _rng(seed)
    for _ in range(max_tries):
        s0 = int(rng.integers(2))
        soj = _sojourns(rng, spec, s0, L)
        times, values = [0.0], [0.0]
        t = v = 0.0
        last = s0
        for length, st in soj:
            end = min(t + length, L)
            v += (1 - 2 * st) * (end - t)
            t = end
            last = st
            times.append(t)
            values.append(v)
            if t >= L:
                break
        if last == s0 and v > 0:
            times[-1] = L
            return PiecewiseLinearPath(times, values, period=L).simplify()
    raise SamplerError(f"no accepted periodic zigzag in {max_tries} tries")


def periodic_zigzag_mean(spec: ZigzagSpec, L: float, tail: float = 1e-15) -> tuple[float, float]:
    """``(E[S_L], acceptance)`` for the periodic zigzag law by uniformisation.

    With ``n`` Poisson(Lambda L) clock rings and ``j`` of the ``n + 1`` spacings
    in state 1, the time in state 1 is ``L B`` with ``B ~ Beta(j, n + 1 - j)``.
    """
    lam = max(spec.lambda0, spec.lambda1)
    n_max = int(stats.poisson.ppf(1 - tail, lam * L)) + 5
    P = np.array([[1 - spec.lambda0 / lam, spec.lambda0 / lam],
                  [spec.lambda1 / lam, 1 - spec.lambda1 / lam]])
    num = den = 0.0
    for s0 in (0, 1):
        # dist[s, j]: probability of current state s with j state-1 spacings so far
        dist = np.zeros((2, n_max + 2))
        dist[s0, s0] = 1.0
        for n in range(n_max + 1):
            w = stats.poisson.pmf(n, lam * L)
            row = dist[s0, : n + 2]
            j = np.arange(n + 2)
            a_, b_ = j, n + 1 - j
            with np.errstate(divide="ignore", invalid="ignore"):
                below = np.where(j == 0, 1.0, np.where(j == n + 1, 0.0,
                                 special.betainc(np.maximum(a_, 1), np.maximum(b_, 1), 0.5)))
                mean_b = np.where(j == 0, 0.0, np.where(j == n + 1, 0.0,
                                  j / (n + 1) * special.betainc(a_ + 1, np.maximum(b_, 1), 0.5)))
            den += w * np.sum(row * below)
            num += w * L * np.sum(row * (below - 2 * mean_b))
            nxt = np.zeros_like(dist)
            nxt[0, :] += dist[0] * P[0, 0] + dist[1] * P[1, 0]
            nxt[1, 1:] += dist[0, :-1] * P[0, 1] + dist[1, :-1] * P[1, 1]
            dist = nxt
    return num / den, den / 2


def _periodic_walk(rng, p: float, N: int) -> np.ndarray:
    steps = np.where(rng.random(N) < p, -1, 1)
    return np.concatenate(([0], np.cumsum(steps)))


def sample_periodic_bm(c: float, L: float, eps: float, seed=None, max_tries: int = 100000,
                       K: float | None = None, floor: float = 1e-4) -> PiecewiseLinearPath:
    """Grid approximant of periodic Brownian motion with drift ``c`` on ``[0, L]``.

    A walk with ``p = (1 - eps c)/2`` over ``L / eps^2`` steps, conditioned on
    ``S_N > 0`` (and, with ``K``, on the rescaled periodic carrier staying
    ``<= K``), rescaled by ``(eps, eps^2)``.
    """
    from .lattice import periodic_carrier_many

    rng = _rng(seed)
    N = int(round(L / eps ** 2))
    p = (1 - eps * c) / 2
    if not 0 < p < 1:
        raise SamplerError("need |eps c| < 1")
    for tries in range(1, max_tries + 1):
        s = _periodic_walk(rng, p, N)
        if s[-1] <= 0:
            continue
        if K is not None:
            w = periodic_carrier_many(((1 - np.diff(s)) // 2)[None, :])[0]
            if eps * w.max() > K:
                if tries >= 1000 and 1 / tries < floor:
                    raise SamplerError(f"acceptance rate below {floor} after {tries} tries")
                continue
        times = (np.arange(N + 1) * eps ** 2).tolist()
        times[-1] = L
        return PiecewiseLinearPath(times, (eps * s).tolist(), period=L)
    raise SamplerError(f"no accepted sample in {max_tries} tries")


def sample_periodic_bm_bounded(c: float, L: float, K: float, eps: float, seed=None,
                               max_tries: int = 100000, floor: float = 1e-4) -> PiecewiseLinearPath:
    """As :func:`sample_periodic_bm`, also conditioned on ``sup W^L <= K``."""
    return sample_periodic_bm(c, L, eps, seed, max_tries, K, floor)


def sojourn_lengths(path: PiecewiseLinearPath, drop_edges: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Lengths of the down (slope < 0) and up (slope > 0) segments of a simplified path."""
    segs = path.simplify().segments()
    if drop_edges:
        segs = segs[1:-1]
    down = np.array([float(length) for length, s in segs if s < 0])
    up = np.array([float(length) for length, s in segs if s > 0])
    return down, up
