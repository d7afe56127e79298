"""Exact laws on finite configuration spaces and the tests built on them.

Window tables are indexed by the integer whose binary digits, most
significant first, are ``x_1 .. x_M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .lattice import DensityError, periodic_transform_many
from .samplers import (INF, ENUMERATION_CUTOFF, CyclicMarkov, GibbsPeriodic, PeriodicBounded,
                       PeriodicIID, SamplerError, _bits_of_indices, as_gibbs, gibbs_log_weights,
                       quasistationary_solve)


class DistributionError(ValueError):
    """Inconsistent or unsupported distribution request."""


# --------------------------------------------------------------------------
# tables


@dataclass
class DistributionTable:
    """Law on cyclic words of length ``N`` (support = positive-probability words)."""

    N: int
    support: list[str]
    probs: np.ndarray
    Z: float | None = None
    log_Z: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if len(set(self.support)) != len(self.support):
            raise DistributionError("support entries must be unique")
        if abs(self.probs.sum() - 1) > 1e-12:
            raise DistributionError(f"probabilities sum to {self.probs.sum()!r}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.support, self.probs.tolist()))

    def bits(self) -> np.ndarray:
        return np.array([[int(ch) for ch in w] for w in self.support], dtype=np.int8).reshape(-1, self.N)

    def marginal(self, M: int) -> "WindowMarginal":
        table = np.zeros(1 << M)
        for word, q in zip(self.support, self.probs):
            table[int(word[:M], 2)] += q
        return WindowMarginal(M, table)

    def to_record(self) -> dict:
        return {"N": self.N, "Z": self.Z, "log_Z": self.log_Z, "table": self.as_dict(), **self.meta}


@dataclass
class WindowMarginal:
    """Law of ``(x_1, ..., x_M)`` as a table of ``2^M`` probabilities."""

    M: int
    table: np.ndarray

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=float)
        if self.table.shape != (1 << self.M,):
            raise DistributionError("table must have 2^M entries")
        if abs(self.table.sum() - 1) > 1e-12:
            raise DistributionError(f"window law sums to {self.table.sum()!r}")

    def marginal(self, M: int) -> "WindowMarginal":
        """Law of the first ``M`` coordinates."""
        if M > self.M:
            raise DistributionError("cannot extend a window law")
        return WindowMarginal(M, self.table.reshape(1 << M, -1).sum(axis=1))

    def to_record(self) -> dict:
        return {format(i, f"0{self.M}b"): float(q) for i, q in enumerate(self.table)}


def tv_distance(a, b) -> float:
    """Total variation ``(1/2) sum |a - b|`` between tables on the same universe."""
    if isinstance(a, DistributionTable) and isinstance(b, DistributionTable):
        if a.N != b.N:
            raise DistributionError("tables live on different configuration spaces")
        da, db = a.as_dict(), b.as_dict()
        return 0.5 * sum(abs(da.get(k, 0.0) - db.get(k, 0.0)) for k in set(da) | set(db))
    if isinstance(a, WindowMarginal):
        a = a.table
    if isinstance(b, WindowMarginal):
        b = b.table
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DistributionError("distributions have different universes")
    return float(0.5 * np.abs(a - b).sum())


# --------------------------------------------------------------------------
# enumeration and pushforward


def enumerate_gibbs(spec, cutoff: int = ENUMERATION_CUTOFF) -> DistributionTable:
    """Exact Gibbs law by enumeration of all admissible cyclic words."""
    spec = as_gibbs(spec)
    if spec.N > cutoff:
        raise DistributionError(f"N = {spec.N} exceeds the enumeration cutoff {cutoff}")
    try:
        lw = gibbs_log_weights(spec)
    except SamplerError as exc:
        raise DistributionError(str(exc)) from exc
    keep = np.flatnonzero(lw > -INF)
    top = lw[keep].max()
    w = np.exp(lw[keep] - top)
    s = w.sum()
    log_Z = top + math.log(s)
    support = [format(int(i), f"0{spec.N}b") for i in keep]
    Z = math.exp(log_Z) if log_Z < 700 else INF
    return DistributionTable(spec.N, support, w / s, Z, log_Z, {"beta": list(spec.beta)})


def pushforward_T(table: DistributionTable) -> DistributionTable:
    """Image law under one periodic step."""
    x = table.bits()
    try:
        y = periodic_transform_many(x)
    except DensityError as exc:
        raise DistributionError("support contains a configuration with f_0 >= N/2") from exc
    acc: dict[str, float] = {}
    for row, q in zip(y, table.probs):
        key = "".join("1" if v else "0" for v in row)
        acc[key] = acc.get(key, 0.0) + q
    keys = list(acc)
    probs = np.array([acc[k] for k in keys])
    return DistributionTable(table.N, keys, probs / probs.sum(), table.Z, table.log_Z, dict(table.meta))


def point_mass(word: str) -> DistributionTable:
    return DistributionTable(len(word), [word], np.ones(1))


# --------------------------------------------------------------------------
# window marginals of the periodic laws


def _windows(M: int) -> np.ndarray:
    return _bits_of_indices(np.arange(1 << M), M)


def _budget(N: int) -> int:
    """Largest admissible particle count: ``f_0 < N/2``."""
    return (N - 1) // 2


def _iid_window(N: int, p: float, M: int) -> np.ndarray:
    k = _windows(M).sum(axis=1)
    c = _budget(N)
    logw = k * math.log(p) + (M - k) * math.log1p(-p)
    tail = np.where(c - k >= 0, stats.binom.logcdf(c - k, N - M, p), -np.inf)
    if N == M:
        tail = np.where(k <= c, 0.0, -np.inf)
    lw = logw + tail
    w = np.exp(lw - lw.max())
    return w / w.sum()


def _markov_window(N: int, p0: float, p1: float, M: int) -> np.ndarray:
    P = np.array([[1 - p0, p0], [1 - p1, p1]])
    c = _budget(N)
    L = N - M
    # D[s][e, j]: probability that L further steps from state s end in e with j more particles
    D = []
    for s in (0, 1):
        cur = np.zeros((2, c + 1))
        cur[s, 0] = 1.0
        for _ in range(L):
            nxt = np.zeros_like(cur)
            nxt[0] = cur[0] * P[0, 0] + cur[1] * P[1, 0]
            nxt[1, 1:] = cur[0, :-1] * P[0, 1] + cur[1, :-1] * P[1, 1]
            cur = nxt
        D.append(np.cumsum(cur, axis=1))
    out = np.zeros(1 << M)
    for i, y in enumerate(_windows(M)):
        k = int(y.sum())
        if k > c:
            continue
        w = np.prod([P[y[n - 1], y[n]] for n in range(1, M)]) if M > 1 else 1.0
        if L == 0:
            out[i] = w * P[y[-1], y[0]]
        else:
            left = D[y[-1]][:, c - k]
            out[i] = w * (left[0] * P[0, y[0]] + left[1] * P[1, y[0]])
    return out / out.sum()


def _bounded_window(N: int, p: float, K: int, M: int) -> np.ndarray:
    c = _budget(N)
    L = N - M
    # T[s, w, j]: mass of L-step killed carrier paths from s to w with j up-steps
    T = np.zeros((K + 1, K + 1, c + 1))
    T[np.arange(K + 1), np.arange(K + 1), 0] = 1.0
    log_scale = 0.0
    for _ in range(L):
        nxt = np.zeros_like(T)
        nxt[:, 1:, 1:] += p * T[:, :-1, :-1]
        nxt[:, :-1, :] += (1 - p) * T[:, 1:, :]
        nxt[:, 0, :] += (1 - p) * T[:, 0, :]
        m = nxt.max()
        if m == 0:
            break
        T = nxt / m
        log_scale += math.log(m)
    T = np.cumsum(T, axis=2)
    lw = np.full(1 << M, -np.inf)
    for i, y in enumerate(_windows(M)):
        k = int(y.sum())
        if k > c:
            continue
        terms = []
        for w0 in range(K + 1):
            w = w0
            ok = True
            for v in y:
                w = w + 1 if v else max(w - 1, 0)
                if w > K:
                    ok = False
                    break
            if not ok:
                continue
            if L == 0:
                if w == w0:
                    terms.append(1.0)
            else:
                terms.append(T[w, w0, c - k])
        tot = sum(terms)
        if tot > 0:
            lw[i] = math.log(tot) + k * math.log(p) + (M - k) * math.log1p(-p)
    w = np.exp(lw - lw.max())
    return w / w.sum()


def window_marginal_periodic(spec, M: int) -> WindowMarginal:
    """Exact law of ``(x_1..x_M)`` under a periodic measure, by transfer matrices.

    The particle count is carried along as part of the state so that the
    global constraint ``f_0 < N/2`` is exact.  General Gibbs specs fall back to
    enumeration.
    """
    N = spec.N
    if not 1 <= M <= N:
        raise DistributionError("need 1 <= M <= N")
    if isinstance(spec, PeriodicIID):
        return WindowMarginal(M, _iid_window(N, spec.p, M))
    if isinstance(spec, CyclicMarkov):
        return WindowMarginal(M, _markov_window(N, spec.p0, spec.p1, M))
    if isinstance(spec, PeriodicBounded):
        return WindowMarginal(M, _bounded_window(N, spec.p, spec.K, M))
    if isinstance(spec, GibbsPeriodic):
        return enumerate_gibbs(spec).marginal(M)
    raise DistributionError(f"no window marginal for {type(spec).__name__}")


def bounded_carrier_law(spec: PeriodicBounded) -> DistributionTable:
    """i.i.d. law conditioned on ``f_0 < N/2`` and on the periodic carrier staying <= K."""
    from .lattice import periodic_carrier_many

    N = spec.N
    if N > ENUMERATION_CUTOFF:
        raise DistributionError("enumeration cutoff exceeded")
    x = _bits_of_indices(np.arange(1 << N), N)
    k = x.sum(axis=1)
    adm = 2 * k < N
    x, k = x[adm], k[adm]
    w = periodic_carrier_many(x).max(axis=1) <= spec.K
    x, k = x[w], k[w]
    lw = k * math.log(spec.p) + (N - k) * math.log1p(-spec.p)
    q = np.exp(lw - lw.max())
    support = ["".join("1" if v else "0" for v in row) for row in x]
    return DistributionTable(N, support, q / q.sum())


# --------------------------------------------------------------------------
# infinite-volume laws


def _lindley_path(y: Sequence[int], w0: int) -> list[int]:
    out = [w0]
    for v in y:
        out.append(out[-1] + 1 if v else max(out[-1] - 1, 0))
    return out


def limit_window_law(family: str, params: dict, M: int) -> WindowMarginal:
    """Window law of the infinite-volume limit of a periodic family.

    ``family`` is ``"iid"``, ``"markov"`` or ``"bounded"``; an i.i.d. family
    with ``p > 1/2`` collapses to the fair-coin law.
    """
    ys = _windows(M)
    if family == "iid":
        p = params["p"]
        p = 0.5 if p > 0.5 else p
        k = ys.sum(axis=1)
        return WindowMarginal(M, p ** k * (1 - p) ** (M - k))
    if family == "markov":
        p0, p1 = params["p0"], params["p1"]
        P = np.array([[1 - p0, p0], [1 - p1, p1]])
        rho = p0 / (1 - p1 + p0)
        nu = np.array([1 - rho, rho])
        t = np.array([nu[y[0]] * np.prod([P[y[n - 1], y[n]] for n in range(1, M)]) for y in ys])
        return WindowMarginal(M, t)
    if family == "bounded":
        sol = quasistationary_solve(params["p"], params["K"])
        Pt = sol.tilted()
        K = sol.K
        t = np.zeros(1 << M)
        for i, y in enumerate(ys):
            for w0 in range(K + 1):
                path = _lindley_path(y, w0)
                if max(path) > K:
                    continue
                t[i] += sol.pi_tilde[w0] * np.prod([Pt[path[n], path[n + 1]] for n in range(M)])
        return WindowMarginal(M, t)
    raise DistributionError(f"unknown family {family!r}")


def periodic_spec(family: str, params: dict, N: int):
    if family == "iid":
        return PeriodicIID(N, params["p"])
    if family == "markov":
        return CyclicMarkov(N, params["p0"], params["p1"])
    if family == "bounded":
        return PeriodicBounded(N, params["p"], params["K"])
    raise DistributionError(f"unknown family {family!r}")


def limit_convergence_report(family: str, params: dict, M: int, grid: Sequence[int],
                             floor: float = 1e-14) -> dict:
    """TV between periodic window laws and the infinite-volume window law along ``grid``."""
    limit = limit_window_law(family, params, M)
    rows = []
    for N in grid:
        tv = tv_distance(window_marginal_periodic(periodic_spec(family, params, N), M), limit)
        rows.append({"N": int(N), "tv": tv})
    tvs = [r["tv"] for r in rows]
    # once both values sit at rounding level the comparison carries no information
    decreasing = all(b < a or max(a, b) < floor for a, b in zip(tvs, tvs[1:]))
    return {"family": family, "params": dict(params), "M": M, "rows": rows,
            "decreasing": decreasing, "final_tv": tvs[-1]}


# --------------------------------------------------------------------------
# carrier marginals


def iid_carrier_parameters(p):
    """``(pi_0, r)`` with ``pi_x = pi_0 r^x``; generic arithmetic (floats or Fractions)."""
    if not 0 <= p < 0.5:
        raise DistributionError("need 0 <= p < 1/2")
    return (1 - 2 * p) / (1 - p), p / (1 - p)


def markov_carrier_parameters(p0, p1):
    """``(P(W=0), P(W=1), q)`` with ``P(W=m) = P(W=1) q^{m-1}`` for ``m >= 1``."""
    if not (0 < p0 < 1 and 0 <= p1 < 1 and p0 + p1 < 1):
        raise DistributionError("need p0 in (0,1), p1 in [0,1), p0 + p1 < 1")
    atom = (1 - p0 - p1) / ((1 - p0) * (1 + p0 - p1))
    first = p0 * (1 - p0 + p1) * (1 - p0 - p1) / ((1 - p0) ** 2 * (1 + p0 - p1))
    return atom, first, p1 / (1 - p0)


def _truncate(pmf_at, tol: float = 1e-14, max_terms: int = 1 << 20) -> np.ndarray:
    out = []
    total = 0.0
    x = 0
    while total < 1 - tol and x < max_terms:
        v = pmf_at(x)
        out.append(v)
        total += v
        x += 1
    return np.array(out)


def carrier_marginal_iid(p: float, tol: float = 1e-14) -> np.ndarray:
    """``P(W_0 = x)`` for the i.i.d. carrier, up to cumulative mass ``1 - tol``."""
    pi0, r = iid_carrier_parameters(p)
    return _truncate(lambda x: pi0 * r ** x, tol)


def carrier_marginal_markov(p0: float, p1: float, tol: float = 1e-14) -> np.ndarray:
    """``P(W_0 = m)`` for the stationary Markov carrier, up to mass ``1 - tol``."""
    atom, first, q = markov_carrier_parameters(p0, p1)
    return _truncate(lambda m: atom if m == 0 else first * q ** (m - 1), tol)


def palm_window_law(p0: float, p1: float, lo: int, hi: int) -> np.ndarray:
    """Law of ``eta_lo..eta_hi`` for the Markov chain given ``eta_0 = 0, eta_1 = 1``."""
    if not (lo <= 0 and hi >= 1):
        raise DistributionError("window must contain sites 0 and 1")
    P = np.array([[1 - p0, p0], [1 - p1, p1]])
    M = hi - lo + 1
    out = np.zeros(1 << M)
    for i, y in enumerate(_windows(M)):
        if y[-lo] != 0 or y[1 - lo] != 1:
            continue
        # reversibility: the backward kernel equals the forward kernel
        q = 1.0
        for n in range(-lo, 0, -1):
            q *= P[y[n], y[n - 1]]
        for n in range(1 - lo, M - 1):
            q *= P[y[n], y[n + 1]]
        out[i] = q
    return out


# --------------------------------------------------------------------------
# tests


def window_counts(x: np.ndarray) -> np.ndarray:
    """Counts of each ``2^M`` pattern over the rows of a 0/1 array."""
    x = np.asarray(x, dtype=np.int64)
    M = x.shape[1]
    idx = x @ (1 << np.arange(M - 1, -1, -1))
    return np.bincount(idx, minlength=1 << M)


def chi_square_test(observed, expected, min_expected: float = 5.0) -> float:
    """Pearson goodness-of-fit p-value; cells with small expectation are pooled."""
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.shape != exp.shape:
        raise DistributionError("observed and expected have different shapes")
    if np.any((exp <= 0) & (obs > 0)):
        raise DistributionError("observation in a cell of zero expected probability")
    n = obs.sum()
    exp = exp / exp.sum() * n
    keep = exp > 0
    obs, exp = obs[keep], exp[keep]
    small = exp < min_expected
    if small.any():
        obs = np.append(obs[~small], obs[small].sum())
        exp = np.append(exp[~small], exp[small].sum())
    if len(obs) < 2:
        return 1.0
    return float(stats.chisquare(obs, exp).pvalue)


def two_sample_chi_square(counts_a, counts_b) -> float:
    """Homogeneity p-value for two count vectors over the same cells."""
    table = np.vstack((np.asarray(counts_a), np.asarray(counts_b)))
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(table, correction=False).pvalue)


def ks_test(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov p-value against a callable cdf."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).pvalue)
