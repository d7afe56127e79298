"""Seedable samplers for the random initial configurations.

Every sampler works on a batch of independent rows and returns numpy arrays.
Stationary two-sided laws are represented on a finite window ``[a, b]``
together with the carrier value ``W_{a-1}``, which summarises the whole past.
When that value is exact the certificate is 0; otherwise it bounds the
probability that the unseen past would have changed it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal

from .lattice import BUFFERED, BinaryConfiguration, ConfigurationError
from .solitons import profile_of_word

INF = math.inf
DEFAULT_TOLERANCE = 1e-9
ENUMERATION_CUTOFF = 20


class SamplerError(ValueError):
    """Invalid sampler parameters or a failed rejection loop."""


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _window(window) -> tuple[int, int]:
    a, b = (int(v) for v in window)
    if b < a:
        raise SamplerError(f"empty window [{a}, {b}]")
    return a, b


# --------------------------------------------------------------------------
# measure specifications


def _encode_beta(beta: Sequence[float]) -> list:
    return ["inf" if math.isinf(b) else float(b) for b in beta]


def _decode_beta(beta: Sequence) -> tuple[float, ...]:
    out = []
    for b in beta:
        if isinstance(b, str):
            if b.strip().lower() not in ("inf", "+inf", "infinity"):
                raise SamplerError(f"unrecognised beta entry {b!r}")
            out.append(INF)
        else:
            out.append(float(b))
    return tuple(out)


@dataclass(frozen=True)
class Bernoulli:
    p: float
    kind: str = field(default="bernoulli", init=False)

    def __post_init__(self):
        if not 0 <= self.p < 1:
            raise SamplerError("Bernoulli needs 0 <= p < 1")


@dataclass(frozen=True)
class Markov:
    p0: float
    p1: float
    kind: str = field(default="markov", init=False)

    def __post_init__(self):
        if not (0 < self.p0 < 1 and 0 <= self.p1 < 1):
            raise SamplerError("Markov needs p0 in (0,1) and p1 in [0,1)")

    @property
    def density(self) -> float:
        return self.p0 / (1 - self.p1 + self.p0)


@dataclass(frozen=True)
class BoundedSoliton:
    p: float
    K: int
    kind: str = field(default="bounded", init=False)

    def __post_init__(self):
        if not 0 < self.p < 1 or self.K < 0:
            raise SamplerError("bounded-soliton law needs p in (0,1) and K >= 0")


@dataclass(frozen=True)
class GibbsPeriodic:
    N: int
    beta: tuple[float, ...]
    kind: str = field(default="gibbs", init=False)

    def __post_init__(self):
        object.__setattr__(self, "beta", _decode_beta(self.beta))
        if self.N <= 0:
            raise SamplerError("N must be positive")
        if any(b < 0 and math.isinf(b) for b in self.beta):
            raise SamplerError("beta_k = -inf is not allowed")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "N": self.N, "beta": _encode_beta(self.beta)}


@dataclass(frozen=True)
class CyclicMarkov:
    N: int
    p0: float
    p1: float
    kind: str = field(default="cyclic-markov", init=False)

    def gibbs(self) -> GibbsPeriodic:
        return GibbsPeriodic(self.N, gibbs_params_from_markov(self.p0, self.p1))


@dataclass(frozen=True)
class PeriodicBounded:
    N: int
    p: float
    K: int
    kind: str = field(default="periodic-bounded", init=False)

    def gibbs(self) -> GibbsPeriodic:
        return GibbsPeriodic(self.N, gibbs_params_bounded(self.p, self.K))


@dataclass(frozen=True)
class PeriodicIID:
    N: int
    p: float
    kind: str = field(default="periodic-iid", init=False)

    def gibbs(self) -> GibbsPeriodic:
        return GibbsPeriodic(self.N, gibbs_params_from_iid(self.p))


MeasureSpec = Bernoulli | Markov | BoundedSoliton | GibbsPeriodic | CyclicMarkov | PeriodicBounded | PeriodicIID

_KINDS = {cls.__dataclass_fields__["kind"].default: cls
          for cls in (Bernoulli, Markov, BoundedSoliton, GibbsPeriodic, CyclicMarkov,
                      PeriodicBounded, PeriodicIID)}


def spec_to_dict(spec) -> dict:
    if isinstance(spec, GibbsPeriodic):
        return spec.to_dict()
    return asdict(spec)


def spec_from_dict(data: dict):
    """Build a measure spec from a JSON-compatible mapping with a ``kind`` key."""
    data = dict(data)
    try:
        cls = _KINDS[data.pop("kind")]
    except KeyError as exc:
        raise SamplerError(f"unknown or missing measure kind; expected one of {sorted(_KINDS)}") from exc
    try:
        return cls(**data)
    except TypeError as exc:
        raise SamplerError(f"bad parameters for {cls.__name__}: {exc}") from exc


def as_gibbs(spec) -> GibbsPeriodic:
    if isinstance(spec, GibbsPeriodic):
        return spec
    if hasattr(spec, "gibbs"):
        return spec.gibbs()
    raise SamplerError(f"{type(spec).__name__} is not a periodic measure")


# --------------------------------------------------------------------------
# Gibbs parameters


def gibbs_params_from_iid(p: float) -> tuple[float, ...]:
    if not 0 < p < 1:
        raise SamplerError("need 0 < p < 1")
    return (math.log((1 - p) / p),)


def gibbs_params_from_markov(p0: float, p1: float) -> tuple[float, ...]:
    if not (0 < p0 < 1 and 0 < p1 < 1):
        raise SamplerError("need p0, p1 in (0, 1)")
    return (math.log((1 - p0) / p1), math.log(p1 * (1 - p0) / (p0 * (1 - p1))))


def gibbs_params_bounded(p: float, K: int) -> tuple[float, ...]:
    """``beta_0`` as for i.i.d., ``beta_k = 0`` for ``1 <= k <= K``, ``+inf`` beyond.

    Soliton counts are nonincreasing in ``k``, so forcing ``f_{K+1} = 0``
    forces every deeper count to vanish as well.
    """
    return gibbs_params_from_iid(p) + (0.0,) * K + (INF,)


def log_weight(profile: Sequence[int], beta: Sequence[float], N: int) -> float:
    """``-sum beta_k f_k`` with ``inf * 0 = 0``; ``-inf`` outside ``f_0 < N/2``."""
    if 2 * profile[0] >= N:
        return -INF
    total = 0.0
    for k, b in enumerate(beta):
        f = profile[k] if k < len(profile) else 0
        if f == 0 or b == 0:
            continue
        if math.isinf(b):
            return -INF
        total -= b * f
    return total


# --------------------------------------------------------------------------
# window samples


@dataclass
class WindowSample:
    """Batch of configurations on ``[start, start + L - 1]`` with their carrier.

    ``carrier[:, j]`` is ``W_{start - 1 + j}``; ``certificate[i]`` bounds the
    probability that row ``i``'s initial carrier value is wrong.
    """

    eta: np.ndarray
    carrier: np.ndarray
    start: int
    certificate: np.ndarray

    @property
    def stop(self) -> int:
        return self.start + self.eta.shape[1] - 1

    def transformed(self) -> np.ndarray:
        """``T eta`` on the window: the carrier's put-down sites."""
        return (np.diff(self.carrier, axis=1) == -1).astype(np.int8)

    def column(self, n: int) -> int:
        return n - self.start

    def config(self, i: int = 0) -> BinaryConfiguration:
        return BinaryConfiguration(tuple(int(v) for v in self.eta[i]), self.start, BUFFERED,
                                   0, float(self.certificate[i]))

    def past_max(self, i: int = 0) -> int:
        """``M_{a-1}`` relative to ``S_0 = 0``, for feeding the path algebra."""
        a = self.start
        eta = self.eta[i]
        s_am1 = -int(np.sum(1 - 2 * eta[: max(0, 1 - a)].astype(np.int64)))
        return s_am1 + int(self.carrier[i, 0])


def lindley(w0: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Carrier ``W_{a-1}..W_b`` from ``W_{a-1}`` and ``eta_a..eta_b`` (row-wise)."""
    eta = np.asarray(eta)
    n, L = eta.shape
    w = np.empty((n, L + 1), dtype=np.int64)
    w[:, 0] = w0
    for j in range(L):
        w[:, j + 1] = np.where(eta[:, j] == 1, w[:, j] + 1, np.maximum(w[:, j] - 1, 0))
    return w


def _markov_columns(rng: np.random.Generator, first: np.ndarray, length: int,
                    p0: float, p1: float) -> np.ndarray:
    out = np.empty((first.shape[0], length), dtype=np.int8)
    prev = first
    for j in range(length):
        prob = np.where(prev == 1, p1, p0)
        prev = (rng.random(first.shape[0]) < prob).astype(np.int8)
        out[:, j] = prev
    return out


# --------------------------------------------------------------------------
# i.i.d.


def sample_iid(p: float, window, seed=None, size: int = 1) -> WindowSample:
    """Exact stationary i.i.d. configuration and carrier on a window.

    ``W_{a-1}`` is drawn from the carrier's geometric stationary law; it is a
    function of the sites left of ``a`` and hence independent of the window.
    """
    if not 0 <= p < 0.5:
        raise SamplerError("the stationary carrier exists only for p < 1/2")
    rng = _rng(seed)
    a, b = _window(window)
    L = b - a + 1
    r = p / (1 - p)
    w0 = rng.geometric(1 - r, size=size) - 1 if p > 0 else np.zeros(size, dtype=np.int64)
    eta = (rng.random((size, L)) < p).astype(np.int8)
    return WindowSample(eta, lindley(w0, eta), a, np.zeros(size))


# --------------------------------------------------------------------------
# Markov


def markov_carrier_tail(p0: float, p1: float, g: np.ndarray | int) -> np.ndarray:
    """``P(W_0 >= g)`` for the stationary Markov carrier."""
    q = p1 / (1 - p0)
    c = p0 * (1 - p0 + p1) * (1 - p0 - p1) / ((1 - p0) ** 2 * (1 + p0 - p1))
    g = np.asarray(g, dtype=float)
    tail = c * np.power(q, np.maximum(g - 1, 0)) / (1 - q)
    return np.where(g <= 0, 1.0, np.minimum(tail, 1.0))


def _backward_carrier(rng: np.random.Generator, edge: np.ndarray, p0: float, p1: float,
                      tolerance: float, block: int = 64, max_length: int = 1 << 20):
    """``W_{a-1}`` given ``eta_a = edge``, from a certified backward extension.

    The two-state chain is reversible, so sites left of ``a`` are drawn with the
    forward kernel.  Rows keep extending (never resampled) until
    ``P(W >= gap + 1) / nu(state)`` drops below ``tolerance``.
    """
    n = edge.shape[0]
    rho = p0 / (1 - p1 + p0)
    nu = np.array([1 - rho, rho])
    height = np.zeros(n, dtype=np.int64)
    best = np.zeros(n, dtype=np.int64)
    state = edge.astype(np.int8).copy()
    cert = np.ones(n)
    active = np.arange(n)
    length = 0
    while active.size:
        cols = _markov_columns(rng, state[active], block, p0, p1)
        steps = 2 * cols.astype(np.int64) - 1
        path = height[active, None] + np.cumsum(steps, axis=1)
        best[active] = np.maximum(best[active], path.max(axis=1))
        height[active] = path[:, -1]
        state[active] = cols[:, -1]
        gap = best[active] - height[active]
        cert[active] = markov_carrier_tail(p0, p1, gap + 1) / nu[state[active]]
        active = active[cert[active] >= tolerance]
        length += block
        block *= 2
        if length > max_length and active.size:
            raise SamplerError("left buffer could not be certified; is p0 + p1 < 1?")
    return best, cert


def sample_markov(p0: float, p1: float, window, seed=None, size: int = 1,
                  tolerance: float = DEFAULT_TOLERANCE) -> WindowSample:
    """Stationary Markov configuration with a certified carrier on the window."""
    spec = Markov(p0, p1)
    if p0 + p1 >= 1:
        raise SamplerError("the carrier is finite only for p0 + p1 < 1")
    rng = _rng(seed)
    a, b = _window(window)
    first = (rng.random(size) < spec.density).astype(np.int8)
    rest = _markov_columns(rng, first, b - a, p0, p1)
    eta = np.concatenate((first[:, None], rest), axis=1)
    w0, cert = _backward_carrier(rng, first, p0, p1, tolerance)
    return WindowSample(eta, lindley(w0, eta), a, cert)


def sample_markov_plain(p0: float, p1: float, length: int, seed=None, size: int = 1) -> np.ndarray:
    """Stationary Markov configuration without any carrier information."""
    spec = Markov(p0, p1)
    rng = _rng(seed)
    first = (rng.random(size) < spec.density).astype(np.int8)
    return np.concatenate((first[:, None], _markov_columns(rng, first, length - 1, p0, p1)), axis=1)


def sample_palm_markov(p0: float, p1: float, window, seed=None, size: int = 1,
                       tolerance: float = DEFAULT_TOLERANCE) -> WindowSample:
    """Markov configuration conditioned on ``eta_0 = 0, eta_1 = 1``.

    The window must contain 0 and 1.  Sites right of 1 follow the forward chain
    and sites left of 0 the (identical) reversed chain; the carrier entering the
    window is certified as in :func:`sample_markov`.
    """
    Markov(p0, p1)
    if p0 + p1 >= 1:
        raise SamplerError("the carrier is finite only for p0 + p1 < 1")
    rng = _rng(seed)
    a, b = _window(window)
    if not (a <= 0 and b >= 1):
        raise SamplerError("Palm window must contain sites 0 and 1")
    right = _markov_columns(rng, np.ones(size, dtype=np.int8), b - 1, p0, p1)
    left = _markov_columns(rng, np.zeros(size, dtype=np.int8), -a, p0, p1)[:, ::-1]
    eta = np.concatenate((left, np.zeros((size, 1), np.int8), np.ones((size, 1), np.int8), right), axis=1)
    w0, cert = _backward_carrier(rng, eta[:, 0], p0, p1, tolerance)
    return WindowSample(eta, lindley(w0, eta), a, cert)


# --------------------------------------------------------------------------
# quasi-stationary bounded-soliton law


@dataclass(frozen=True)
class QuasiStationarySolution:
    p: float
    K: int
    lambda_K: float
    h_K: np.ndarray
    pi_tilde: np.ndarray

    def substochastic(self) -> np.ndarray:
        return carrier_kernel(self.p, self.K)

    def tilted(self) -> np.ndarray:
        """``P~(x, y) = P(x, y) h(y) / (lambda h(x))``."""
        P = self.substochastic()
        h = self.h_K
        return P * h[None, :] / (self.lambda_K * h[:, None])

    def residual(self) -> float:
        return float(np.max(np.abs(self.substochastic() @ self.h_K - self.lambda_K * self.h_K)))


def carrier_kernel(p: float, K: int) -> np.ndarray:
    """i.i.d. carrier kernel restricted (killed above ``K``) to ``{0..K}``."""
    P = np.zeros((K + 1, K + 1))
    P[0, 0] = 1 - p
    for x in range(K):
        P[x, x + 1] = p
        P[x + 1, x] = 1 - p
    return P


def quasistationary_solve(p: float, K: int) -> QuasiStationarySolution:
    """Perron pair of the killed carrier chain and the tilted stationary law.

    The chain is reversible for the weights ``r^x``, ``r = p/(1-p)``, so the
    symmetrised kernel is tridiagonal with off-diagonal ``sqrt(p(1-p))``; its
    Perron vector ``u`` gives ``h = u r^{-x/2}`` and ``pi~ = u^2``.
    """
    BoundedSoliton(p, K)
    diag = np.zeros(K + 1)
    diag[0] = 1 - p
    off = np.full(K, math.sqrt(p * (1 - p)))
    if K == 0:
        lam, u = 1 - p, np.ones(1)
    else:
        vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(K, K))
        lam, u = float(vals[0]), np.abs(vecs[:, 0])
    x = np.arange(K + 1)
    h = u * np.exp(-0.5 * x * math.log(p / (1 - p)))
    h = h / h[0]
    pi_t = u ** 2 / np.sum(u ** 2)
    return QuasiStationarySolution(p, K, float(lam), h, pi_t)


def sample_bounded(p: float, K: int, window, seed=None, size: int = 1) -> WindowSample:
    """Exact stationary bounded-soliton configuration via the tilted carrier chain."""
    sol = quasistationary_solve(p, K)
    rng = _rng(seed)
    a, b = _window(window)
    L = b - a + 1
    Pt = sol.tilted()
    up = np.array([Pt[x, x + 1] if x < K else 0.0 for x in range(K + 1)])
    stay = np.zeros(K + 1)
    stay[0] = Pt[0, 0]
    w = np.empty((size, L + 1), dtype=np.int64)
    w[:, 0] = rng.choice(K + 1, size=size, p=sol.pi_tilde)
    for j in range(L):
        u = rng.random(size)
        cur = w[:, j]
        pu = up[cur]
        ps = stay[cur]
        w[:, j + 1] = np.where(u < pu, cur + 1, np.where(u < pu + ps, cur, cur - 1))
    eta = (np.diff(w, axis=1) == 1).astype(np.int8)
    return WindowSample(eta, w, a, np.zeros(size))


# --------------------------------------------------------------------------
# periodic Gibbs measures


def _word_of_index(i: int, N: int) -> str:
    return format(i, f"0{N}b")


def gibbs_log_weights(spec: GibbsPeriodic) -> np.ndarray:
    """Log weights of all ``2^N`` words (index bit ``N-1-n`` is ``x_{n+1}``)."""
    N = spec.N
    if N > ENUMERATION_CUTOFF:
        raise SamplerError(f"N = {N} exceeds the enumeration cutoff {ENUMERATION_CUTOFF}")
    lw = np.empty(1 << N)
    for i in range(1 << N):
        word = _word_of_index(i, N)
        if 2 * word.count("1") >= N:
            lw[i] = -INF
        else:
            lw[i] = log_weight(profile_of_word(word), spec.beta, N)
    return lw


def _bits_of_indices(idx: np.ndarray, N: int) -> np.ndarray:
    shifts = np.arange(N - 1, -1, -1)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def gibbs_metropolis_step(x: np.ndarray, lw_x: float, spec: GibbsPeriodic,
                          rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """One Metropolis update: a site flip or an adjacent cyclic swap, half each."""
    N = spec.N
    y = x.copy()
    i = int(rng.integers(N))
    if rng.random() < 0.5:
        y[i] ^= 1
    else:
        j = (i + 1) % N
        if y[i] == y[j]:
            return x, lw_x
        y[i], y[j] = y[j], y[i]
    word = "".join("1" if v else "0" for v in y)
    lw_y = -INF if 2 * word.count("1") >= N else log_weight(profile_of_word(word), spec.beta, N)
    if lw_y == -INF:
        return x, lw_x
    if lw_y >= lw_x or rng.random() < math.exp(lw_y - lw_x):
        return y, lw_y
    return x, lw_x


def sample_gibbs_periodic(spec, seed=None, size: int = 1, mode: str = "auto",
                          burn_in: int | None = None, thin: int | None = None) -> np.ndarray:
    """Samples of the periodic Gibbs law as an array of shape ``(size, N)``.

    ``mode="exact"`` enumerates and inverts the CDF; ``mode="mcmc"`` runs a
    Metropolis chain from the empty configuration.  ``auto`` picks exact up to
    the enumeration cutoff.
    """
    spec = as_gibbs(spec)
    rng = _rng(seed)
    N = spec.N
    if mode == "auto":
        mode = "exact" if N <= ENUMERATION_CUTOFF else "mcmc"
    if mode == "exact":
        lw = gibbs_log_weights(spec)
        w = np.exp(lw - lw.max())
        cdf = np.cumsum(w)
        idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
        return _bits_of_indices(np.minimum(idx, len(cdf) - 1), N)
    if mode != "mcmc":
        raise SamplerError(f"unknown mode {mode!r}")
    burn_in = 50 * N * N if burn_in is None else burn_in
    thin = 5 * N if thin is None else thin
    x = np.zeros(N, dtype=np.int8)
    lw_x = 0.0
    out = np.empty((size, N), dtype=np.int8)
    for _ in range(burn_in):
        x, lw_x = gibbs_metropolis_step(x, lw_x, spec, rng)
    for k in range(size):
        for _ in range(thin):
            x, lw_x = gibbs_metropolis_step(x, lw_x, spec, rng)
        out[k] = x
    return out


def gibbs_metropolis_matrix(spec: GibbsPeriodic) -> sparse.csr_matrix:
    """Exact transition matrix of the Metropolis chain over all ``2^N`` words."""
    spec = as_gibbs(spec)
    N = spec.N
    lw = gibbs_log_weights(spec)
    n = 1 << N
    rows, cols, vals = [], [], []
    for i in range(n):
        if lw[i] == -INF:
            continue
        moves = {}
        for s in range(N):
            bit = 1 << (N - 1 - s)
            moves[i ^ bit] = moves.get(i ^ bit, 0.0) + 0.5 / N
            nxt = 1 << (N - 1 - (s + 1) % N)
            if bool(i & bit) != bool(i & nxt):
                j = i ^ bit ^ nxt
                moves[j] = moves.get(j, 0.0) + 0.5 / N
        leave = 0.0
        for j, q in moves.items():
            if lw[j] == -INF:
                continue
            acc = q * min(1.0, math.exp(lw[j] - lw[i]))
            rows.append(i)
            cols.append(j)
            vals.append(acc)
            leave += acc
        rows.append(i)
        cols.append(i)
        vals.append(1.0 - leave)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def sample_periodic_iid_rejection(p: float, N: int, seed=None, size: int = 1,
                                  max_rounds: int = 1000) -> np.ndarray:
    """Bernoulli(p)^N conditioned on fewer than N/2 particles, by rejection."""
    rng = _rng(seed)
    out = np.empty((0, N), dtype=np.int8)
    for _ in range(max_rounds):
        x = (rng.random((2 * size, N)) < p).astype(np.int8)
        out = np.concatenate((out, x[2 * x.sum(axis=1) < N]))
        if len(out) >= size:
            return out[:size]
    raise SamplerError("rejection sampler acceptance rate too low")


def check_configuration(x) -> BinaryConfiguration:
    try:
        return BinaryConfiguration.cyclic(x)
    except ConfigurationError as exc:
        raise SamplerError(str(exc)) from exc
