"""Particle configurations, path encodings and Pitman's transformation.

A configuration ``eta`` over an integer window is encoded as the lattice path
``S`` with ``S_0 = 0`` and ``S_n - S_{n-1} = 1 - 2 eta_n``.  One step of the
box-ball dynamics is reflection of ``S`` in its past maximum,

    (TS)_n = 2 M_n - S_n - 2 M_0,    M_n = sup_{m <= n} S_m,

and the carrier is ``W = M - S``.  How the supremum over the unseen past is
evaluated is set by a *left policy*:

``"finite"``
    the configuration is empty outside the window, so the path decreases to
    the left and the past maximum is attained inside the window;
``"cyclic"``
    the window is one period of an ``N``-periodic configuration; one period of
    lookback suffices because every earlier period is lower by ``S_N > 0``;
``"buffered"``
    the window starts with a sampled left buffer; the past maximum is taken
    over the buffer (optionally seeded with an externally certified value).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

FINITE = "finite"
CYCLIC = "cyclic"
BUFFERED = "buffered"
BOUNDARIES = (FINITE, CYCLIC, BUFFERED)


class ConfigurationError(ValueError):
    """Malformed configuration or path."""


class DensityError(ConfigurationError):
    """Cyclic configuration with at least N/2 particles; T is undefined."""


class UndefinedDynamicsError(ConfigurationError):
    """The past maximum (or future minimum) needed by T is not finite."""


def _as_bits(sites: Iterable[int]) -> tuple[int, ...]:
    bits = tuple(int(s) for s in sites)
    if any(b not in (0, 1) for b in bits):
        raise ConfigurationError("sites must be 0 or 1")
    return bits


@dataclass(frozen=True)
class BinaryConfiguration:
    """0/1 configuration on the window ``[start, start + len(sites) - 1]``.

    For ``boundary == "cyclic"`` the sites are ``x_1..x_N`` of one period and
    ``start`` is always 1.  For ``"buffered"`` the first ``buffer`` sites form
    a sampled left buffer and ``certificate`` bounds the probability that the
    true past maximum exceeds the one seen over the buffer.
    """

    sites: tuple[int, ...]
    start: int = 1
    boundary: str = FINITE
    buffer: int = 0
    certificate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "sites", _as_bits(self.sites))
        if self.boundary not in BOUNDARIES:
            raise ConfigurationError(f"unknown boundary {self.boundary!r}")
        if self.boundary == CYCLIC:
            if len(self.sites) < 1:
                raise ConfigurationError("cyclic configuration needs N >= 1")
            if self.start != 1:
                raise ConfigurationError("cyclic configurations are indexed from 1")

    @classmethod
    def cyclic(cls, sites: Iterable[int]) -> "BinaryConfiguration":
        return cls(tuple(sites), 1, CYCLIC)

    @classmethod
    def from_string(cls, text: str, boundary: str = FINITE) -> "BinaryConfiguration":
        """Parse ``"0101|110010"``; the bar precedes index 1 (default: leading)."""
        text = text.strip()
        if text.count("|") > 1:
            raise ConfigurationError("at most one origin marker allowed")
        left, _, right = text.rpartition("|") if "|" in text else ("", "", text)
        digits = left + right
        if any(ch not in "01" for ch in digits):
            raise ConfigurationError(f"not a 0/1 string: {text!r}")
        return cls(tuple(int(ch) for ch in digits), 1 - len(left), boundary)

    def to_string(self) -> str:
        body = "".join(str(b) for b in self.sites)
        cut = 1 - self.start
        if 0 <= cut <= len(body):
            return body[:cut] + "|" + body[cut:]
        return body

    @property
    def N(self) -> int:
        return len(self.sites)

    @property
    def stop(self) -> int:
        """Last index of the window (inclusive)."""
        return self.start + len(self.sites) - 1

    @property
    def bits(self) -> np.ndarray:
        return np.asarray(self.sites, dtype=np.int8)

    @property
    def particles(self) -> int:
        return sum(self.sites)

    def occupied(self) -> list[int]:
        return [self.start + i for i, b in enumerate(self.sites) if b]

    def __getitem__(self, n: int) -> int:
        if self.boundary == CYCLIC:
            return self.sites[(n - 1) % self.N]
        if self.start <= n <= self.stop:
            return self.sites[n - self.start]
        if self.boundary == FINITE:
            return 0
        raise IndexError(f"site {n} outside buffered window")

    def shift(self, k: int = 1) -> "BinaryConfiguration":
        """Left shift ``(theta^k x)_n = x_{n+k}``."""
        if self.boundary == CYCLIC:
            k %= self.N
            return BinaryConfiguration.cyclic(self.sites[k:] + self.sites[:k])
        return BinaryConfiguration(self.sites, self.start - k, self.boundary,
                                   self.buffer, self.certificate)


@dataclass(frozen=True)
class LatticePath:
    """Integer path with values ``S_first .. S_last``.

    Periodic paths store one period ``S_0 .. S_N`` (``first == 0``) and extend
    by ``S_{n+N} = S_n + S_N``.
    """

    values: tuple[int, ...]
    first: int = 0
    period: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) == 0:
            raise ConfigurationError("empty path")
        if self.period is not None:
            if self.first != 0 or len(self.values) != self.period + 1:
                raise ConfigurationError("periodic paths store S_0..S_N")

    @classmethod
    def anchored(cls, values: Sequence[int], start: int = 1) -> "LatticePath":
        """Path given from index ``start``; ``S_0 = 0`` is prepended when start is 1."""
        values = list(values)
        if start == 1:
            return cls(tuple([0] + values), 0)
        return cls(tuple(values), start)

    @property
    def last(self) -> int:
        return self.first + len(self.values) - 1

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)

    def at(self, n: int) -> int:
        if self.period is not None:
            q, r = divmod(n, self.period)
            return self.values[r] + q * self.values[-1]
        if not self.first <= n <= self.last:
            raise IndexError(f"index {n} outside path window [{self.first}, {self.last}]")
        return self.values[n - self.first]

    def window(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(self.at(n) for n in range(a, b + 1))

    def increments(self) -> np.ndarray:
        return np.diff(self.array)


@dataclass(frozen=True)
class CarrierPath:
    """Carrier values ``W_first .. W_last`` (cyclic: ``W_1..W_N``, period N)."""

    values: tuple[int, ...]
    first: int = 0
    period: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if any(v < 0 for v in self.values):
            raise ConfigurationError("carrier must be nonnegative")

    @property
    def last(self) -> int:
        return self.first + len(self.values) - 1

    def at(self, n: int) -> int:
        if self.period is not None:
            return self.values[(n - self.first) % self.period]
        return self.values[n - self.first]

    def window(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(self.at(n) for n in range(a, b + 1))


# --------------------------------------------------------------------------
# encoding


def encode_path(config: BinaryConfiguration) -> LatticePath:
    """Path encoding of ``config``.

    Finite and buffered windows ``[a, b]`` give ``S`` on ``[a - 1, b]``, which
    must contain 0.  Cyclic configurations give one period ``S_0..S_N``.
    """
    if config.N == 0:
        raise ConfigurationError("empty window")
    steps = 1 - 2 * config.bits.astype(np.int64)
    if config.boundary == CYCLIC:
        return LatticePath(tuple(np.concatenate(([0], np.cumsum(steps)))), 0, config.N)
    a, b = config.start, config.stop
    if not a - 1 <= 0 <= b:
        raise ConfigurationError(f"path window [{a - 1}, {b}] does not contain 0")
    raw = np.concatenate(([0], np.cumsum(steps)))
    raw -= raw[0 - (a - 1)]
    return LatticePath(tuple(raw), a - 1)


def decode_path(path: LatticePath, boundary: str | None = None) -> BinaryConfiguration:
    """Inverse of :func:`encode_path`."""
    inc = path.increments()
    if np.any(np.abs(inc) != 1):
        raise ConfigurationError("path increments must be +-1")
    sites = tuple(int(v) for v in (1 - inc) // 2)
    if path.period is not None:
        return BinaryConfiguration.cyclic(sites)
    return BinaryConfiguration(sites, path.first + 1, boundary or FINITE)


def _check_policy(path: LatticePath, policy: str) -> None:
    if policy not in BOUNDARIES:
        raise ConfigurationError(f"unknown policy {policy!r}")
    if (policy == CYCLIC) != (path.period is not None):
        raise ConfigurationError("cyclic policy requires a periodic path and vice versa")
    if policy == CYCLIC and path.values[-1] <= 0:
        raise DensityError("S_N <= 0: density >= 1/2, T is not defined")


def _periodic_running_max(s: np.ndarray) -> np.ndarray:
    # s = S_0..S_N; M_n = max over (n - N, n] = max(max S_1..S_n, max S_{n+1..N} - S_N)
    n = len(s) - 1
    drift = s[-1]
    fwd = np.maximum.accumulate(s[1:])
    back = np.maximum.accumulate(s[1:][::-1])[::-1] - drift
    m = np.empty_like(s)
    m[1:] = fwd
    m[1:-1] = np.maximum(fwd[:-1], back[1:])
    m[0] = m[n] - drift
    return m


def running_max(path: LatticePath, left_policy: str = FINITE,
                past_max: int | None = None) -> np.ndarray:
    """Past maximum ``M_n`` on the path's index window.

    ``past_max`` (buffered policy only) is a certified value of
    ``sup_{m < first} S_m``.
    """
    _check_policy(path, left_policy)
    s = path.array
    if left_policy == CYCLIC:
        return _periodic_running_max(s)
    m = np.maximum.accumulate(s)
    if past_max is not None:
        if left_policy != BUFFERED:
            raise ConfigurationError("past_max only applies to buffered paths")
        m = np.maximum(m, past_max)
    return m


def _finite_extension(path: LatticePath, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # balls still held at the right edge are deposited on the empty sites beyond
    load = int(m[-1] - path.values[-1])
    if load == 0:
        return path.array, m
    tail = path.values[-1] + np.arange(1, load + 1)
    s = np.concatenate((path.array, tail))
    m = np.concatenate((m, np.maximum(m[-1], tail)))
    return s, m


def pitman_transform(path: LatticePath, left_policy: str = FINITE,
                     past_max: int | None = None) -> LatticePath:
    """``TS = 2M - S - 2M_0``.

    Finite-support inputs are extended to the right by the carrier load at the
    window's right edge so that no transported ball is lost.
    """
    m = running_max(path, left_policy, past_max)
    s = path.array
    if left_policy == FINITE:
        s, m = _finite_extension(path, m)
    if path.period is not None:
        m0 = m[0]
    else:
        if not path.first <= 0 <= path.last:
            raise UndefinedDynamicsError("M_0 is outside the path window")
        m0 = m[-path.first]
    ts = 2 * m - s - 2 * m0
    return LatticePath(tuple(ts), path.first, path.period)


def _reflect(path: LatticePath) -> LatticePath:
    # R_m = -S_{-m}
    if path.period is not None:
        n = path.period
        s = path.array
        return LatticePath(tuple(s[-1] - s[::-1]), 0, n)
    return LatticePath(tuple(-path.array[::-1]), -path.last)


def inverse_transform(path: LatticePath, right_policy: str = FINITE,
                      future_min: int | None = None) -> LatticePath:
    """Reflection in the future minimum, ``2F_n - S_n - 2F_0``.

    Computed as ``(T^{-1}S)_n = -(TR)_{-n}`` with ``R_m = -S_{-m}``, so the
    right policy of ``S`` is the left policy of ``R``.
    """
    past = None if future_min is None else -future_min
    return _reflect(pitman_transform(_reflect(path), right_policy, past))


def carrier(path: LatticePath, left_policy: str = FINITE,
            past_max: int | None = None) -> CarrierPath:
    """Carrier ``W = M - S``; cyclic paths give ``W_1..W_N``."""
    m = running_max(path, left_policy, past_max)
    w = m - path.array
    if path.period is not None:
        return CarrierPath(tuple(w[1:]), 1, path.period)
    return CarrierPath(tuple(w), path.first)


def transformed_from_carrier(w: Sequence[int] | np.ndarray) -> np.ndarray:
    """``(T eta)_n = 1`` exactly at the carrier's put-down steps."""
    return (np.diff(np.asarray(w)) == -1).astype(np.int8)


# --------------------------------------------------------------------------
# dynamics


def evolve_finite(config: BinaryConfiguration) -> BinaryConfiguration:
    """One BBS step by a left-to-right carrier sweep (no path algebra)."""
    if config.boundary != FINITE:
        raise ConfigurationError("evolve_finite needs a finite-support configuration")
    out = []
    load = 0
    for bit in config.sites:
        if bit:
            load += 1
            out.append(0)
        elif load:
            load -= 1
            out.append(1)
        else:
            out.append(0)
    out.extend([1] * load)
    return BinaryConfiguration(tuple(out), config.start, FINITE)


def step(config: BinaryConfiguration) -> BinaryConfiguration:
    """One step via ``decode . T . encode`` for finite or cyclic configurations."""
    if config.boundary == CYCLIC:
        return periodic_transform(config)
    if config.boundary != FINITE:
        raise ConfigurationError("buffered configurations need a certified past maximum")
    a = config.start
    if a > 1:
        config = BinaryConfiguration((0,) * (a - 1) + config.sites, 1)
    elif config.stop < 0:
        config = BinaryConfiguration(config.sites + (0,) * (-config.stop), a)
    out = decode_path(pitman_transform(encode_path(config), FINITE))
    return out


def _check_density(config: BinaryConfiguration) -> None:
    if config.boundary != CYCLIC:
        raise ConfigurationError("periodic_transform needs a cyclic configuration")
    if 2 * config.particles >= config.N:
        raise DensityError(
            f"{config.particles} particles on a cycle of length {config.N}: need fewer than N/2")


def periodic_transform(config: BinaryConfiguration) -> BinaryConfiguration:
    """Periodic BBS step on Z/NZ (requires fewer than N/2 particles)."""
    _check_density(config)
    return decode_path(pitman_transform(encode_path(config), CYCLIC))


def periodic_carrier_sweep(config: BinaryConfiguration) -> BinaryConfiguration:
    """Periodic BBS step by running the carrier twice around the cycle.

    The first lap starts empty and ends with the stationary load; the second
    lap records the put-down sites.
    """
    _check_density(config)
    load = 0
    for bit in config.sites:
        load = load + 1 if bit else max(load - 1, 0)
    out = []
    for bit in config.sites:
        if bit:
            load += 1
            out.append(0)
        elif load:
            load -= 1
            out.append(1)
        else:
            out.append(0)
    return BinaryConfiguration.cyclic(out)


def periodic_transform_many(x: np.ndarray) -> np.ndarray:
    """Vectorised periodic step for rows of a 0/1 array of shape (n, N)."""
    x = np.asarray(x, dtype=np.int64)
    n_rows, n = x.shape
    if np.any(2 * x.sum(axis=1) >= n):
        raise DensityError("every row needs fewer than N/2 particles")
    s = np.zeros((n_rows, n + 1), dtype=np.int64)
    np.cumsum(1 - 2 * x, axis=1, out=s[:, 1:])
    drift = s[:, -1:]
    fwd = np.maximum.accumulate(s[:, 1:], axis=1)
    back = np.maximum.accumulate(s[:, 1:][:, ::-1], axis=1)[:, ::-1] - drift
    m = np.empty_like(s)
    m[:, 1:] = fwd
    m[:, 1:-1] = np.maximum(fwd[:, :-1], back[:, 1:])
    m[:, 0] = m[:, -1] - drift[:, 0]
    w = m - s
    return (np.diff(w, axis=1) == -1).astype(np.int8)


def periodic_carrier_many(x: np.ndarray) -> np.ndarray:
    """Periodic carrier ``W_1..W_N`` for each row of ``x``."""
    x = np.asarray(x, dtype=np.int64)
    n = x.shape[1]
    s = np.zeros((x.shape[0], n + 1), dtype=np.int64)
    np.cumsum(1 - 2 * x, axis=1, out=s[:, 1:])
    drift = s[:, -1:]
    if np.any(drift <= 0):
        raise DensityError("every row needs fewer than N/2 particles")
    fwd = np.maximum.accumulate(s[:, 1:], axis=1)
    back = np.maximum.accumulate(s[:, 1:][:, ::-1], axis=1)[:, ::-1] - drift
    m = fwd.copy()
    m[:, :-1] = np.maximum(fwd[:, :-1], back[:, 1:])
    return m - s[:, 1:]


# --------------------------------------------------------------------------
# reversal and local maxima


def reverse_configuration(config: BinaryConfiguration) -> BinaryConfiguration:
    """``(<-eta)_n = eta_{1-n}``; on a cycle this is plain reversal of x_1..x_N."""
    rev = config.sites[::-1]
    if config.boundary == CYCLIC:
        return BinaryConfiguration.cyclic(rev)
    return BinaryConfiguration(rev, 1 - config.stop, config.boundary)


def reverse_carrier(w: CarrierPath) -> CarrierPath:
    """``Wbar_n = W_{-n}``; for a cycle ``(W_{N-1}, ..., W_1, W_N)``."""
    if w.period is not None:
        vals = w.values
        return CarrierPath(vals[-2::-1] + vals[-1:], 1, w.period)
    return CarrierPath(w.values[::-1], -w.last)


def local_maxima(config: BinaryConfiguration) -> list[int]:
    """Indices ``n`` with ``S_{n-1} < S_n > S_{n+1}``, i.e. ``eta_n = 0, eta_{n+1} = 1``."""
    s = config.sites
    if config.boundary == CYCLIC:
        n = config.N
        return [i % n for i in range(n) if s[i - 1] == 0 and s[i % n] == 1]
    return [config.start + i for i in range(len(s) - 1) if s[i] == 0 and s[i + 1] == 1]


def first_local_max(config: BinaryConfiguration, origin: int = 0) -> int:
    """``tau = inf{n >= origin : n is a local maximum}``."""
    for n in local_maxima(config):
        if n >= origin:
            return n
    raise ConfigurationError("no local maximum at or right of the origin in the window")


def evolve(config: BinaryConfiguration, steps: int) -> list[BinaryConfiguration]:
    """``[config, T config, ..., T^steps config]``."""
    rows = [config]
    for _ in range(steps):
        rows.append(step(rows[-1]))
    return rows
