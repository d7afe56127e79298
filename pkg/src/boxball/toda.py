"""Ultra-discrete Toda lattice: block lengths ``Q`` and gap lengths ``E``.

The dynamics is computed two ways: by the min-plus recursion, and through the
path encoding (segments of slope -1 of length ``Q_j`` alternating with slope
+1 of length ``E_j``) as Pitman's transformation followed by re-rooting at the
first local maximum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .continuum import (PiecewiseLinearPath, ZigzagSpec, _backward_sup, pl_pitman,
                        shift_to_local_max)
from .lattice import ConfigurationError, DensityError
from .samplers import SamplerError, _rng

INF = math.inf


class TodaError(ConfigurationError):
    """Invalid Toda state."""


def _same_length(a, b) -> bool:
    # exact for integers and fractions, rounding-tolerant for floats
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)
    return a == b


@dataclass(frozen=True)
class TodaState:
    """Finite state: ``len(E) == len(Q) - 1`` (``E_J = inf`` implied).

    Periodic state: ``len(E) == len(Q)`` and ``L = sum Q + sum E``.
    """

    Q: tuple
    E: tuple
    periodic: bool = False
    L: object = None

    def __post_init__(self):
        object.__setattr__(self, "Q", tuple(self.Q))
        object.__setattr__(self, "E", tuple(self.E))
        J = len(self.Q)
        if J == 0:
            raise TodaError("need at least one block")
        if any(q <= 0 for q in self.Q) or any(e <= 0 for e in self.E):
            raise TodaError("all block and gap lengths must be positive")
        if self.periodic:
            if len(self.E) != J:
                raise TodaError("periodic states need len(E) == len(Q)")
            total = sum(self.Q) + sum(self.E)
            if self.L is None:
                object.__setattr__(self, "L", total)
            elif not _same_length(total, self.L):
                raise TodaError(f"sum Q + sum E = {total} differs from L = {self.L}")
            if not 2 * sum(self.Q) < self.L:
                raise DensityError("periodic Toda states need sum Q < L/2")
        elif len(self.E) != J - 1:
            raise TodaError("finite states need len(E) == len(Q) - 1")

    @property
    def J(self) -> int:
        return len(self.Q)

    @property
    def is_integer(self) -> bool:
        return all(float(v).is_integer() for v in self.Q + self.E)

    def to_dict(self) -> dict:
        conv = (lambda v: int(v) if float(v).is_integer() else float(v))
        return {"Q": [conv(q) for q in self.Q], "E": [conv(e) for e in self.E],
                "periodic": self.periodic, "L": None if self.L is None else conv(self.L)}

    @classmethod
    def from_dict(cls, data: dict) -> "TodaState":
        try:
            return cls(tuple(data["Q"]), tuple(data["E"]), bool(data.get("periodic", False)), data.get("L"))
        except KeyError as exc:
            raise TodaError(f"missing field {exc}") from exc


# --------------------------------------------------------------------------
# min-plus dynamics


def toda_step(state: TodaState) -> TodaState:
    """Finite ultra-discrete Toda step with ``E_J = inf``."""
    if state.periodic:
        raise TodaError("use toda_step_periodic for periodic states")
    Q, E = state.Q, state.E
    J = state.J
    TQ = []
    acc_q = 0 * Q[0]
    acc_t = 0 * Q[0]
    for j in range(J):
        acc_q += Q[j]
        free = acc_q - acc_t
        tq = free if j == J - 1 else min(free, E[j])
        TQ.append(tq)
        acc_t += tq
    TE = [Q[j + 1] + E[j] - TQ[j] for j in range(J - 1)]
    return TodaState(tuple(TQ), tuple(TE))


def toda_step_periodic(state: TodaState) -> TodaState:
    """Periodic ultra-discrete Toda step (cyclic indices, direct O(J^2) minima)."""
    if not state.periodic:
        raise TodaError("use toda_step for finite states")
    Q, E = state.Q, state.E
    J = state.J
    TQ = []
    for j in range(J):
        best = 0 * Q[0]
        run = 0 * Q[0]
        for k in range(1, J):
            i = (j - k) % J
            run += E[i] - Q[i]
            best = min(best, run)
        TQ.append(min(Q[j] - best, E[j]))
    TE = [Q[(j + 1) % J] + E[j] - TQ[j] for j in range(J)]
    return TodaState(tuple(TQ), tuple(TE), True, state.L)


def step(state: TodaState) -> TodaState:
    return toda_step_periodic(state) if state.periodic else toda_step(state)


# --------------------------------------------------------------------------
# path encoding


def toda_encode_path(state: TodaState) -> PiecewiseLinearPath:
    """Slopes -1, +1, -1, ... of lengths ``Q_1, E_1, Q_2, ...`` from time 0.

    Finite states continue with slope +1 on both sides; periodic states give
    one period ``[0, L]``.
    """
    zero = 0 * state.Q[0]
    times, values = [zero], [zero]
    t = v = zero
    J = state.J
    for j in range(J):
        t, v = t + state.Q[j], v - state.Q[j]
        times.append(t)
        values.append(v)
        if j < len(state.E):
            t, v = t + state.E[j], v + state.E[j]
            times.append(t)
            values.append(v)
    if state.periodic:
        return PiecewiseLinearPath(times, values, period=state.L)
    return PiecewiseLinearPath(times, values, 1, 1)


def toda_decode_path(path: PiecewiseLinearPath) -> TodaState:
    """Inverse of :func:`toda_encode_path` (after re-rooting at a local max)."""
    path = path.simplify()
    times, values = path.times, path.values
    segs = []
    for i in range(len(times) - 1):
        if times[i + 1] <= 0:
            if values[i + 1] - values[i] != times[i + 1] - times[i]:
                raise ConfigurationError("finite Toda paths must rise with slope 1 left of 0")
            continue
        t0 = max(times[i], 0 * times[i])
        length = times[i + 1] - t0
        slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i])
        segs.append((length, slope))
    if path.period is None:
        if path.left_slope != 1 or path.right_slope != 1:
            raise ConfigurationError("finite Toda paths need slope-1 rays")
        if times[0] > 0:
            raise ConfigurationError("path window must start at or before 0")
        if segs and segs[-1][1] == 1:
            segs = segs[:-1]
    if not segs or segs[0][1] != -1:
        raise ConfigurationError("first segment after 0 must have slope -1")
    for k, (_, slope) in enumerate(segs):
        if slope != (-1 if k % 2 == 0 else 1):
            raise ConfigurationError("segments must alternate slopes -1 and +1")
    Q = tuple(length for length, _ in segs[0::2])
    E = tuple(length for length, _ in segs[1::2])
    if path.period is not None:
        return TodaState(Q, E, True, path.period)
    return TodaState(Q, E)


def _exact(state: TodaState) -> TodaState:
    conv = (lambda v: v if isinstance(v, Fraction) else Fraction(v))
    L = None if state.L is None else conv(state.L)
    return TodaState(tuple(map(conv, state.Q)), tuple(map(conv, state.E)), state.periodic, L)


def toda_step_via_path(state: TodaState, exact: bool = True) -> TodaState:
    """Independent route: encode, Pitman transform, re-root at a local max, decode."""
    if exact:
        state = _exact(state)
    path = toda_encode_path(state)
    shifted, _ = shift_to_local_max(pl_pitman(path))
    return toda_decode_path(shifted)


def toda_invariants(state: TodaState) -> dict:
    path = toda_encode_path(state)
    maxima = path.local_maxima()
    if path.period is not None:
        n_max = len([t for t in maxima if 0 <= t < path.period])
    else:
        n_max = len(maxima)
    return {"J": state.J, "sum_Q": sum(state.Q), "sum_E": sum(state.E), "L": state.L,
            "local_maxima": n_max}


def iterate(state: TodaState, steps: int) -> list[TodaState]:
    out = [state]
    for _ in range(steps):
        out.append(step(out[-1]))
    return out


# --------------------------------------------------------------------------
# invariant measures


@dataclass
class TodaPalmSample:
    """Segments ``Q_{-J}, E_{-J}, ..., Q_0, E_0 | Q_1, E_1, ..., Q_J, E_J``.

    ``past_max`` is the certified ``sup`` of the encoding left of the window,
    relative to the encoding's value at 0.
    """

    Q: np.ndarray
    E: np.ndarray
    J: int
    past_max: np.ndarray
    certificate: np.ndarray

    def path(self, i: int) -> PiecewiseLinearPath:
        """Encoding of row ``i`` with 0 at the local max between ``E_0`` and ``Q_1``."""
        J = self.J
        q, e = self.Q[i], self.E[i]
        times, values = [0.0], [0.0]
        t = v = 0.0
        for j in range(J, 2 * J + 1):
            t, v = t + q[j], v - q[j]
            times.append(t)
            values.append(v)
            t, v = t + e[j], v + e[j]
            times.append(t)
            values.append(v)
        lt, lv = [], []
        t = v = 0.0
        for j in range(J - 1, -1, -1):
            t, v = t - e[j], v - e[j]
            lt.append(t)
            lv.append(v)
            t, v = t - q[j], v + q[j]
            lt.append(t)
            lv.append(v)
        return PiecewiseLinearPath(lt[::-1] + times, lv[::-1] + values)

    def past_max_abs(self, i: int) -> float:
        return float(self.past_max[i])


def sample_toda_palm(lambda0: float, lambda1: float, J_window: int, seed=None, size: int = 1,
                     tolerance: float = 1e-9) -> TodaPalmSample:
    """Independent ``Q_j ~ Exp(lambda1)``, ``E_j ~ Exp(lambda0)`` around a local max at 0."""
    if not 0 < lambda0 < lambda1:
        raise SamplerError("need 0 < lambda0 < lambda1")
    rng = _rng(seed)
    n = 2 * J_window + 1
    Q = rng.exponential(1 / lambda1, size=(size, n))
    E = rng.exponential(1 / lambda0, size=(size, n))
    # encoding value at the window's left end, relative to 0
    left_val = (Q[:, :J_window] - E[:, :J_window]).sum(axis=1)
    # left of Q_{-J} the next segment back is a gap, i.e. zigzag state 0
    sup, cert = _backward_sup(rng, ZigzagSpec(lambda0, lambda1), np.zeros(size, dtype=np.int8), tolerance)
    return TodaPalmSample(Q, E, J_window, left_val + sup, cert)


def palm_tstar_central(sample: TodaPalmSample, i: int, depth: int = 1) -> dict:
    """Segments around 0 after one step ``theta^tau T`` of a Palm row."""
    path = sample.path(i)
    image, tau = shift_to_local_max(pl_pitman(path, sample.past_max_abs(i)))
    segs = image.simplify().segments()
    times = image.simplify().times
    k = times.index(0.0) if 0.0 in times else None
    if k is None:
        raise ConfigurationError("re-rooted path has no breakpoint at 0")
    if k - 2 * depth < 1 or k + 2 * depth >= len(segs):
        raise ConfigurationError("window too short to read the central segments")
    out = {}
    for d in range(depth):
        out[f"Q{d + 1}"] = float(segs[k + 2 * d][0])
        out[f"E{d + 1}"] = float(segs[k + 2 * d + 1][0])
        out[f"E{-d}"] = float(segs[k - 1 - 2 * d][0])
        out[f"Q{-d}"] = float(segs[k - 2 - 2 * d][0])
    out["tau"] = float(tau)
    return out


def sample_toda_periodic_dirichlet(J: int, A: float, L: float, seed=None, size: int = 1) -> list[TodaState]:
    """``Q = A Delta^Q``, ``E = (L - A) Delta^E`` with independent flat Dirichlet vectors."""
    if not (J >= 1 and 0 < A < L / 2):
        raise SamplerError("need J >= 1 and 0 < A < L/2")
    rng = _rng(seed)
    gq = rng.exponential(size=(size, J))
    ge = rng.exponential(size=(size, J))
    Q = A * gq / gq.sum(axis=1, keepdims=True)
    E = (L - A) * ge / ge.sum(axis=1, keepdims=True)
    out = []
    for q, e in zip(Q, E):
        # rounding may move the sums by an ulp; put the slack on the last entry
        q[-1] = A - q[:-1].sum()
        e[-1] = (L - A) - e[:-1].sum()
        out.append(TodaState(tuple(q.tolist()), tuple(e.tolist()), True, float(q.sum() + e.sum())))
    return out


def compositions(total: int, J: int):
    """All ``J``-tuples of positive integers summing to ``total``."""
    for cut in itertools.combinations(range(1, total), J - 1):
        b = (0,) + cut + (total,)
        yield tuple(b[i + 1] - b[i] for i in range(J))


def sample_toda_periodic_integer(J: int, A: int, L: int, seed=None, size: int = 1,
                                 law: str = "multinomial") -> list[TodaState]:
    """Integer periodic states with ``sum Q = A`` and ``sum E = L - A``.

    ``law="multinomial"``: ``Q - 1`` and ``E - 1`` independent multinomial counts
    with equal cell probabilities.  ``law="uniform"``: ``Q`` and ``E``
    independent and uniform over compositions into ``J`` positive parts.
    """
    if not (1 <= J <= min(A, L - A) and 2 * A < L):
        raise SamplerError("need 1 <= J <= min(A, L - A) and A < L/2")
    rng = _rng(seed)
    if law == "multinomial":
        Q = rng.multinomial(A - J, [1 / J] * J, size=size) + 1
        E = rng.multinomial(L - A - J, [1 / J] * J, size=size) + 1
    elif law == "uniform":
        Q = _uniform_compositions(rng, A, J, size)
        E = _uniform_compositions(rng, L - A, J, size)
    else:
        raise SamplerError(f"unknown law {law!r}")
    return [TodaState(tuple(int(v) for v in q), tuple(int(v) for v in e), True, int(L))
            for q, e in zip(Q, E)]


def _uniform_compositions(rng: np.random.Generator, total: int, J: int, size: int) -> np.ndarray:
    # stars and bars: J - 1 distinct cut points among the total - 1 gaps
    keys = rng.random((size, total - 1))
    cuts = np.sort(np.argsort(keys, axis=1)[:, :J - 1] + 1, axis=1)
    edges = np.concatenate((np.zeros((size, 1), int), cuts, np.full((size, 1), total)), axis=1)
    return np.diff(edges, axis=1)


def integer_law_defect(J: int, A: int, L: int, law: str = "uniform") -> float:
    """Exact TV between an integer law and its image under one periodic step.

    Enumerates every state with the given ``(J, A, L)``.
    """
    def weight(c: tuple) -> float:
        if law == "uniform":
            return 1.0
        n = sum(c) - J
        return math.factorial(n) / math.prod(math.factorial(v - 1) for v in c) / J ** n

    if law not in ("uniform", "multinomial"):
        raise SamplerError(f"unknown law {law!r}")
    states = [(q, e) for q in compositions(A, J) for e in compositions(L - A, J)]
    p = np.array([weight(q) * weight(e) for q, e in states])
    p /= p.sum()
    index = {st: i for i, st in enumerate(states)}
    push = np.zeros_like(p)
    for (q, e), w in zip(states, p):
        out = toda_step_periodic(TodaState(q, e, True, L))
        push[index[(out.Q, out.E)]] += w
    return 0.5 * float(np.abs(push - p).sum())


def random_state(rng: np.random.Generator, J: int, periodic: bool = False,
                 integer: bool = False, scale: int = 10) -> TodaState:
    """Random test state with rational (or integer) entries."""
    def draw(k):
        if integer:
            return [int(v) for v in rng.integers(1, scale + 1, size=k)]
        return [Fraction(int(a), int(b)) for a, b in zip(rng.integers(1, 4 * scale, size=k),
                                                         rng.integers(1, 5, size=k))]
    while True:
        Q = draw(J)
        E = draw(J if periodic else J - 1)
        if not periodic:
            return TodaState(tuple(Q), tuple(E))
        if 2 * sum(Q) < sum(Q) + sum(E):
            return TodaState(tuple(Q), tuple(E), True)
