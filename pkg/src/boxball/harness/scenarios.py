"""Verification suites.

Each suite takes its parameter block (from ``defaults.json``), a seed and an
optional replacement step function, and returns a list of :class:`Check`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

import numpy as np
from scipy import stats

from .. import continuum, exactdist, lattice, samplers, solitons, toda
from ..lattice import BinaryConfiguration
from .records import jsonable


@dataclass
class Check:
    name: str
    passed: bool
    stats: dict = field(default_factory=dict)

    def line(self) -> str:
        detail = ", ".join(f"{k}={_fmt(v)}" for k, v in self.stats.items())
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f" ({detail})" if detail else "")

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "stats": jsonable(self.stats)}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def load_defaults() -> dict:
    with resources.files("boxball.harness").joinpath("defaults.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)


def broken_step(config: BinaryConfiguration) -> BinaryConfiguration:
    """Negative control: a correct step followed by flipping the first site."""
    out = list(lattice.periodic_transform(config).sites)
    out[0] ^= 1
    return BinaryConfiguration.cyclic(out)


def _broken_many(x: np.ndarray) -> np.ndarray:
    y = lattice.periodic_transform_many(x)
    y[:, 0] ^= 1
    return y


# --------------------------------------------------------------------------
# exact suites


def figure1(params: dict, seed=None, step: Callable | None = None) -> list[Check]:
    row = BinaryConfiguration.from_string(params["row1"])
    evolve = step or lattice.step
    rows = [row]
    for _ in range(len(params["rows"]) - 1):
        rows.append(evolve(rows[-1]))
    got = [r.occupied() for r in rows]
    oracle = [row]
    for _ in range(len(params["rows"]) - 1):
        oracle.append(lattice.evolve_finite(oracle[-1]))
    return [Check("figure1-rows", got == params["rows"], {"rows": got}),
            Check("figure1-carrier-oracle", got == [r.occupied() for r in oracle])]


def admissible_words(N: int):
    for bits in itertools.product((0, 1), repeat=N):
        if 2 * sum(bits) < N:
            yield bits


def conservation(params: dict, seed=None, step: Callable | None = None) -> list[Check]:
    step = step or lattice.periodic_transform
    violations = 0
    checked = 0
    for N in range(1, params["exhaustive_max_N"] + 1):
        for bits in admissible_words(N):
            rep = solitons.verify_conservation(BinaryConfiguration.cyclic(bits), step)
            checked += 1
            violations += not rep.conserved
    rng = np.random.default_rng(seed)
    rviol = 0
    for _ in range(params["random_count"]):
        N = int(rng.integers(2, params["random_max_N"] + 1))
        p = rng.uniform(0.05, 0.5)
        bits = tuple(int(v) for v in rng.random(N) < p)
        if 2 * sum(bits) >= N:
            continue
        rviol += not solitons.verify_conservation(BinaryConfiguration.cyclic(bits), step).conserved
    return [Check("conservation-exhaustive", violations == 0, {"configs": checked, "violations": violations}),
            Check("conservation-random", rviol == 0, {"configs": params["random_count"], "violations": rviol})]


def reversibility(params: dict, seed=None, step: Callable | None = None) -> list[Check]:
    failures = 0
    checked = 0
    for N in range(1, params["exhaustive_max_N"] + 1):
        words = np.array(list(admissible_words(N)), dtype=np.int8).reshape(-1, N)
        if step is None:
            images = lattice.periodic_transform_many(words)
        else:
            images = np.array([step(BinaryConfiguration.cyclic(w)).sites for w in words], dtype=np.int8)
        for w, img in zip(words, images):
            checked += 1
            try:
                path = lattice.encode_path(BinaryConfiguration.cyclic(img))
                back = lattice.decode_path(lattice.inverse_transform(path, lattice.CYCLIC))
            except lattice.DensityError:
                failures += 1
                continue
            failures += back.sites != tuple(int(v) for v in w)
    return [Check("inverse-after-T", failures == 0, {"configs": checked, "failures": failures})]


def _gibbs_specs(params: dict, N: int):
    return {
        "iid": samplers.PeriodicIID(N, params["iid"]["p"]),
        "markov": samplers.CyclicMarkov(N, params["markov"]["p0"], params["markov"]["p1"]),
        "bounded": samplers.PeriodicBounded(N, params["bounded"]["p"], params["bounded"]["K"]),
    }


def gibbs_invariance(params: dict, seed=None, step: Callable | None = None) -> list[Check]:
    out = []
    for N in params["N"]:
        for name, spec in _gibbs_specs(params, N).items():
            table = exactdist.enumerate_gibbs(spec)
            if step is None:
                image = exactdist.pushforward_T(table)
            else:
                acc: dict[str, float] = {}
                for word, q in zip(table.support, table.probs):
                    y = "".join(map(str, step(BinaryConfiguration.cyclic([int(c) for c in word])).sites))
                    acc[y] = acc.get(y, 0.0) + q
                image = exactdist.DistributionTable(N, list(acc), np.array(list(acc.values())))
            tv = exactdist.tv_distance(table, image)
            out.append(Check(f"gibbs-invariance-{name}-N{N}", tv < params["tolerance"], {"tv": tv}))
    return out


def limits(params: dict, seed=None, step=None) -> list[Check]:
    out = []
    for fam in ("iid", "markov", "bounded"):
        rep = exactdist.limit_convergence_report(fam, params[fam], params["M"], params["grid"])
        ok = rep["decreasing"] and rep["final_tv"] < params["tolerance"]
        out.append(Check(f"limit-{fam}", ok, {"tv": [r["tv"] for r in rep["rows"]],
                                               "decreasing": rep["decreasing"]}))
    return out


def high_density(params: dict, seed=None, step=None) -> list[Check]:
    spec = samplers.PeriodicIID(params["N"], params["p"])
    marg = exactdist.window_marginal_periodic(spec, params["M"])
    fair = np.full(1 << params["M"], 0.5 ** params["M"])
    tv = exactdist.tv_distance(marg, fair)
    return [Check("high-density-collapse", tv < params["tolerance"], {"tv": tv})]


def carrier_marginals(params: dict, seed=None, step=None) -> list[Check]:
    from fractions import Fraction

    n = params["samples"]
    alpha = params["alpha"]
    ss = np.random.SeedSequence(seed)
    s1, s2 = ss.spawn(2)
    p = params["iid"]["p"]
    w = samplers.sample_iid(p, (1, 5), s1, n).carrier[:, -1]
    pmf = exactdist.carrier_marginal_iid(p)
    obs = np.bincount(np.minimum(w, len(pmf) - 1), minlength=len(pmf))
    pv_iid = exactdist.chi_square_test(obs, pmf)
    p0, p1 = params["markov"]["p0"], params["markov"]["p1"]
    wm = samplers.sample_markov(p0, p1, (1, 5), s2, n).carrier[:, -1]
    pmf_m = exactdist.carrier_marginal_markov(p0, p1)
    obs_m = np.bincount(np.minimum(wm, len(pmf_m) - 1), minlength=len(pmf_m))
    pv_m = exactdist.chi_square_test(obs_m, pmf_m)
    # exact normalisation with rational parameters
    pi0, r = exactdist.iid_carrier_parameters(Fraction(p).limit_denominator(10 ** 6))
    atom, first, q = exactdist.markov_carrier_parameters(Fraction(p0).limit_denominator(10 ** 6),
                                                         Fraction(p1).limit_denominator(10 ** 6))
    exact_ok = pi0 / (1 - r) == 1 and atom + first / (1 - q) == 1
    tol = params["normalization"]
    float_ok = abs(pmf.sum() - 1) < tol and abs(pmf_m.sum() - 1) < tol
    return [Check("carrier-iid-chisq", pv_iid > alpha, {"p_value": pv_iid}),
            Check("carrier-markov-chisq", pv_m > alpha, {"p_value": pv_m}),
            Check("carrier-normalisation", exact_ok and float_ok,
                  {"iid_mass": float(pmf.sum()), "markov_mass": float(pmf_m.sum())})]


def quasistationary(params: dict, seed=None, step=None) -> list[Check]:
    tol = params["tolerance"]
    worst_res = worst_db = worst_row = 0.0
    for K in range(params["K_max"] + 1):
        for p in params["p"]:
            sol = samplers.quasistationary_solve(p, K)
            Pt = sol.tilted()
            flux = sol.pi_tilde[:, None] * Pt
            worst_res = max(worst_res, sol.residual())
            worst_db = max(worst_db, float(np.abs(flux - flux.T).max()))
            worst_row = max(worst_row, float(np.abs(Pt.sum(axis=1) - 1).max()))
    d = params["density"]
    rows = params["rows"]
    smp = samplers.sample_bounded(d["p"], d["K"], (1, params["steps"] // rows), seed, rows)
    sup = int(smp.carrier.max())
    density = float(smp.eta.mean())
    se = math.sqrt(0.25 / smp.eta.size)
    return [Check("qs-eigen-residual", worst_res < tol, {"max_residual": worst_res}),
            Check("qs-detailed-balance", worst_db < tol and worst_row < tol,
                  {"max_imbalance": worst_db, "max_row_defect": worst_row}),
            Check("qs-carrier-bound", sup <= d["K"], {"sup_W": sup, "K": d["K"], "steps": int(smp.eta.size)}),
            Check("qs-density-below-half", density + 3 * se < 0.5, {"density": density})]


# --------------------------------------------------------------------------
# Toda


def toda_bridge(params: dict, seed=None, step=None) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for periodic in (False, True):
        mismatches = 0
        for _ in range(params["states"]):
            J = int(rng.integers(1, params["J_max"] + 1))
            st = toda.random_state(rng, J, periodic)
            a = toda.step(st)
            b = toda.toda_step_via_path(st)
            mismatches += (a.Q, a.E) != (b.Q, b.E)
        label = "periodic" if periodic else "finite"
        out.append(Check(f"toda-bridge-{label}", mismatches == 0,
                         {"states": params["states"], "mismatches": mismatches}))
    broken = 0
    for periodic in (False, True):
        for integer in (False, True):
            for _ in range(params["orbits"]):
                st = toda.random_state(rng, int(rng.integers(1, params["J_max"] + 1)), periodic, integer)
                ref = toda.toda_invariants(st)
                cur = st
                for _ in range(params["iterations"]):
                    cur = toda.step(cur)
                    inv = toda.toda_invariants(cur)
                    if (inv["J"], inv["sum_Q"], inv["L"]) != (ref["J"], ref["sum_Q"], ref["L"]):
                        broken += 1
                        break
                    if integer and not cur.is_integer:
                        broken += 1
                        break
    out.append(Check("toda-conservation", broken == 0, {"violations": broken,
                                                          "iterations": params["iterations"]}))
    return out


def toda_palm_images(l0: float, l1: float, J: int, n: int, seed) -> dict:
    smp = toda.sample_toda_palm(l0, l1, J, seed, n)
    rows = [toda.palm_tstar_central(smp, i) for i in range(n)]
    return {k: np.array([r[k] for r in rows]) for k in rows[0]}


def toda_measures(params: dict, seed=None, step=None) -> list[Check]:
    alpha = params["alpha"]
    n = params["samples"]
    s_palm, s_dir, s_int, s_uni = np.random.SeedSequence(seed).spawn(4)
    pp = params["palm"]
    img = toda_palm_images(pp["lambda0"], pp["lambda1"], pp["J"], n, s_palm)
    out = []
    for key, lam in (("Q1", pp["lambda1"]), ("E1", pp["lambda0"]), ("Q0", pp["lambda1"]), ("E0", pp["lambda0"])):
        pv = exactdist.ks_test(img[key], stats.expon(scale=1 / lam).cdf)
        out.append(Check(f"toda-palm-{key}", pv > alpha, {"p_value": pv}))
    d = params["dirichlet"]
    states = toda.sample_toda_periodic_dirichlet(d["J"], d["A"], d["L"], s_dir, n)
    q1 = np.array([toda.toda_step_periodic(s).Q[0] for s in states]) / d["A"]
    pv = exactdist.ks_test(q1, stats.beta(1, d["J"] - 1).cdf)
    out.append(Check("toda-dirichlet-Q1", pv > alpha, {"p_value": pv}))
    g = params["integer"]
    ints = toda.sample_toda_periodic_integer(g["J"], g["A"], g["L"], s_int, n)
    q1 = np.array([toda.toda_step_periodic(s).Q[0] for s in ints]) - 1
    m = g["A"] - g["J"]
    obs = np.bincount(q1, minlength=m + 1)
    pv = exactdist.chi_square_test(obs, stats.binom(m, 1 / g["J"]).pmf(np.arange(m + 1)))
    out.append(Check("toda-integer-Q1-binomial", pv > alpha, {"p_value": pv}))
    # the law that is actually invariant: uniform compositions (the step is a bijection)
    uni = toda.sample_toda_periodic_integer(g["J"], g["A"], g["L"], s_uni, n, law="uniform")
    q1 = np.array([toda.toda_step_periodic(s).Q[0] for s in uni])
    ks = np.arange(1, g["A"] - g["J"] + 2)
    target = np.array([math.comb(g["A"] - k - 1, g["J"] - 2) for k in ks], float)
    pv = exactdist.chi_square_test(np.bincount(q1, minlength=ks[-1] + 1)[1:], target / target.sum())
    out.append(Check("toda-integer-Q1-uniform", pv > alpha, {"p_value": pv}))
    tv_u = toda.integer_law_defect(g["J"], g["A"], g["L"], "uniform")
    tv_m = toda.integer_law_defect(g["J"], g["A"], g["L"], "multinomial")
    out.append(Check("toda-integer-exact", tv_u < 1e-12, {"tv_uniform": tv_u, "tv_multinomial": tv_m}))
    return out


# --------------------------------------------------------------------------
# continuum


def zigzag(params: dict, seed=None, step=None) -> list[Check]:
    spec = continuum.ZigzagSpec(params["lambda0"], params["lambda1"])
    alpha = params["alpha"]
    s_path, s_w = np.random.SeedSequence(seed).spawn(2)
    # mean sojourn is (1/l0 + 1/l1)/2; ask for enough time to see the target count of each kind
    horizon = params["sojourns"] * (1 / spec.lambda0 + 1 / spec.lambda1) * 1.1
    smp = continuum.sample_zigzag(spec, (0, horizon), s_path)
    image = smp.transformed()
    down, up = continuum.sojourn_lengths(image)
    pv_d = exactdist.ks_test(down, stats.expon(scale=1 / spec.lambda1).cdf)
    pv_u = exactdist.ks_test(up, stats.expon(scale=1 / spec.lambda0).cdf)
    n = params["carrier_samples"]
    w, _ = continuum.sample_zigzag_carrier(spec, n, s_w)
    atom = float(np.mean(w == 0))
    mean = float(w.mean())
    a0 = spec.carrier_atom
    m0 = spec.carrier_mean
    # second moment of the exponential part: E W^2 = (2 l0/(l0+l1)) * 2/(l1-l0)^2
    ew2 = 2 * spec.lambda0 / (spec.lambda0 + spec.lambda1) * 2 / (spec.lambda1 - spec.lambda0) ** 2
    sd_atom = math.sqrt(a0 * (1 - a0) / n)
    sd_mean = math.sqrt((ew2 - m0 ** 2) / n)
    k = params["sigmas"]
    return [Check("zigzag-T-down-sojourns", pv_d > alpha, {"p_value": pv_d, "count": len(down)}),
            Check("zigzag-T-up-sojourns", pv_u > alpha, {"p_value": pv_u, "count": len(up)}),
            Check("zigzag-carrier-atom", abs(atom - a0) < k * sd_atom, {"atom": atom, "target": a0}),
            Check("zigzag-carrier-mean", abs(mean - m0) < k * sd_mean, {"mean": mean, "target": m0})]


def scaling(params: dict, seed=None, step=None) -> list[Check]:
    eps, c = params["eps"], params["c"]
    n = params["samples"]
    s_iid, s_mk = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(s_iid)
    p = (1 - eps * c) / 2
    steps = int(round(1 / eps ** 2))
    vals = []
    chunk = 500
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        inc = np.where(rng.random((m, steps)) < p, -1, 1).astype(np.int64)
        paths = np.concatenate((np.zeros((m, 1), np.int64), np.cumsum(inc, axis=1)), axis=1)
        for row in paths:
            vals.append(continuum.rescale_path(row, eps, eps ** 2).value_at(1.0))
    pv = exactdist.ks_test(vals, stats.norm(loc=c, scale=1).cdf)
    mk = params["markov"]
    l0, l1 = mk["lambda0"], mk["lambda1"]
    length = int(mk["sojourns"] * (1 / l0 + 1 / l1) / eps * 1.2)
    eta = samplers.sample_markov_plain(eps * l0, 1 - eps * l1, length, s_mk)[0]
    s = np.concatenate(([0], np.cumsum(1 - 2 * eta.astype(np.int64))))
    path = continuum.rescale_path(s, eps, eps)
    down, up = continuum.sojourn_lengths(path)
    down, up = down[: mk["sojourns"]], up[: mk["sojourns"]]
    pv_d = exactdist.ks_test(down, stats.expon(scale=1 / l1).cdf)
    pv_u = exactdist.ks_test(up, stats.expon(scale=1 / l0).cdf)
    a = params["alpha"]
    return [Check("scaling-S1-normal", pv > a, {"p_value": pv, "mean": float(np.mean(vals))}),
            Check("scaling-markov-down", pv_d > a, {"p_value": pv_d, "count": len(down)}),
            Check("scaling-markov-up", pv_u > a, {"p_value": pv_u, "count": len(up)})]


# --------------------------------------------------------------------------
# conditioned one-sided identity and Palm invariance


def one_sided_samples(p: float, M: int, n: int, horizon: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """First ``M`` steps of both conditioned processes, encoded as 0/1 (down = 1).

    Left: the walk given that it never goes below 0.  Beyond the horizon the
    walk survives with probability ``1 - r^{S_H + 1}``, which is used as an
    exact acceptance probability.  Right: ``2 Mbar - S`` given ``M_0 = 0``,
    i.e. an initial carrier of 0.
    """
    rng = np.random.default_rng(seed)
    r = p / (1 - p)
    left = np.empty((0, M), dtype=np.int8)
    while len(left) < n:
        eta = (rng.random((4 * n, horizon)) < p).astype(np.int8)
        s = np.cumsum(1 - 2 * eta.astype(np.int64), axis=1)
        ok = s.min(axis=1) >= 0
        ok &= rng.random(len(s)) < 1 - r ** (s[:, -1] + 1)
        left = np.concatenate((left, eta[ok, :M]))
    left = left[:n]
    right = np.empty((0, M), dtype=np.int8)
    while len(right) < n:
        smp = samplers.sample_iid(p, (1, M), rng, 2 * n)
        keep = smp.carrier[:, 0] == 0
        eta = smp.eta[keep]
        s = np.concatenate((np.zeros((len(eta), 1), np.int64), np.cumsum(1 - 2 * eta.astype(np.int64), axis=1)), axis=1)
        mbar = np.maximum.accumulate(s, axis=1)
        img = 2 * mbar - s
        right = np.concatenate((right, ((1 - np.diff(img, axis=1)) // 2).astype(np.int8)))
    return left, right[:n]


def section5(params: dict, seed=None, step=None) -> list[Check]:
    left, right = one_sided_samples(params["p"], params["M"], params["samples"], params["horizon"], seed)
    ca = exactdist.window_counts(left)
    cb = exactdist.window_counts(right)
    pv = exactdist.two_sample_chi_square(ca, cb)
    return [Check("one-sided-identity", pv > params["alpha"], {"p_value": pv, "samples": params["samples"]})]


def discrete_palm_images(p0: float, p1: float, n: int, lo: int, hi: int, seed, span: int = 80) -> np.ndarray:
    """Windows ``lo..hi`` of ``theta^tau T eta`` for Palm-Markov samples."""
    smp = samplers.sample_palm_markov(p0, p1, (lo - 2, span), seed, n)
    t = smp.transformed()
    c0 = smp.column(0)
    is_max = (t[:, c0:-1] == 0) & (t[:, c0 + 1:] == 1)
    if not is_max.any(axis=1).all():
        raise RuntimeError("window too short to locate the first local maximum")
    tau = is_max.argmax(axis=1)
    cols = c0 + tau[:, None] + np.arange(lo, hi + 1)[None, :]
    if cols.max() >= t.shape[1]:
        raise RuntimeError("window too short for the re-rooted read-out")
    return np.take_along_axis(t, cols, axis=1)


def palm(params: dict, seed=None, step=None) -> list[Check]:
    d = params["discrete"]
    s_d, s_c, s_f = np.random.SeedSequence(seed).spawn(3)
    lo, hi = d["window"]
    img = discrete_palm_images(d["p0"], d["p1"], d["samples"], lo, hi, s_d)
    exact = exactdist.palm_window_law(d["p0"], d["p1"], lo, hi)
    pv_d = exactdist.chi_square_test(exactdist.window_counts(img), exact)
    c = params["continuous"]
    smp = toda.sample_toda_palm(c["lambda0"], c["lambda1"], c["J"], s_c, c["samples"])
    fresh = toda.sample_toda_palm(c["lambda0"], c["lambda1"], c["J"], s_f, c["samples"])
    out = [Check("palm-discrete", pv_d > params["alpha"], {"p_value": pv_d})]
    for t_eval in c["times"]:
        a = np.empty(c["samples"])
        b = np.empty(c["samples"])
        for i in range(c["samples"]):
            image, _ = continuum.pl_tstar(smp.path(i), smp.past_max_abs(i))
            a[i] = image.value_at(t_eval)
            b[i] = fresh.path(i).value_at(t_eval)
        # S(t) has atoms (e.g. S(t) = -t when Q_1 > t); rounding noise would split them
        pv = float(stats.ks_2samp(np.round(a, 9), np.round(b, 9)).pvalue)
        out.append(Check(f"palm-continuous-S({t_eval:g})", pv > params["alpha"], {"p_value": pv}))
    return out


def _symmetry_samples(kind: str, params: dict, n: int, M: int, rng):
    if kind == "iid":
        smp = samplers.sample_iid(params["p"], (-M, M + 1), rng, n)
    elif kind == "markov":
        smp = samplers.sample_markov(params["p0"], params["p1"], (-M, M + 1), rng, n)
    else:
        smp = samplers.sample_bounded(params["p"], params["K"], (-M, M + 1), rng, n)
    return smp


def symmetry(params: dict, seed=None, step=None) -> list[Check]:
    """Reversal and transform symmetries of the stationary laws.

    For each law: ``eta`` read backwards has the law of ``eta``; the reversed
    carrier ``Wbar_n = W_{-n}`` has the law of ``W``; and ``T eta`` has the law
    of ``eta``.
    """
    out = []
    n, M, cap = params["samples"], params["M"], params["carrier_cap"]
    rng = np.random.default_rng(seed)
    for kind in ("iid", "markov", "bounded"):
        smp = _symmetry_samples(kind, params[kind], n, M, rng)
        fwd = smp.eta[:, smp.column(1): smp.column(M) + 1]
        rev = smp.eta[:, smp.column(1): smp.column(M) + 1][:, ::-1]
        other = _symmetry_samples(kind, params[kind], n, M, rng)
        fwd2 = other.eta[:, other.column(1): other.column(M) + 1]
        pv_rev = exactdist.two_sample_chi_square(exactdist.window_counts(rev), exactdist.window_counts(fwd2))
        tr = smp.transformed()[:, smp.column(1): smp.column(M) + 1]
        pv_T = exactdist.two_sample_chi_square(exactdist.window_counts(tr), exactdist.window_counts(fwd))
        w = np.minimum(smp.carrier, cap)
        # carrier column j is W_{start-1+j}
        j = lambda m: m - smp.start + 1  # noqa: E731
        wf = w[:, [j(m) for m in range(1, 4)]]
        w2 = np.minimum(other.carrier, cap)
        wb = w2[:, [j(-m) for m in range(1, 4)]]
        code = lambda a: a @ ((cap + 1) ** np.arange(a.shape[1]))  # noqa: E731
        size = (cap + 1) ** 3
        pv_W = exactdist.two_sample_chi_square(np.bincount(code(wf), minlength=size),
                                               np.bincount(code(wb), minlength=size))
        a = params["alpha"]
        out += [Check(f"symmetry-{kind}-reversal", pv_rev > a, {"p_value": pv_rev}),
                Check(f"symmetry-{kind}-carrier-reversal", pv_W > a, {"p_value": pv_W}),
                Check(f"symmetry-{kind}-T", pv_T > a, {"p_value": pv_T})]
    return out


def mcmc(params: dict, seed=None, step=None) -> list[Check]:
    """Exact law of the Metropolis chain after burn-in, against enumeration."""
    out = []
    for N in params["N"]:
        for name, spec in _gibbs_specs(params, N).items():
            g = samplers.as_gibbs(spec)
            P = samplers.gibbs_metropolis_matrix(g)
            lw = samplers.gibbs_log_weights(g)
            target = np.where(lw > -np.inf, np.exp(lw - lw.max()), 0.0)
            target /= target.sum()
            dist = np.zeros(1 << N)
            dist[0] = 1.0
            for _ in range(params["burn_in"]):
                dist = P.T @ dist
            tv = 0.5 * float(np.abs(dist - target).sum())
            stat = 0.5 * float(np.abs(P.T @ target - target).sum())
            out.append(Check(f"mcmc-{name}-N{N}", tv < params["tolerance"] and stat < 1e-12,
                             {"tv_after_burn_in": tv, "stationarity_defect": stat}))
    return out


SUITES: dict[str, Callable] = {
    "figure1": figure1,
    "conservation": conservation,
    "reversibility": reversibility,
    "gibbs-invariance": gibbs_invariance,
    "limits": limits,
    "high-density": high_density,
    "carrier-marginals": carrier_marginals,
    "quasistationary": quasistationary,
    "toda-bridge": toda_bridge,
    "toda-measures": toda_measures,
    "zigzag": zigzag,
    "scaling": scaling,
    "section5": section5,
    "palm": palm,
    "symmetry": symmetry,
    "mcmc": mcmc,
}

# suites that accept a replacement step function for negative controls
STEPPABLE = {"figure1", "conservation", "reversibility", "gibbs-invariance"}


def run_suite(name: str, seed=None, overrides: dict | None = None, broken: bool = False) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    params = dict(load_defaults()[name])
    if overrides:
        params.update(overrides)
    step = None
    if broken:
        if name not in STEPPABLE:
            raise KeyError(f"suite {name!r} has no step function to break")
        step = _broken_finite if name == "figure1" else broken_step
    return SUITES[name](params, seed, step)


def _broken_finite(config: BinaryConfiguration) -> BinaryConfiguration:
    out = lattice.step(config)
    return BinaryConfiguration(out.sites[1:] + (0,), out.start, out.boundary)
