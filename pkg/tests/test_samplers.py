import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from boxball import samplers
from boxball.exactdist import chi_square_test, window_counts
from boxball.lattice import BUFFERED, LatticePath, decode_path, pitman_transform
from boxball.samplers import (
    INF,
    GibbsPeriodic,
    SamplerError,
    gibbs_params_bounded,
    gibbs_params_from_iid,
    gibbs_params_from_markov,
    quasistationary_solve,
    sample_bounded,
    sample_iid,
    sample_markov,
    sample_palm_markov,
)
from boxball.solitons import soliton_counts


def three_sigma(p_hat, p, n):
    return abs(p_hat - p) < 3 * math.sqrt(p * (1 - p) / n) + 1e-12


class TestGibbsParameters:
    def test_iid_figure_value(self):
        assert gibbs_params_from_iid(0.35)[0] == pytest.approx(0.62, abs=5e-3)

    def test_markov_figure_values(self):
        b0, b1 = gibbs_params_from_markov(0.11, 0.80)
        assert b0 == pytest.approx(0.11, abs=5e-3)
        assert b1 == pytest.approx(3.48, abs=5e-3)

    def test_fair_coin(self):
        assert gibbs_params_from_iid(0.5) == (0.0,)

    def test_bounded_shape(self):
        b = gibbs_params_bounded(0.5, 2)
        assert b == (0.0, 0.0, 0.0, INF)

    def test_markov_reduces_to_iid(self):
        b0, b1 = gibbs_params_from_markov(0.3, 0.3)
        assert b0 == pytest.approx(gibbs_params_from_iid(0.3)[0]) and b1 == pytest.approx(0)

    def test_invalid(self):
        with pytest.raises(SamplerError):
            gibbs_params_from_iid(0.0)

    def test_log_weight_infinity_convention(self):
        beta = (0.5, 0.0, INF)
        assert samplers.log_weight((2, 2, 0), beta, 10) == -1.0
        assert samplers.log_weight((2, 1, 1), beta, 10) == -INF
        assert samplers.log_weight((5, 5, 0), beta, 10) == -INF


class TestSpecs:
    def test_round_trip_with_infinity(self):
        spec = GibbsPeriodic(8, gibbs_params_bounded(0.4, 1))
        d = spec.to_dict()
        assert d["beta"][-1] == "inf"
        assert samplers.spec_from_dict(d) == spec

    @pytest.mark.parametrize("spec", [samplers.Bernoulli(0.2), samplers.Markov(0.2, 0.5),
                                      samplers.BoundedSoliton(0.5, 2), samplers.PeriodicIID(6, 0.3),
                                      samplers.CyclicMarkov(6, 0.2, 0.5), samplers.PeriodicBounded(6, 0.5, 1)])
    def test_round_trip(self, spec):
        assert samplers.spec_from_dict(samplers.spec_to_dict(spec)) == spec

    def test_unknown_kind(self):
        with pytest.raises(SamplerError):
            samplers.spec_from_dict({"kind": "nope"})

    def test_negative_infinity_rejected(self):
        with pytest.raises(SamplerError):
            GibbsPeriodic(4, (-INF,))


def lindley_loop(w0, eta):
    w = [w0]
    for b in eta:
        w.append(w[-1] + 1 if b else max(w[-1] - 1, 0))
    return w


class TestIID:
    def test_zero_density(self):
        s = sample_iid(0.0, (1, 20), seed=1, size=5)
        assert not s.eta.any() and not s.carrier.any()

    def test_carrier_recursion(self):
        s = sample_iid(0.3, (-5, 30), seed=2, size=20)
        for i in range(20):
            assert list(s.carrier[i]) == lindley_loop(int(s.carrier[i, 0]), s.eta[i])

    def test_transformed_matches_path_algebra(self):
        s = sample_iid(0.3, (-10, 20), seed=3, size=30)
        for i in range(30):
            c = s.config(i)
            from boxball.lattice import encode_path
            ts = pitman_transform(encode_path(c), BUFFERED, s.past_max(i))
            img = decode_path(LatticePath(ts.values, ts.first))
            assert img.sites == tuple(s.transformed()[i])

    def test_carrier_atom(self):
        n = 200_000
        s = sample_iid(0.25, (1, 1), seed=4, size=n)
        assert three_sigma(np.mean(s.carrier[:, 0] == 0), 2 / 3, n)

    def test_window_law_is_product(self):
        s = sample_iid(0.3, (1, 4), seed=5, size=100_000)
        ys = np.array(list(itertools.product((0, 1), repeat=4)))
        expected = np.prod(np.where(ys == 1, 0.3, 0.7), axis=1)
        assert chi_square_test(window_counts(s.eta), expected) > 0.01

    def test_high_density_rejected(self):
        with pytest.raises(SamplerError):
            sample_iid(0.5, (1, 3))

    def test_seed_reproducible(self):
        a = sample_iid(0.3, (-3, 8), seed=11, size=4)
        b = sample_iid(0.3, (-3, 8), seed=11, size=4)
        assert np.array_equal(a.eta, b.eta) and np.array_equal(a.carrier, b.carrier)


class TestMarkov:
    def test_density(self):
        spec = samplers.Markov(0.11, 0.80)
        assert spec.density == pytest.approx(0.3548, abs=1e-4)
        s = sample_markov(0.11, 0.80, (1, 200), seed=1, size=2000)
        assert abs(s.eta.mean() - spec.density) < 0.01

    def test_carrier_atom(self):
        n = 100_000
        s = sample_markov(0.2, 0.3, (1, 1), seed=2, size=n)
        assert three_sigma(np.mean(s.carrier[:, 0] == 0), 25 / 36, n)

    def test_certificate_below_tolerance(self):
        s = sample_markov(0.2, 0.5, (1, 10), seed=3, size=50, tolerance=1e-9)
        assert np.all(s.certificate < 1e-9)

    def test_equal_parameters_are_iid(self):
        s = sample_markov(0.3, 0.3, (1, 4), seed=4, size=100_000)
        ys = np.array(list(itertools.product((0, 1), repeat=4)))
        expected = np.prod(np.where(ys == 1, 0.3, 0.7), axis=1)
        assert chi_square_test(window_counts(s.eta), expected) > 0.01

    def test_transition_frequencies(self):
        x = samplers.sample_markov_plain(0.2, 0.6, 400, seed=5, size=200)
        prev, nxt = x[:, :-1].ravel(), x[:, 1:].ravel()
        assert abs(nxt[prev == 0].mean() - 0.2) < 0.01
        assert abs(nxt[prev == 1].mean() - 0.6) < 0.01

    def test_tail_bound_matches_exact_law(self):
        from boxball.exactdist import carrier_marginal_markov
        pmf = carrier_marginal_markov(0.2, 0.3)
        for g in range(1, 6):
            assert samplers.markov_carrier_tail(0.2, 0.3, g) == pytest.approx(pmf[g:].sum(), rel=1e-9)

    def test_carrier_needs_subcritical(self):
        with pytest.raises(SamplerError):
            sample_markov(0.6, 0.5, (1, 3))


class TestPalm:
    def test_forced_sites(self):
        s = sample_palm_markov(0.2, 0.5, (-5, 10), seed=1, size=200)
        assert np.all(s.eta[:, s.column(0)] == 0) and np.all(s.eta[:, s.column(1)] == 1)

    def test_iid_right_of_one(self):
        s = sample_palm_markov(0.3, 0.3, (0, 5), seed=2, size=50_000)
        block = s.eta[:, s.column(2):s.column(5) + 1]
        ys = np.array(list(itertools.product((0, 1), repeat=4)))
        expected = np.prod(np.where(ys == 1, 0.3, 0.7), axis=1)
        assert chi_square_test(window_counts(block), expected) > 0.01


class TestQuasiStationary:
    def test_trivial_K(self):
        sol = quasistationary_solve(0.3, 0)
        assert sol.lambda_K == pytest.approx(0.7)
        assert sol.pi_tilde == pytest.approx([1.0])
        s = sample_bounded(0.3, 0, (1, 30), seed=1, size=5)
        assert not s.eta.any()

    def test_golden_eigenvalue(self):
        assert quasistationary_solve(0.5, 1).lambda_K == pytest.approx((1 + math.sqrt(5)) / 4, abs=1e-14)

    @pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("K", range(0, 11))
    def test_structure(self, p, K):
        sol = quasistationary_solve(p, K)
        assert sol.residual() < 1e-12
        dense = np.linalg.eigvals(sol.substochastic())
        assert sol.lambda_K == pytest.approx(max(abs(dense)), abs=1e-12)
        assert np.all(sol.h_K > 0)
        Pt = sol.tilted()
        assert np.allclose(Pt.sum(axis=1), 1, atol=1e-12)
        flow = sol.pi_tilde[:, None] * Pt
        assert np.max(np.abs(flow - flow.T)) < 1e-12
        assert sol.pi_tilde.sum() == pytest.approx(1, abs=1e-14)

    def test_bounded_sample(self):
        s = sample_bounded(0.8, 3, (1, 10_000), seed=2, size=20)
        assert s.carrier.max() <= 3
        assert s.eta.mean() < 0.5
        for i in range(3):
            assert list(s.carrier[i]) == lindley_loop(int(s.carrier[i, 0]), s.eta[i])


def brute_gibbs(spec):
    probs = {}
    for bits in itertools.product((0, 1), repeat=spec.N):
        lw = samplers.log_weight(soliton_counts(bits).to_list(), spec.beta, spec.N)
        if lw > -INF:
            probs["".join(map(str, bits))] = math.exp(lw)
    z = sum(probs.values())
    return {k: v / z for k, v in probs.items()}


class TestGibbs:
    def test_log_weights_match_brute(self):
        spec = GibbsPeriodic(8, (0.4, 1.3, 0.0, INF))
        lw = samplers.gibbs_log_weights(spec)
        z = np.exp(lw).sum()
        brute = brute_gibbs(spec)
        for i, v in enumerate(lw):
            word = samplers._word_of_index(i, 8)
            assert math.exp(v) / z == pytest.approx(brute.get(word, 0.0), abs=1e-15)

    def test_huge_beta0_is_empty(self):
        x = samplers.sample_gibbs_periodic(GibbsPeriodic(10, (60.0,)), seed=1, size=200)
        assert not x.any()

    def test_exact_sampler_frequencies(self):
        spec = samplers.PeriodicIID(8, 0.35)
        brute = brute_gibbs(spec.gibbs())
        x = samplers.sample_gibbs_periodic(spec, seed=2, size=200_000, mode="exact")
        words, counts = np.unique(["".join(map(str, r)) for r in x], return_counts=True)
        obs = dict(zip(words, counts))
        keys = sorted(brute)
        assert chi_square_test(np.array([obs.get(k, 0) for k in keys]), np.array([brute[k] for k in keys])) > 0.01

    def test_metropolis_kernel_is_reversible(self):
        spec = samplers.CyclicMarkov(8, 0.2, 0.5).gibbs()
        P = samplers.gibbs_metropolis_matrix(spec).toarray()
        lw = samplers.gibbs_log_weights(spec)
        live = np.isfinite(lw)
        assert np.allclose(P[live].sum(axis=1), 1, atol=1e-13)
        pi = np.exp(lw - lw.max())
        pi /= pi.sum()
        flow = pi[:, None] * P
        assert np.max(np.abs(flow - flow.T)) < 1e-15
        # no probability ever leaks onto excluded states
        assert np.all(P[live][:, ~live] == 0)

    def test_mcmc_respects_constraints(self):
        spec = samplers.PeriodicBounded(24, 0.5, 2)
        x = samplers.sample_gibbs_periodic(spec, seed=3, size=100, mode="mcmc", burn_in=2000, thin=20)
        for row in x:
            f = soliton_counts(row)
            assert 2 * f[0] < 24 and f[3] == 0

    def test_bad_mode(self):
        with pytest.raises(SamplerError):
            samplers.sample_gibbs_periodic(samplers.PeriodicIID(6, 0.3), mode="fast")

    def test_rejection_sampler_matches_exact(self):
        x = samplers.sample_periodic_iid_rejection(0.35, 6, seed=4, size=100_000)
        brute = brute_gibbs(samplers.PeriodicIID(6, 0.35).gibbs())
        words, counts = np.unique(["".join(map(str, r)) for r in x], return_counts=True)
        obs = dict(zip(words, counts))
        keys = sorted(brute)
        assert chi_square_test(np.array([obs.get(k, 0) for k in keys]), np.array([brute[k] for k in keys])) > 0.01


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.45), st.integers(0, 2**32 - 1))
def test_iid_carrier_never_negative(p, seed):
    s = sample_iid(p, (-4, 12), seed=seed, size=8)
    assert s.carrier.min() >= 0
    assert np.all(np.abs(np.diff(s.carrier, axis=1)) <= 1)
