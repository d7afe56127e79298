from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from boxball import toda
from boxball.lattice import DensityError
from boxball.samplers import SamplerError
from boxball.toda import (
    TodaError,
    TodaState,
    compositions,
    integer_law_defect,
    iterate,
    palm_tstar_central,
    random_state,
    sample_toda_palm,
    sample_toda_periodic_dirichlet,
    sample_toda_periodic_integer,
    toda_decode_path,
    toda_encode_path,
    toda_invariants,
    toda_step,
    toda_step_periodic,
    toda_step_via_path,
)

positive = st.fractions(Fraction(1, 8), Fraction(12)).filter(lambda x: x > 0)


@st.composite
def finite_states(draw):
    J = draw(st.integers(1, 7))
    return TodaState(tuple(draw(st.lists(positive, min_size=J, max_size=J))),
                     tuple(draw(st.lists(positive, min_size=J - 1, max_size=J - 1))))


@st.composite
def periodic_states(draw):
    J = draw(st.integers(1, 6))
    Q = draw(st.lists(positive, min_size=J, max_size=J))
    E = draw(st.lists(positive, min_size=J, max_size=J))
    # push enough extra length into the gaps to keep sum Q < L/2
    extra = max(Fraction(0), sum(Q) - sum(E)) + draw(st.fractions(Fraction(1, 8), Fraction(3)))
    E[-1] += extra
    return TodaState(tuple(Q), tuple(E), True)


class TestState:
    def test_validation(self):
        with pytest.raises(TodaError):
            TodaState((), ())
        with pytest.raises(TodaError):
            TodaState((1, 0), (1,))
        with pytest.raises(TodaError):
            TodaState((1, 2), (1, 1))
        with pytest.raises(TodaError):
            TodaState((1,), (3,), True, 5)

    def test_density(self):
        with pytest.raises(DensityError):
            TodaState((2, 2), (2, 2), True)

    def test_float_length_rounding(self):
        s = TodaState((0.1, 0.2), (0.3, 9.4), True, 10.0)
        assert s.L == 10.0

    def test_dict_round_trip(self):
        s = TodaState((2, 1), (4, 3), True, 10)
        assert TodaState.from_dict(s.to_dict()) == s
        with pytest.raises(TodaError):
            TodaState.from_dict({"Q": [1]})


class TestFiniteStep:
    def test_lone_soliton(self):
        assert toda_step(TodaState((Fraction(7, 3),), ())).Q == (Fraction(7, 3),)

    def test_examples(self):
        out = toda_step(TodaState((2, 1), (3,)))
        assert out.Q == (2, 1) and out.E == (2,)
        out = toda_step(TodaState((1, 2), (5,)))
        assert out.Q == (1, 2) and out.E == (6,)

    def test_examples_via_path(self):
        for q, e, tq, te in [((2, 1), (3,), (2, 1), (2,)), ((1, 2), (5,), (1, 2), (6,)), ((4,), (), (4,), ())]:
            out = toda_step_via_path(TodaState(q, e))
            assert out.Q == tq and out.E == te

    def test_collision(self):
        out = toda_step(TodaState((1, 3), (1,)))
        assert sum(out.Q) == 4
        assert out == toda_step_via_path(TodaState((1, 3), (1,)))

    def test_wrong_variant(self):
        with pytest.raises(TodaError):
            toda_step(TodaState((1,), (3,), True))

    @given(finite_states())
    def test_matches_path_route(self, s):
        assert toda_step(s) == toda_step_via_path(s)

    @given(finite_states())
    def test_conserves_mass(self, s):
        out = toda_step(s)
        assert out.J == s.J and sum(out.Q) == sum(s.Q)

    @given(st.lists(positive, min_size=1, max_size=6), st.lists(positive, min_size=6, max_size=6))
    def test_sorted_state_translates(self, q, extra):
        q = sorted(q)
        e = [q[j] + extra[j] for j in range(len(q) - 1)]
        out = toda_step(TodaState(tuple(q), tuple(e)))
        assert out.Q == tuple(q)
        assert out.E == tuple(q[j + 1] + e[j] - q[j] for j in range(len(q) - 1))
        assert all(a >= b for a, b in zip(out.E, e))

    @given(finite_states())
    def test_integer_closure(self, s):
        s = TodaState(tuple(int(v.numerator) for v in s.Q), tuple(int(v.numerator) for v in s.E))
        out = toda_step(s)
        assert out.is_integer


class TestPeriodicStep:
    def test_examples(self):
        out = toda_step_periodic(TodaState((2, 1), (4, 3), True, 10))
        assert out.Q == (2, 1) and out.E == (3, 4) and out.L == 10
        sym = TodaState((1, 1), (3, 3), True, 8)
        assert toda_step_periodic(sym) == sym

    def test_examples_via_path(self):
        assert toda_step_via_path(TodaState((2, 1), (4, 3), True, 10)) == TodaState((2, 1), (3, 4), True, 10)
        assert toda_step_via_path(TodaState((1, 1), (3, 3), True, 8)) == TodaState((1, 1), (3, 3), True, 8)

    def test_single_block(self):
        s = TodaState((2,), (5,), True)
        assert toda_step_periodic(s) == s

    def test_wrong_variant(self):
        with pytest.raises(TodaError):
            toda_step_periodic(TodaState((1, 2), (3,)))

    @given(periodic_states())
    def test_matches_path_route(self, s):
        assert toda_step_periodic(s) == toda_step_via_path(s)

    @given(periodic_states())
    def test_conservation(self, s):
        out = toda_step_periodic(s)
        assert (out.J, sum(out.Q), out.L) == (s.J, sum(s.Q), s.L)

    def test_random_rational_states(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            s = random_state(rng, int(rng.integers(1, 6)), periodic=bool(rng.integers(2)))
            assert toda.step(s) == toda_step_via_path(s)

    def test_integer_closure(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            s = random_state(rng, int(rng.integers(1, 6)), periodic=True, integer=True)
            assert toda_step_periodic(s).is_integer


class TestEncoding:
    def test_example(self):
        p = toda_encode_path(TodaState((2, 1), (3,)))
        assert p.times == (0, 2, 5, 6)
        assert p.slopes() == [-1, 1, -1]
        assert p.left_slope == 1 and p.right_slope == 1

    def test_single_v(self):
        p = toda_encode_path(TodaState((3,), ()))
        assert p.times == (0, 3) and p.values == (0, -3)
        assert p.local_maxima() == [0]

    @given(finite_states())
    def test_round_trip_finite(self, s):
        assert toda_decode_path(toda_encode_path(s)) == s

    @given(periodic_states())
    def test_round_trip_periodic(self, s):
        assert toda_decode_path(toda_encode_path(s)) == s

    @given(periodic_states())
    def test_local_max_count(self, s):
        assert toda_invariants(s)["local_maxima"] == s.J


class TestInvariants:
    def test_iterated(self):
        rng = np.random.default_rng(5)
        for periodic in (False, True):
            for _ in range(20):
                s = random_state(rng, int(rng.integers(1, 6)), periodic=periodic)
                # finite gaps grow, so sum E is only conserved in the periodic case
                keys = ("J", "sum_Q", "sum_E", "L", "local_maxima") if periodic else ("J", "sum_Q", "local_maxima")
                ref = toda_invariants(s)
                for out in iterate(s, 100)[1:]:
                    inv = toda_invariants(out)
                    assert all(inv[k] == ref[k] for k in keys)

    def test_lone_soliton_orbit(self):
        s = TodaState((5,), ())
        assert all(x == s for x in iterate(s, 10))


class TestPalmSampler:
    def test_rates(self):
        with pytest.raises(SamplerError):
            sample_toda_palm(2, 1, 3)

    def test_moments(self):
        s = sample_toda_palm(1, 2, 2, seed=0, size=20000)
        assert s.Q.mean() == pytest.approx(0.5, rel=0.02)
        assert s.E.mean() == pytest.approx(1.0, rel=0.02)
        assert np.all(s.certificate < 1e-9)

    def test_path_has_peak_at_origin(self):
        s = sample_toda_palm(1, 2, 3, seed=1, size=5)
        for i in range(5):
            p = s.path(i)
            assert 0.0 in p.local_maxima() or (0.0 in p.times and p.slopes()[p.times.index(0.0)] < 0)
            assert s.past_max_abs(i) >= p.values[0] - 1e-9

    def test_central_segments_after_step(self):
        s = sample_toda_palm(1, 2, 6, seed=2, size=1500)
        rows = [palm_tstar_central(s, i) for i in range(1500)]
        q = [r["Q1"] for r in rows]
        e = [r["E1"] for r in rows]
        assert stats.kstest(q, stats.expon(scale=0.5).cdf).pvalue > 0.01
        assert stats.kstest(e, stats.expon(scale=1.0).cdf).pvalue > 0.01


class TestPeriodicSamplers:
    def test_single_block_is_deterministic(self):
        for s in sample_toda_periodic_dirichlet(1, 2.0, 7.0, seed=0, size=5):
            assert s.Q == (2.0,) and s.E == (5.0,)

    def test_dirichlet_sums(self):
        for s in sample_toda_periodic_dirichlet(4, 3.0, 10.0, seed=1, size=200):
            assert sum(s.Q) == pytest.approx(3.0, abs=1e-12)
            assert s.L == pytest.approx(10.0, abs=1e-12)

    def test_dirichlet_marginal_after_step(self):
        states = sample_toda_periodic_dirichlet(3, 3.0, 10.0, seed=2, size=4000)
        q1 = [toda_step_periodic(s).Q[0] / 3.0 for s in states]
        assert stats.kstest(q1, stats.beta(1, 2).cdf).pvalue > 0.01

    def test_dirichlet_constraints(self):
        with pytest.raises(SamplerError):
            sample_toda_periodic_dirichlet(2, 5.0, 10.0)

    @pytest.mark.parametrize("law", ["multinomial", "uniform"])
    def test_integer_sums(self, law):
        for s in sample_toda_periodic_integer(3, 5, 13, seed=3, size=300, law=law):
            assert sum(s.Q) == 5 and sum(s.E) == 8 and s.is_integer

    def test_integer_constraints(self):
        with pytest.raises(SamplerError):
            sample_toda_periodic_integer(4, 3, 10)
        with pytest.raises(SamplerError):
            sample_toda_periodic_integer(2, 3, 10, law="poisson")

    def test_uniform_compositions_are_uniform(self):
        states = sample_toda_periodic_integer(3, 6, 20, seed=4, size=20000, law="uniform")
        counts = {}
        for s in states:
            counts[s.Q] = counts.get(s.Q, 0) + 1
        allc = list(compositions(6, 3))
        obs = [counts.get(c, 0) for c in allc]
        assert stats.chisquare(obs).pvalue > 0.01

    def test_compositions(self):
        assert sorted(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
        assert list(compositions(3, 3)) == [(1, 1, 1)]

    @pytest.mark.parametrize("J,A,L", [(2, 3, 8), (3, 5, 12), (2, 4, 11)])
    def test_uniform_law_exactly_invariant(self, J, A, L):
        assert integer_law_defect(J, A, L, "uniform") < 1e-12

    def test_multinomial_law_not_invariant(self):
        assert integer_law_defect(2, 3, 8, "multinomial") == pytest.approx(0.25, abs=1e-12)
        assert integer_law_defect(3, 5, 12, "multinomial") > 0.2

    def test_step_is_bijection_on_compositions(self):
        J, A, L = 3, 5, 12
        images = {(out.Q, out.E) for q in compositions(A, J) for e in compositions(L - A, J)
                  for out in [toda_step_periodic(TodaState(q, e, True, L))]}
        assert len(images) == len(list(compositions(A, J))) * len(list(compositions(L - A, J)))
