import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxball.lattice import BinaryConfiguration, ConfigurationError, periodic_transform, reverse_configuration
from boxball.solitons import contract, soliton_counts, verify_conservation


def brute_profile(bits):
    """Definition-level oracle: mark every cyclic (1,0) pair, delete, repeat."""
    x = list(bits)
    f = [sum(x)]
    if f[0] == 0:
        return f
    while True:
        n = len(x)
        marked = set()
        for i in range(n):
            j = (i + 1) % n
            if n >= 2 and x[i] == 1 and x[j] == 0:
                marked |= {i, j}
        f.append(len(marked) // 2)
        if not marked:
            return f
        x = [b for i, b in enumerate(x) if i not in marked]


words = st.integers(1, 24).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n))
admissible_words = words.filter(lambda b: 2 * sum(b) < len(b))


def test_contract_examples():
    assert contract((1, 0, 1, 1, 0, 0)) == (1, 0)
    assert contract((0, 0, 0)) == (0, 0, 0)
    # the wrap pair (x_3, x_1) is removed, leaving the middle zero
    assert contract((0, 0, 1)) == (0,)


def test_contract_non_cyclic_keeps_wrap():
    assert contract((0, 0, 1), cyclic=False) == (0, 0, 1)


def test_profile_examples():
    p = soliton_counts((1, 0, 1, 1, 0, 0))
    assert (p[0], p[1], p[2], p[3]) == (3, 2, 1, 0)
    assert p.sizes() == {1: 1, 2: 1}
    assert soliton_counts((0, 0, 0, 0)).to_list() == [0]
    q = soliton_counts((0, 0, 1))
    assert (q[0], q[1], q[2]) == (1, 1, 0)


def test_requires_cyclic_configuration():
    with pytest.raises(ConfigurationError):
        soliton_counts(BinaryConfiguration((1, 0), 1))
    with pytest.raises(ConfigurationError):
        soliton_counts("0121")


@given(words)
def test_matches_definition_oracle(bits):
    assert soliton_counts(bits).to_list() == brute_profile(bits)


@given(words)
def test_contraction_length(bits):
    out = contract(bits)
    f1 = soliton_counts(bits)[1]
    assert len(out) == len(bits) - 2 * f1


@given(words)
def test_monotone(bits):
    f = soliton_counts(bits).to_list()
    assert all(a >= b for a, b in zip(f[1:], f[2:]))


@given(admissible_words)
def test_every_particle_in_a_soliton(bits):
    f = soliton_counts(bits).to_list()
    assert f[0] == sum(f[1:])


@given(words, st.integers(0, 30))
def test_shift_invariance(bits, k):
    c = BinaryConfiguration.cyclic(bits)
    assert soliton_counts(c) == soliton_counts(c.shift(k))


@given(words)
def test_reversal_invariance(bits):
    c = BinaryConfiguration.cyclic(bits)
    assert soliton_counts(c) == soliton_counts(reverse_configuration(c))


def test_shift_invariance_exhaustive():
    for N in range(1, 13):
        for bits in itertools.product((0, 1), repeat=N):
            c = BinaryConfiguration.cyclic(bits)
            assert soliton_counts(c) == soliton_counts(c.shift(1))


@given(admissible_words)
def test_conserved_by_dynamics(bits):
    rep = verify_conservation(BinaryConfiguration.cyclic(bits))
    assert rep.conserved
    assert rep.to_dict()["conserved"] is True


def test_conservation_example():
    rep = verify_conservation(BinaryConfiguration.cyclic((1, 0, 1, 1, 0, 0, 0, 0)))
    assert rep.image.sites == (0, 1, 0, 0, 1, 1, 0, 0)
    assert rep.before.to_list() == [3, 2, 1, 0]


def test_broken_step_detected():
    def broken(c):
        y = list(periodic_transform(c).sites)
        y[0] ^= 1
        return BinaryConfiguration.cyclic(y)

    assert not verify_conservation(BinaryConfiguration.cyclic((1, 0, 1, 1, 0, 0, 0, 0)), broken).conserved
