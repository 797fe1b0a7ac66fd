import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from bluefmcw.errors import ConfigError
from bluefmcw.waveform import (
    hopping_from_sequence,
    identity_hopping,
    make_chirp_plan,
    random_hopping_plan,
    subchirp_start_freqs,
    reference_plan,
)


def test_reference_plan_timing():
    plan = make_chirp_plan(24e9, 24.785e12, 20e6, 4096, 32)
    assert plan.duration == pytest.approx(204.8e-6, rel=1e-12)
    assert plan.subchirp_duration == pytest.approx(6.4e-6, rel=1e-12)
    assert plan.samples_per_slot == 128


def test_reference_plan_bandwidths():
    # 24.785 MHz/us * 204.8 us = 5075.968 MHz; / 32 = 158.624 MHz
    plan = reference_plan()
    assert plan.bandwidth == pytest.approx(5075.968e6, rel=1e-12)
    assert plan.subchirp_bandwidth == pytest.approx(158.624e6, rel=1e-12)
    assert plan.subchirp_bandwidth * plan.n_sub == pytest.approx(plan.bandwidth, rel=1e-15)


def test_single_subchirp_is_conventional():
    plan = make_chirp_plan(24e9, 24.785e12, 20e6, 4096, 1)
    assert plan.subchirp_duration == plan.duration
    assert plan.samples_per_slot == 4096


def test_resolution_figures():
    plan = reference_plan()
    assert plan.resolution == pytest.approx(0.0295, abs=5e-5)
    assert plan.subchirp_resolution == pytest.approx(0.945, abs=5e-4)


@pytest.mark.parametrize(
    "args, key",
    [
        ((24e9, 24.785e12, 20e6, 4096, 30), "n_sub"),
        ((24e9, -1.0, 20e6, 4096, 32), "slope"),
        ((24e9, 24.785e12, 0.0, 4096, 32), "f_s"),
        ((24e9, 24.785e12, 20e6, 0, 1), "n_samples"),
        ((24e9, 24.785e12, 20e6, 16, 32), "n_sub"),
    ],
)
def test_make_chirp_plan_rejects(args, key):
    with pytest.raises(ConfigError) as exc:
        make_chirp_plan(*args)
    assert exc.value.key == key


def test_divisibility_error_names_both_values():
    with pytest.raises(ConfigError, match="4096.*30"):
        make_chirp_plan(24e9, 24.785e12, 20e6, 4096, 30)


def test_single_slot_plan_is_identity():
    for seed in range(5):
        assert random_hopping_plan(1, seed).perm.tolist() == [0]


def test_inverse_composition_small():
    hop = random_hopping_plan(4, 12345)
    assert sorted(hop.perm.tolist()) == [0, 1, 2, 3]
    assert hop.perm[hop.inv].tolist() == [0, 1, 2, 3]
    assert hop.inv[hop.perm].tolist() == [0, 1, 2, 3]


@given(st.integers(1, 64), st.integers(0, 2**63 - 1))
def test_inverse_is_consistent(n, seed):
    hop = random_hopping_plan(n, seed)
    assert np.array_equal(hop.inv[hop.perm], np.arange(n))
    assert hop.seed == seed


def test_same_seed_same_plan():
    a = random_hopping_plan(32, 99)
    b = random_hopping_plan(32, 99)
    assert a.perm.tobytes() == b.perm.tobytes()


def test_first_slot_uniform():
    n = 8
    first = [random_hopping_plan(n, s).perm[0] for s in range(2000)]
    counts = np.bincount(first, minlength=n)
    assert stats.chisquare(counts).pvalue > 0.001


def test_plans_are_immutable():
    hop = random_hopping_plan(8, 1)
    with pytest.raises(ValueError):
        hop.perm[0] = 3


def test_rejects_non_permutation():
    with pytest.raises(ValueError):
        hopping_from_sequence([0, 0, 1])


def test_identity_start_freqs_ascend():
    plan = reference_plan()
    f = subchirp_start_freqs(plan, identity_hopping(plan.n_sub))
    assert np.all(np.diff(f) > 0)
    assert np.allclose(np.diff(f), plan.subchirp_bandwidth)


def test_two_line_example():
    # slots carry sub-chirps 3, 2, 1, 4 (1-based)
    plan = make_chirp_plan(24e9, 24.785e12, 20e6, 512, 4)
    hop = hopping_from_sequence([3, 2, 1, 4], one_based=True)
    fk = plan.f_c + np.arange(4) * plan.subchirp_bandwidth
    assert np.array_equal(subchirp_start_freqs(plan, hop), fk[[2, 1, 0, 3]])


@settings(max_examples=50)
@given(st.integers(0, 2**32))
def test_start_freqs_cover_band(seed):
    plan = reference_plan()
    f = subchirp_start_freqs(plan, random_hopping_plan(plan.n_sub, seed))
    conv = subchirp_start_freqs(plan, identity_hopping(plan.n_sub))
    assert np.array_equal(np.sort(f), conv)
    assert f.min() == plan.f_c
    assert f.max() == pytest.approx(plan.f_c + (plan.n_sub - 1) * plan.subchirp_bandwidth)


def test_start_freq_size_mismatch():
    with pytest.raises(ConfigError):
        subchirp_start_freqs(reference_plan(), identity_hopping(4))
