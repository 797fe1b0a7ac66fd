import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from bluefmcw.scene import Adversary, AdversaryKind, Reflector, ScenarioParams, Scene, sample_scene, tof
from bluefmcw.waveform import random_hopping_plan, reference_plan


def test_tof_values():
    assert tof(0.0) == 0.0
    assert tof(25.0) == pytest.approx(1.6678e-7, rel=1e-4)
    assert tof(150.0) == pytest.approx(1.0007e-6, rel=1e-4)


def test_tof_negative():
    with pytest.raises(ValueError):
        tof(-1.0)


@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_tof_linear(a, b):
    assert tof(a + b) == pytest.approx(tof(a) + tof(b), rel=1e-14, abs=1e-300)


def test_reference_scene():
    params = ScenarioParams(n_adversaries=10)
    scene = sample_scene(params, np.random.default_rng(0))
    assert [r.distance for r in scene.reflectors] == [25.0]
    assert scene.reflectors[0].attenuation == 1.0
    assert len(scene.adversaries) == 10
    for a in scene.adversaries:
        assert 2.5 <= a.power_sir_db <= 6.0
        assert 0.5 <= a.ghost_distance <= 200.0
        assert a.kind is AdversaryKind.CONVENTIONAL


def test_no_adversaries():
    scene = sample_scene(ScenarioParams(n_adversaries=0), np.random.default_rng(0))
    assert len(scene.reflectors) == 1
    assert scene.adversaries == ()


def test_deterministic():
    p = ScenarioParams(n_adversaries=4)
    a = sample_scene(p, np.random.default_rng(7))
    b = sample_scene(p, np.random.default_rng(7))
    assert a == b


def _draws(n=10_000):
    rng = np.random.default_rng(2024)
    p = ScenarioParams(n_adversaries=1)
    advs = [sample_scene(p, rng).adversaries[0] for _ in range(n)]
    return np.array([a.ghost_distance for a in advs]), np.array([a.power_sir_db for a in advs])


def test_distance_mean():
    d, _ = _draws()
    assert d.mean() == pytest.approx(100.25, abs=2.0)


def test_uniform_ks():
    d, s = _draws()
    assert stats.kstest(d, stats.uniform(0.5, 199.5).cdf).pvalue > 0.001
    assert stats.kstest(s, stats.uniform(2.5, 3.5).cdf).pvalue > 0.001


def test_blue_adversaries_get_own_plans():
    plan = reference_plan()
    p = ScenarioParams(n_adversaries=3, adversary_kind=AdversaryKind.BLUE)
    scene = sample_scene(p, np.random.default_rng(3), plan)
    victim = random_hopping_plan(plan.n_sub, 3)
    seeds = {a.own_hopping.seed for a in scene.adversaries}
    assert len(seeds) == 3
    for a in scene.adversaries:
        assert a.own_hopping.n_sub == plan.n_sub
        assert not np.array_equal(a.own_hopping.perm, victim.perm)


def test_blue_adversaries_need_plan():
    p = ScenarioParams(n_adversaries=1, adversary_kind=AdversaryKind.BLUE)
    with pytest.raises(ValueError):
        sample_scene(p, np.random.default_rng(0))


def test_invalid_ranges():
    with pytest.raises(ValueError):
        ScenarioParams(distance_range=(10.0, 1.0))
    with pytest.raises(ValueError):
        Reflector(-1.0)
    with pytest.raises(ValueError):
        Reflector(1.0, 0.0)
    with pytest.raises(ValueError):
        Adversary(AdversaryKind.BLUE, 10.0, 3.0)


def test_adversary_amplitude():
    a = Adversary(AdversaryKind.CONVENTIONAL, 10.0, 20.0)
    assert a.amplitude(1.0) == pytest.approx(0.1)
    assert a.delay == tof(10.0)


def test_json_roundtrip():
    plan = reference_plan()
    p = ScenarioParams(n_adversaries=2, adversary_kind=AdversaryKind.BLUE, noise_snr_db=30.0)
    scene = sample_scene(p, np.random.default_rng(1), plan)
    doc = json.loads(json.dumps(scene.to_dict()))
    back = Scene.from_dict(doc)
    assert back == scene
