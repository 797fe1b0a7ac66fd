import csv
import json
from dataclasses import replace

import numpy as np
import pytest

import bluefmcw.harness as harness
from bluefmcw.analysis import MetricsResult
from bluefmcw.errors import ConfigError
from bluefmcw.harness import (
    Alignment,
    CampaignConfig,
    Mode,
    config_from_dict,
    config_to_dict,
    derive_seed,
    emit_outputs,
    emit_sweep_outputs,
    load_config,
    load_preset,
    preset_names,
    run_campaign,
    run_single,
    run_sweep,
    simulate_scene,
)


def _small(name="bvc", runs=4, **kw):
    return replace(load_preset(name), runs=runs, **kw)


def _read_all(d):
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


# --- config -------------------------------------------------------------------


def test_presets_present():
    names = set(preset_names())
    assert {"cvc", "bvc", "bvb", "fig6", "fig9", "fig10", "fig11"} <= names
    for n in names:
        cfg = load_preset(n)
        assert cfg.runs >= 1
        assert cfg.chirp.n_samples == 4096


def test_preset_tags():
    assert load_preset("cvc").tag == "CvC"
    assert load_preset("bvc").tag == "BvC"
    assert load_preset("bvb").tag == "BvB"
    assert replace(load_preset("bvc"), alignment=Alignment.NAIVE).tag == "BvC-naive"


def test_unknown_preset():
    with pytest.raises(ConfigError) as exc:
        load_preset("nope")
    assert exc.value.key == "preset"


def test_config_roundtrip():
    for n in preset_names():
        cfg = load_preset(n)
        assert config_from_dict(json.loads(json.dumps(config_to_dict(cfg)))) == cfg


def test_empty_config_uses_defaults():
    cfg = config_from_dict({})
    assert cfg.victim_mode is Mode.BLUE
    assert cfg.chirp.n_sub == 32
    assert cfg.runs == 100


@pytest.mark.parametrize(
    "doc, key",
    [
        ({"bogus": 1}, "bogus"),
        ({"chirp": {"slop": 1.0}}, "chirp.slop"),
        ({"chirp": {"n_sub": 30}}, "chirp.n_sub"),
        ({"chirp": {"slope": "fast"}}, "chirp.slope"),
        ({"runs": 0}, "runs"),
        ({"runs": 2.5}, "runs"),
        ({"victim_mode": "purple"}, "victim_mode"),
        ({"alignment": "sideways"}, "alignment"),
        ({"scenario": {"n_adversaries": -1}}, "scenario.n_adversaries"),
        ({"scenario": {"n_adversaries": []}}, "scenario.n_adversaries"),
        ({"scenario": {"distance_range": [5, 1]}}, "scenario.distance_range"),
        ({"scenario": {"object_distance": 1e6}}, "scenario.object_distance"),
        ({"scenario": {"extra_reflectors": [{"distance": -3}]}}, "scenario.extra_reflectors[0]"),
        ({"processing": {"window": "kaiser"}}, "processing.window"),
        ({"processing": {"guard_bins": 0}}, "processing.guard_bins"),
        ({"processing": {"n_fft": 100}}, "processing.n_fft"),
        ({"outputs": {"profile_run": 5}, "runs": 2}, "outputs.profile_run"),
        ({"sweep": {"var": "colour", "values": [1]}}, "sweep.var"),
        ({"sweep": {"var": "slope", "values": []}}, "sweep.values"),
        ({"master_seed": -1}, "master_seed"),
    ],
)
def test_config_errors_name_key(doc, key):
    with pytest.raises(ConfigError) as exc:
        config_from_dict(doc)
    assert exc.value.key == key
    assert str(exc.value).startswith(key)


def test_load_config_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.json")


# --- seeding --------------------------------------------------------------------


def test_child_seeds_do_not_collide():
    seeds = [derive_seed(m, r) for m in range(5) for r in range(20_000)]
    assert len(set(seeds)) == len(seeds)


def test_child_seed_stable():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert derive_seed(1, 0) != derive_seed(0, 1)


def test_runs_draw_different_scenes():
    cfg = _small()
    scenes = [run_single(cfg, 1, i)[1]["scene"] for i in range(20)]
    dists = {s.adversaries[0].ghost_distance for s in scenes}
    assert len(dists) == 20


# --- running ----------------------------------------------------------------------


def test_no_adversary_sir_undefined():
    cfg = config_from_dict({"runs": 1, "scenario": {"n_adversaries": 0}})
    table = run_campaign(cfg)
    r = table.results[0]
    assert r.sir_db is None
    assert table.summary["undefined_sir_runs"] == 1
    assert table.summary["metrics"]["sir_db"] is None
    _, extras = run_single(cfg, 0, 0, keep_signals=True)
    prof = extras["profiles"]["aligned"]
    peak = int(np.argmax(prof.magnitudes_db[: prof.bin_distances.size]))
    assert abs(prof.bin_distances[peak] - 25.0) <= prof.bin_distances[1]


def test_cvc_never_hops(monkeypatch):
    def boom(*a, **k):
        raise AssertionError("hopping code path used")

    monkeypatch.setattr(harness, "random_hopping_plan", boom)
    monkeypatch.setattr(harness, "reconstruct_aligned", boom)
    monkeypatch.setattr(harness, "reconstruct_naive", boom)
    table = run_campaign(_small("cvc", runs=5))
    assert len(table.results) == 5
    assert all(r.scenario == "CvC" for r in table.results)


def test_results_in_run_order():
    cfg = _small(runs=3, adversary_counts=(1, 4))
    table = run_campaign(cfg)
    assert [r.run for r in table.results] == list(range(6))
    assert [r.n_adversaries for r in table.results] == [1, 1, 1, 4, 4, 4]
    assert set(table.summary["by_count"]) == {"1", "4"}


def test_jobs_do_not_change_results():
    cfg = _small(runs=3, adversary_counts=(1, 2))
    assert run_campaign(cfg, jobs=1).results == run_campaign(cfg, jobs=3).results


# --- outputs -----------------------------------------------------------------------


def test_emit_outputs_headers(tmp_path):
    table = run_campaign(_small(runs=2))
    out = tmp_path / "new" / "dir"
    emit_outputs(table, out)
    with open(out / "runs.csv", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(MetricsResult.FIELDS)
    # two runs for each of the ten adversary counts
    assert len(rows) == 21
    summary = json.loads((out / "summary.json").read_text())
    assert summary["total_runs"] == 20
    assert set(summary["metrics"]["sir_db"]) == {"n", "p10", "p50", "p90", "cdf"}


def test_emit_outputs_byte_identical(tmp_path):
    cfg = _small(runs=3)
    emit_outputs(run_campaign(cfg), tmp_path / "a")
    emit_outputs(run_campaign(cfg, jobs=2), tmp_path / "b")
    assert _read_all(tmp_path / "a") == _read_all(tmp_path / "b")


def test_emit_outputs_empty_table(tmp_path):
    table = harness.MetricsTable(CampaignConfig(), [], {})
    with pytest.raises(ValueError):
        emit_outputs(table, tmp_path)


def test_fig6_profile_export(tmp_path):
    cfg = load_preset("fig6")
    written = emit_outputs(run_campaign(cfg), tmp_path)
    names = {p.name for p in written}
    assert {"profile_conventional.csv", "profile_naive.csv", "profile_aligned.csv", "scene.json"} <= names
    scene = json.loads((tmp_path / "scene.json").read_text())
    assert len(scene["reflectors"]) == 2
    assert len(scene["adversaries"]) == 1
    with open(tmp_path / "profile_aligned.csv", encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    assert header == ["bin", "freq_hz", "distance_m", "magnitude_db"]


def test_simulate_scene_files(tmp_path):
    report = simulate_scene(_small(runs=1), tmp_path)
    files = {p.name for p in tmp_path.iterdir()}
    for kind in ("conventional", "naive", "aligned"):
        assert f"beat_{kind}.csv" in files
        assert f"profile_{kind}.csv" in files
    assert json.loads((tmp_path / "metrics.json").read_text()) == report
    assert sorted(report["victim_hopping"]) == list(range(32))


# --- sweeps ------------------------------------------------------------------------


def test_unknown_sweep_var():
    with pytest.raises(ConfigError) as exc:
        run_sweep(_small(runs=1), "colour", [1])
    assert exc.value.key == "sweep.var"


def test_bad_sweep_value():
    with pytest.raises(ConfigError):
        run_sweep(_small(runs=1), "alignment", ["diagonal"])


def test_sweep_shares_seed(tmp_path):
    cfg = _small(runs=2, adversary_counts=(1,))
    tables = run_sweep(cfg, "alignment", ["aligned", "naive"])
    a, n = tables["aligned"].results, tables["naive"].results
    assert [r.seed for r in a] == [r.seed for r in n]
    assert [r.scenario for r in n] == ["BvC-naive"] * 2
    emit_sweep_outputs(tables, "alignment", tmp_path)
    assert (tmp_path / "alignment=naive" / "runs.csv").is_file()
    rows = list(csv.reader(open(tmp_path / "sweep.csv", encoding="utf-8")))
    assert rows[0][0] == "alignment"
    assert len(rows) == 3


def test_sweep_aggressor_mode():
    tables = run_sweep(_small(runs=1, adversary_counts=(2,)), "aggressor_mode", ["blue"])
    assert tables["blue"].results[0].scenario == "BvB"
