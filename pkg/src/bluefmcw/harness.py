"""Seeded Monte Carlo campaigns over victim/aggressor waveform combinations.

A campaign is described by a JSON document::

    {
      "name": "bvc",
      "victim_mode": "blue",            # or "conventional"
      "aggressor_mode": "conventional", # or "blue"
      "alignment": "aligned",           # or "naive"
      "chirp": {"f_c": 24e9, "slope": 24.785e12, "f_s": 20e6,
                "n_samples": 4096, "n_sub": 32},
      "scenario": {"n_adversaries": [1, 2, 3], "distance_range": [0.5, 200],
                   "sir_range_db": [2.5, 6], "object_distance": 25,
                   "extra_reflectors": [], "noise_snr_db": null},
      "processing": {"n_fft": null, "window": "rectangular", "guard_bins": 3,
                     "boundary": "ideal", "adversary_lpf": false},
      "runs": 100,
      "master_seed": 1,
      "outputs": {"dir": "out", "profile_run": null},
      "sweep": {"var": "alignment", "values": ["aligned", "naive"]}
    }

Every key is optional; unknown keys are rejected. ``n_adversaries`` may be
a list, in which case ``runs`` runs are made for each count.

Run ``i`` of a campaign uses the child seed
``SeedSequence([master_seed, i]).generate_state(1, uint64)[0]``, which is
split again into scene, victim-hopping and noise streams. Results never
depend on worker count or scheduling.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .analysis import MetricsResult, compute_sinr, compute_sir, summarize
from .dsp import (
    SynthesisOptions,
    conventional_beat,
    range_profile,
    reconstruct_aligned,
    reconstruct_naive,
    simulate_beat,
    write_beat_csv,
    write_profile_csv,
)
from .errors import ConfigError
from .scene import AdversaryKind, Reflector, ScenarioParams, sample_scene
from .waveform import ChirpPlan, identity_hopping, make_chirp_plan, random_hopping_plan, reference_plan

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    CONVENTIONAL = "conventional"
    BLUE = "blue"


class Alignment(str, enum.Enum):
    ALIGNED = "aligned"
    NAIVE = "naive"


SWEEP_VARS = ("n_adversaries", "alignment", "slope", "victim_mode", "aggressor_mode")


@dataclass(frozen=True)
class Processing:
    n_fft: int | None = None
    window: str = "rectangular"
    guard_bins: int = 3
    boundary: str = "ideal"
    adversary_lpf: bool = False

    @property
    def options(self) -> SynthesisOptions:
        return SynthesisOptions(self.boundary, self.adversary_lpf)


@dataclass(frozen=True)
class CampaignConfig:
    name: str = "campaign"
    victim_mode: Mode = Mode.BLUE
    aggressor_mode: Mode = Mode.CONVENTIONAL
    alignment: Alignment = Alignment.ALIGNED
    chirp: ChirpPlan = field(default_factory=reference_plan)
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    adversary_counts: tuple[int, ...] = (1,)
    processing: Processing = field(default_factory=Processing)
    runs: int = 100
    master_seed: int = 0
    out_dir: str | None = None
    profile_run: int | None = None
    sweep: dict | None = None

    @property
    def tag(self) -> str:
        v = "B" if self.victim_mode is Mode.BLUE else "C"
        a = "B" if self.aggressor_mode is Mode.BLUE else "C"
        tag = f"{v}v{a}"
        if self.victim_mode is Mode.BLUE and self.alignment is Alignment.NAIVE:
            tag += "-naive"
        return tag

    @property
    def total_runs(self) -> int:
        return self.runs * len(self.adversary_counts)


# --- config parsing ----------------------------------------------------------

_TOP_KEYS = {"name", "victim_mode", "aggressor_mode", "alignment", "chirp", "scenario",
             "processing", "runs", "master_seed", "outputs", "sweep"}
_CHIRP_KEYS = {"f_c", "slope", "f_s", "n_samples", "n_sub"}
_SCENARIO_KEYS = {"n_adversaries", "distance_range", "sir_range_db", "object_distance",
                  "extra_reflectors", "noise_snr_db"}
_PROCESSING_KEYS = {"n_fft", "window", "guard_bins", "boundary", "adversary_lpf"}
_OUTPUT_KEYS = {"dir", "profile_run"}
_SWEEP_KEYS = {"var", "values"}


def _section(doc, key, allowed, path):
    sec = doc.get(key, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError("expected an object", key=f"{path}{key}")
    for k in sec:
        if k not in allowed:
            raise ConfigError("unknown key", key=f"{path}{key}.{k}")
    return sec


def _enum(cls, value, key):
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise ConfigError(f"expected one of {choices}, got {value!r}", key=key) from None


def _int(value, key, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", key=key)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", key=key)
    return value


def _num(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", key=key)
    return float(value)


def _range(value, key):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError("expected [min, max]", key=key)
    lo, hi = _num(value[0], key), _num(value[1], key)
    if lo > hi:
        raise ConfigError(f"min {lo} exceeds max {hi}", key=key)
    return (lo, hi)


def config_from_dict(doc: dict) -> CampaignConfig:
    """Validate a campaign document. Raises :class:`ConfigError` naming the key."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    for k in doc:
        if k not in _TOP_KEYS:
            raise ConfigError("unknown key", key=k)
    base = CampaignConfig()

    ch = _section(doc, "chirp", _CHIRP_KEYS, "")
    chirp_args = base.chirp.to_dict()
    for k, v in ch.items():
        chirp_args[k] = _int(v, f"chirp.{k}") if k in ("n_samples", "n_sub") else _num(v, f"chirp.{k}")
    try:
        plan = make_chirp_plan(**chirp_args)
    except ConfigError as exc:
        raise ConfigError(str(exc).split(": ", 1)[-1], key=f"chirp.{exc.key}") from None

    aggressor = _enum(Mode, doc.get("aggressor_mode", base.aggressor_mode.value), "aggressor_mode")
    sc = _section(doc, "scenario", _SCENARIO_KEYS, "")
    counts = sc.get("n_adversaries", 1)
    if isinstance(counts, list):
        if not counts:
            raise ConfigError("empty list", key="scenario.n_adversaries")
        counts = tuple(_int(c, "scenario.n_adversaries", 0) for c in counts)
    else:
        counts = (_int(counts, "scenario.n_adversaries", 0),)
    extra = []
    for i, r in enumerate(sc.get("extra_reflectors", [])):
        key = f"scenario.extra_reflectors[{i}]"
        if not isinstance(r, dict) or set(r) - {"distance", "attenuation"} or "distance" not in r:
            raise ConfigError("expected {distance, attenuation}", key=key)
        try:
            extra.append(Reflector(_num(r["distance"], key), _num(r.get("attenuation", 1.0), key)))
        except ValueError as exc:
            raise ConfigError(str(exc), key=key) from None
    noise = sc.get("noise_snr_db")
    if noise is not None:
        noise = _num(noise, "scenario.noise_snr_db")
    obj = _num(sc.get("object_distance", 25.0), "scenario.object_distance")
    if not 0 <= obj <= plan.max_range:
        raise ConfigError(f"must lie in [0, {plan.max_range:.2f}] m", key="scenario.object_distance")
    dist_range = _range(sc.get("distance_range", [0.5, 200.0]), "scenario.distance_range")
    if dist_range[0] < 0:
        raise ConfigError("distances must be nonnegative", key="scenario.distance_range")
    scenario = ScenarioParams(
        n_adversaries=counts[0],
        distance_range=dist_range,
        sir_range_db=_range(sc.get("sir_range_db", [2.5, 6.0]), "scenario.sir_range_db"),
        object_distance=obj,
        adversary_kind=AdversaryKind(aggressor.value),
        extra_reflectors=tuple(extra),
        noise_snr_db=noise,
    )

    pr = _section(doc, "processing", _PROCESSING_KEYS, "")
    n_fft = pr.get("n_fft")
    if n_fft is not None:
        n_fft = _int(n_fft, "processing.n_fft", plan.n_samples)
    window = pr.get("window", "rectangular")
    if window not in ("rectangular", "hann"):
        raise ConfigError(f"expected rectangular or hann, got {window!r}", key="processing.window")
    boundary = pr.get("boundary", "ideal")
    if boundary not in ("ideal", "blank"):
        raise ConfigError(f"expected ideal or blank, got {boundary!r}", key="processing.boundary")
    lpf = pr.get("adversary_lpf", False)
    if not isinstance(lpf, bool):
        raise ConfigError("expected true or false", key="processing.adversary_lpf")
    processing = Processing(n_fft, window, _int(pr.get("guard_bins", 3), "processing.guard_bins", 1), boundary, lpf)

    out = _section(doc, "outputs", _OUTPUT_KEYS, "")
    out_dir = out.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("expected a path string", key="outputs.dir")
    profile_run = out.get("profile_run")
    if profile_run is not None:
        profile_run = _int(profile_run, "outputs.profile_run", 0)

    sweep = doc.get("sweep")
    if sweep is not None:
        sweep = _section(doc, "sweep", _SWEEP_KEYS, "")
        if sweep.get("var") not in SWEEP_VARS:
            raise ConfigError(f"expected one of {', '.join(SWEEP_VARS)}", key="sweep.var")
        if not isinstance(sweep.get("values"), list) or not sweep["values"]:
            raise ConfigError("expected a nonempty list", key="sweep.values")
        sweep = {"var": sweep["var"], "values": list(sweep["values"])}

    name = doc.get("name", "campaign")
    if not isinstance(name, str):
        raise ConfigError("expected a string", key="name")
    runs = _int(doc.get("runs", 100), "runs", 1)
    if profile_run is not None and profile_run >= runs * len(counts):
        raise ConfigError(f"run index beyond the {runs * len(counts)} runs", key="outputs.profile_run")
    return CampaignConfig(
        name=name,
        victim_mode=_enum(Mode, doc.get("victim_mode", "blue"), "victim_mode"),
        aggressor_mode=aggressor,
        alignment=_enum(Alignment, doc.get("alignment", "aligned"), "alignment"),
        chirp=plan,
        scenario=scenario,
        adversary_counts=counts,
        processing=processing,
        runs=runs,
        master_seed=_int(doc.get("master_seed", 0), "master_seed", 0),
        out_dir=out_dir,
        profile_run=profile_run,
        sweep=sweep,
    )


def config_to_dict(cfg: CampaignConfig) -> dict:
    sc = cfg.scenario
    counts = list(cfg.adversary_counts)
    doc = {
        "name": cfg.name,
        "victim_mode": cfg.victim_mode.value,
        "aggressor_mode": cfg.aggressor_mode.value,
        "alignment": cfg.alignment.value,
        "chirp": cfg.chirp.to_dict(),
        "scenario": {
            "n_adversaries": counts if len(counts) > 1 else counts[0],
            "distance_range": list(sc.distance_range),
            "sir_range_db": list(sc.sir_range_db),
            "object_distance": sc.object_distance,
            "extra_reflectors": [{"distance": r.distance, "attenuation": r.attenuation} for r in sc.extra_reflectors],
            "noise_snr_db": sc.noise_snr_db,
        },
        "processing": {
            "n_fft": cfg.processing.n_fft,
            "window": cfg.processing.window,
            "guard_bins": cfg.processing.guard_bins,
            "boundary": cfg.processing.boundary,
            "adversary_lpf": cfg.processing.adversary_lpf,
        },
        "runs": cfg.runs,
        "master_seed": cfg.master_seed,
        "outputs": {"dir": cfg.out_dir, "profile_run": cfg.profile_run},
    }
    if cfg.sweep is not None:
        doc["sweep"] = cfg.sweep
    return doc


def load_config(path) -> CampaignConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return config_from_dict(doc)


def preset_names() -> list[str]:
    root = resources.files("bluefmcw") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> CampaignConfig:
    res = resources.files("bluefmcw") / "presets" / f"{name}.json"
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}", key="preset")
    return config_from_dict(json.loads(res.read_text(encoding="utf-8")))


# --- running -------------------------------------------------------------------


def derive_seed(master_seed: int, run_index: int) -> int:
    """Child seed of run ``run_index``; distinct runs hash to distinct seeds."""
    return int(np.random.SeedSequence([master_seed, run_index]).generate_state(1, np.uint64)[0])


def _streams(child_seed: int):
    scene_seed, hop_seed, noise_seed = np.random.SeedSequence(child_seed).generate_state(3, np.uint64)
    return int(scene_seed), int(hop_seed), int(noise_seed)


def _run_tasks(cfg: CampaignConfig):
    return [(count, ci * cfg.runs + r) for ci, count in enumerate(cfg.adversary_counts) for r in range(cfg.runs)]


def _profile(cfg, beat):
    return range_profile(beat, cfg.chirp, cfg.processing.n_fft, cfg.processing.window)


def _victim_beat(cfg, seg):
    if cfg.victim_mode is Mode.CONVENTIONAL:
        return conventional_beat(seg)
    if cfg.alignment is Alignment.ALIGNED:
        return reconstruct_aligned(seg)
    return reconstruct_naive(seg)


def run_single(cfg: CampaignConfig, count: int, run_index: int, keep_signals: bool = False):
    """One Monte Carlo run. Returns ``(MetricsResult, extras)``.

    ``extras`` holds the scene and, when ``keep_signals`` is set, the beat
    signals and range profiles of the conventional, naive and aligned
    receivers for the same scene.
    """
    plan = cfg.chirp
    child = derive_seed(cfg.master_seed, run_index)
    scene_seed, hop_seed, noise_seed = _streams(child)
    params = replace(cfg.scenario, n_adversaries=count)
    scene = sample_scene(params, np.random.default_rng(scene_seed), plan)
    opts = cfg.processing.options
    guard = cfg.processing.guard_bins
    obj = params.object_distance

    if cfg.victim_mode is Mode.BLUE:
        hopping = random_hopping_plan(plan.n_sub, hop_seed)
    else:
        hopping = identity_hopping(plan.n_sub)
    seg = simulate_beat(plan, hopping, scene, np.random.default_rng(noise_seed), opts)
    prof = _profile(cfg, _victim_beat(cfg, seg))

    base_seg = simulate_beat(plan, identity_hopping(plan.n_sub), scene.without_adversaries(),
                             np.random.default_rng(noise_seed), opts)
    base_prof = _profile(cfg, conventional_beat(base_seg))

    interference = bool(scene.adversaries) or scene.noise_snr_db is not None
    sir = compute_sir(prof, obj, guard, interference=interference)
    sinr = compute_sinr(prof, obj, guard)
    loss = compute_sinr(base_prof, obj, guard) - sinr
    result = MetricsResult(cfg.tag, child, run_index, count, sir, sinr, loss)

    extras = {"scene": scene, "hopping": hopping}
    if keep_signals:
        blue_hop = hopping if not hopping.is_identity else random_hopping_plan(plan.n_sub, hop_seed)
        blue_seg = simulate_beat(plan, blue_hop, scene, np.random.default_rng(noise_seed), opts)
        beats = {
            "conventional": conventional_beat(
                simulate_beat(plan, identity_hopping(plan.n_sub), scene, np.random.default_rng(noise_seed), opts)
            ),
            "naive": reconstruct_naive(blue_seg),
            "aligned": reconstruct_aligned(blue_seg),
        }
        extras["beats"] = beats
        extras["profiles"] = {k: _profile(cfg, b) for k, b in beats.items()}
        extras["display_hopping"] = blue_hop
    return result, extras


def _run_task(args):
    cfg, count, run_index = args
    return run_single(cfg, count, run_index)[0]


@dataclass
class MetricsTable:
    config: CampaignConfig
    results: list[MetricsResult]
    summary: dict
    profile_extras: dict | None = None


def _stats(values):
    s = summarize(values)
    return {k: s[k] for k in ("n", "p10", "p50", "p90")}


def build_summary(cfg: CampaignConfig, results: list[MetricsResult]) -> dict:
    metrics = {}
    for name in ("sir_db", "sinr_db", "sinr_loss_db"):
        vals = [getattr(r, name) for r in results if getattr(r, name) is not None]
        metrics[name] = summarize(vals) if vals else None
    by_count = {}
    for c in cfg.adversary_counts:
        rows = [r for r in results if r.n_adversaries == c]
        entry = {}
        for name in ("sir_db", "sinr_loss_db"):
            vals = [getattr(r, name) for r in rows if getattr(r, name) is not None]
            entry[name] = _stats(vals) if vals else None
        by_count[str(c)] = entry
    return {
        "name": cfg.name,
        "scenario": cfg.tag,
        "config": config_to_dict(cfg),
        "total_runs": len(results),
        "undefined_sir_runs": sum(r.sir_db is None for r in results),
        "metrics": metrics,
        "by_count": by_count,
    }


def run_campaign(cfg: CampaignConfig, jobs: int = 1) -> MetricsTable:
    """Run every (adversary count, run) pair and summarize.

    Results are ordered by run index whatever ``jobs`` is.
    """
    tasks = [(cfg, count, idx) for count, idx in _run_tasks(cfg)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_task(t) for t in tasks]
    log.info("%s: %d runs done", cfg.name, len(results))
    extras = None
    if cfg.profile_run is not None:
        count, idx = _run_tasks(cfg)[cfg.profile_run]
        extras = run_single(cfg, count, idx, keep_signals=True)[1]
    return MetricsTable(cfg, results, build_summary(cfg, results), extras)


def _dump_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def emit_outputs(table: MetricsTable, out_dir) -> list[Path]:
    """Write ``runs.csv``, ``summary.json`` and, if requested, profile CSVs."""
    if not table.results:
        raise ValueError("nothing to write: empty metrics table")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    runs_path = out / "runs.csv"
    with open(runs_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MetricsResult.FIELDS)
        for r in table.results:
            w.writerow(r.as_row())
    written.append(runs_path)
    _dump_json(out / "summary.json", table.summary)
    written.append(out / "summary.json")
    if table.profile_extras is not None:
        written += _write_signal_files(out, table.profile_extras, table.config.chirp, with_beats=False)
    return written


def _write_signal_files(out: Path, extras: dict, plan: ChirpPlan, with_beats: bool) -> list[Path]:
    written = []
    _dump_json(out / "scene.json", extras["scene"].to_dict())
    written.append(out / "scene.json")
    for kind, prof in extras["profiles"].items():
        p = out / f"profile_{kind}.csv"
        write_profile_csv(p, prof)
        written.append(p)
        if with_beats:
            p = out / f"beat_{kind}.csv"
            write_beat_csv(p, extras["beats"][kind], plan)
            written.append(p)
    return written


def simulate_scene(cfg: CampaignConfig, out_dir=None, run_index: int = 0) -> dict:
    """Single scene: beats and profiles of all three receivers plus metrics."""
    count = cfg.adversary_counts[0]
    result, extras = run_single(cfg, count, run_index, keep_signals=True)
    report = {
        "scenario": result.scenario,
        "seed": result.seed,
        "n_adversaries": count,
        "sir_db": result.sir_db,
        "sinr_db": result.sinr_db,
        "sinr_loss_db": result.sinr_loss_db,
        "victim_hopping": extras["hopping"].perm.tolist(),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_signal_files(out, extras, cfg.chirp, with_beats=True)
        _dump_json(out / "metrics.json", report)
    return report


def _apply_sweep_value(cfg: CampaignConfig, var: str, value) -> CampaignConfig:
    key = f"sweep.{var}"
    if var == "n_adversaries":
        return replace(cfg, adversary_counts=(_int(value, key, 0),))
    if var == "alignment":
        return replace(cfg, alignment=_enum(Alignment, value, key))
    if var == "slope":
        try:
            return replace(cfg, chirp=cfg.chirp.with_slope(_num(value, key)))
        except ConfigError as exc:
            raise ConfigError(str(exc), key=key) from None
    if var == "victim_mode":
        return replace(cfg, victim_mode=_enum(Mode, value, key))
    if var == "aggressor_mode":
        mode = _enum(Mode, value, key)
        return replace(cfg, aggressor_mode=mode,
                       scenario=replace(cfg.scenario, adversary_kind=AdversaryKind(mode.value)))
    raise ConfigError(f"unknown sweep variable {var!r}; expected one of {', '.join(SWEEP_VARS)}", key="sweep.var")


def run_sweep(cfg: CampaignConfig, sweep_var: str, values, jobs: int = 1) -> dict:
    """One campaign per value with the shared master seed, keyed by value."""
    if sweep_var not in SWEEP_VARS:
        raise ConfigError(f"unknown sweep variable {sweep_var!r}; expected one of {', '.join(SWEEP_VARS)}",
                          key="sweep.var")
    variants = [(v, _apply_sweep_value(cfg, sweep_var, v)) for v in values]
    return {v: run_campaign(c, jobs) for v, c in variants}


def emit_sweep_outputs(tables: dict, sweep_var: str, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    rows = []
    for value, table in tables.items():
        written += emit_outputs(table, out / f"{sweep_var}={value}")
        m = table.summary["metrics"]
        sir, loss = m["sir_db"], m["sinr_loss_db"]
        rows.append({
            "value": value,
            "scenario": table.summary["scenario"],
            "runs": table.summary["total_runs"],
            "sir_p10": sir["p10"] if sir else None,
            "sir_p50": sir["p50"] if sir else None,
            "sir_p90": sir["p90"] if sir else None,
            "sinr_loss_p50": loss["p50"] if loss else None,
        })
    path = out / "sweep.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([sweep_var, "scenario", "runs", "sir_p10", "sir_p50", "sir_p90", "sinr_loss_p50"])
        for r in rows:
            w.writerow([r["value"], r["scenario"], r["runs"]] +
                       ["undefined" if r[k] is None else repr(r[k])
                        for k in ("sir_p10", "sir_p50", "sir_p90", "sinr_loss_p50")])
    written.append(path)
    _dump_json(out / "sweep.json", {"var": sweep_var, "rows": rows})
    written.append(out / "sweep.json")
    return written
