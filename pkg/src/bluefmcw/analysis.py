"""Beat-frequency diversity design math and SIR / SINR metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .dsp import RangeProfile, find_peak, guard_indices
from .waveform import ChirpPlan, HoppingPlan, _exact

UNDEFINED = None
"""Marker for a metric with no interference to measure against."""


def _rational(value, name) -> Fraction:
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    try:
        return _exact(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name} is not an exact rational: {value!r}") from exc


def reduced_ratio(b_sub, f_s) -> tuple[int, int]:
    """``(n, m)`` with ``B_sub / f_s = n / m`` in lowest terms."""
    b, fs = _rational(b_sub, "b_sub"), _rational(f_s, "f_s")
    if b <= 0 or fs <= 0:
        raise ValueError(f"b_sub and f_s must be positive, got {b_sub!r}, {f_s!r}")
    r = b / fs
    return r.numerator, r.denominator


def diversity_bound(b_sub, f_s) -> int:
    """Maximum number of distinct aliased adversary beat frequencies."""
    return reduced_ratio(b_sub, f_s)[1]


def adversary_beat_freqs(delta_f, b_sub, f_s, offsets: Iterable[int]) -> frozenset[Fraction]:
    """``{(delta_f + k*b_sub) mod f_s : k in offsets}`` in exact arithmetic (Hz)."""
    df, b, fs = _rational(delta_f, "delta_f"), _rational(b_sub, "b_sub"), _rational(f_s, "f_s")
    if fs <= 0:
        raise ValueError("f_s must be positive")
    return frozenset((df + int(k) * b) % fs for k in offsets)


def permutation_offsets(victim: HoppingPlan, aggressor: HoppingPlan | None = None) -> list[int]:
    """Per-slot sub-chirp index gap between victim and a synchronized aggressor."""
    other = np.arange(victim.n_sub) if aggressor is None else aggressor.perm
    return [int(k) for k in victim.perm - other]


@dataclass(frozen=True)
class DiversityAnalysis:
    b_sub: Fraction
    f_s: Fraction
    ratio_n: int
    ratio_m: int
    bound: int
    realized: frozenset

    @property
    def n_realized(self) -> int:
        return len(self.realized)


def analyze_diversity(b_sub, f_s, delta_f, offsets) -> DiversityAnalysis:
    n, m = reduced_ratio(b_sub, f_s)
    offsets = list(offsets)
    return DiversityAnalysis(
        _rational(b_sub, "b_sub"),
        _rational(f_s, "f_s"),
        n,
        m,
        m,
        adversary_beat_freqs(delta_f, b_sub, f_s, offsets),
    )


def design_report(plan: ChirpPlan, hopping: HoppingPlan | None = None, delta_f=0) -> dict:
    """Diversity and resolution figures for a chirp configuration."""
    b_sub = plan.exact_subchirp_bandwidth()
    f_s = plan.exact_sampling_rate()
    n, m = reduced_ratio(b_sub, f_s)
    all_offsets = range(-(plan.n_sub - 1), plan.n_sub)
    realized = adversary_beat_freqs(delta_f, b_sub, f_s, all_offsets)
    bins = {int(round(f / f_s * plan.n_samples)) % plan.n_samples for f in realized}
    report = {
        "f_c_hz": plan.f_c,
        "slope_hz_per_s": plan.slope,
        "f_s_hz": plan.f_s,
        "n_samples": plan.n_samples,
        "n_sub": plan.n_sub,
        "chirp_duration_s": plan.duration,
        "subchirp_duration_s": plan.subchirp_duration,
        "bandwidth_hz": plan.bandwidth,
        "subchirp_bandwidth_hz": float(b_sub),
        "b_sub_over_f_s": f"{n}/{m}",
        "diversity_bound_m": m,
        "offset_count": len(all_offsets),
        "realized_beat_freqs_all_offsets": len(realized),
        "realized_fft_bins_all_offsets": len(bins),
        "range_resolution_m": plan.resolution,
        "subchirp_range_resolution_m": plan.subchirp_resolution,
        "max_unambiguous_range_m": plan.max_range,
    }
    if hopping is not None:
        offs = permutation_offsets(hopping)
        report["hopping_seed"] = hopping.seed
        report["realized_beat_freqs_this_plan"] = len(adversary_beat_freqs(delta_f, b_sub, f_s, offs))
    return report


# --- metrics ---------------------------------------------------------------


def _outside_guard(profile: RangeProfile, distance: float, guard_bins: int) -> np.ndarray:
    keep = np.ones(profile.n_fft, dtype=bool)
    keep[guard_indices(profile, distance, guard_bins)] = False
    keep[0] = False
    return keep


def compute_sir(profile: RangeProfile, true_distance: float, guard_bins: int = 3, *,
                interference: bool = True):
    """Object peak power minus the strongest other bin, in dB.

    The guard window around the object bin and the DC bin are excluded from
    the interference search. Returns :data:`UNDEFINED` when the caller says
    there is no interference (no adversary and no noise).
    """
    if guard_bins < 1:
        raise ValueError("guard_bins must be >= 1")
    if not interference:
        return UNDEFINED
    peak, _ = find_peak(profile, true_distance, guard_bins)
    other = profile.magnitudes_db[_outside_guard(profile, true_distance, guard_bins)]
    return peak - float(other.max())


def compute_sinr(profile: RangeProfile, true_distance: float, guard_bins: int = 3) -> float:
    """Object peak power minus the mean power of all non-guard, non-DC bins (dB)."""
    peak, _ = find_peak(profile, true_distance, guard_bins)
    db = profile.magnitudes_db[_outside_guard(profile, true_distance, guard_bins)]
    floor = 10.0 * math.log10(float(np.mean(10.0 ** (db / 10.0))))
    return peak - floor


def compute_sinr_loss(profile_under_test: RangeProfile, baseline_profile: RangeProfile,
                      true_distance: float, guard_bins: int = 3) -> float:
    """SINR of the adversary-free baseline minus SINR of the profile under test."""
    a, b = profile_under_test, baseline_profile
    if (a.n_fft, a.n_samples, a.f_s, a.slope, a.window) != (b.n_fft, b.n_samples, b.f_s, b.slope, b.window):
        raise ValueError("test and baseline profiles come from different plans or processing")
    return compute_sinr(b, true_distance, guard_bins) - compute_sinr(a, true_distance, guard_bins)


def summarize(values) -> dict:
    """p10 / p50 / p90 (linear interpolation) and empirical CDF points."""
    x = np.sort(np.asarray([v for v in values], dtype=float))
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    p10, p50, p90 = np.percentile(x, [10, 50, 90])
    cdf = [[float(v), (i + 1) / x.size] for i, v in enumerate(x)]
    return {"n": int(x.size), "p10": float(p10), "p50": float(p50), "p90": float(p90), "cdf": cdf}


@dataclass(frozen=True)
class MetricsResult:
    scenario: str
    seed: int
    run: int
    n_adversaries: int
    sir_db: float | None
    sinr_db: float | None
    sinr_loss_db: float | None

    FIELDS = ("scenario", "seed", "run", "n_adversaries", "sir_db", "sinr_db", "sinr_loss_db")

    def as_row(self) -> list[str]:
        def fmt(v):
            return "undefined" if v is None else repr(float(v))

        return [self.scenario, str(self.seed), str(self.run), str(self.n_adversaries),
                fmt(self.sir_db), fmt(self.sinr_db), fmt(self.sinr_loss_db)]
