"""Beat-signal synthesis, reconstruction and range profiles.

Beat signals are synthesized in the dechirped domain. Every transmitter is
described by the time ``u`` along the conventional (unpermuted) chirp whose
phase it is currently emitting; sub-chirp ``p`` in a slot at local time
``t`` has ``u = p*T_b + t``. For victim time ``u_v`` and received time
``u_r`` the mixer output phase (cycles) is::

    (u_v - u_r) * (f_c + slope * (u_v + u_r) / 2)

which for a reflection inside one slot reduces to
``f_k*tau + slope*tau*t - slope*tau**2/2``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, get_window

from . import kernels
from .scene import AdversaryKind, Scene
from .waveform import SPEED_OF_LIGHT, ChirpPlan, HoppingPlan, identity_hopping

DB_FLOOR = -300.0


class BeatKind(str, enum.Enum):
    CONVENTIONAL = "conventional"
    NAIVE = "naive"
    ALIGNED = "aligned"


@dataclass(frozen=True)
class SynthesisOptions:
    """Non-default synthesis behaviour.

    boundary: ``"ideal"`` uses the closed-form per-slot echo everywhere;
        ``"blank"`` zeroes each reflector's first ``ceil(tau*f_s)`` samples
        in every slot, where the echo still belongs to the previous slot.
    adversary_lpf: drop adversary samples whose beat frequency lies outside
        ``(-f_s/2, f_s/2)`` instead of letting them alias.
    """

    boundary: str = "ideal"
    adversary_lpf: bool = False

    def __post_init__(self):
        if self.boundary not in ("ideal", "blank"):
            raise ValueError(f"boundary must be 'ideal' or 'blank', got {self.boundary!r}")


DEFAULT_OPTIONS = SynthesisOptions()


@dataclass(frozen=True, eq=False)
class SegmentedBeat:
    """Per-slot beat samples, shape ``(n_sub, samples_per_slot)``, in time order."""

    segments: np.ndarray
    plan: ChirpPlan
    hopping: HoppingPlan

    def __post_init__(self):
        shape = (self.plan.n_sub, self.plan.samples_per_slot)
        if self.segments.shape != shape:
            raise ValueError(f"segments shape {self.segments.shape} != {shape}")
        self.segments.setflags(write=False)


@dataclass(frozen=True, eq=False)
class BeatSignal:
    samples: np.ndarray
    kind: BeatKind

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True, eq=False)
class RangeProfile:
    """FFT magnitude over all ``n_fft`` bins.

    ``bin_distances`` covers only bins below ``f_s/2``.
    """

    magnitudes_db: np.ndarray
    bin_freqs: np.ndarray
    bin_distances: np.ndarray
    n_fft: int
    n_samples: int
    f_s: float
    slope: float
    window: str

    def bin_of_distance(self, distance: float) -> int:
        f = 2.0 * self.slope * distance / SPEED_OF_LIGHT
        return int(round(f * self.n_fft / self.f_s)) % self.n_fft

    @property
    def max_range(self) -> float:
        return SPEED_OF_LIGHT * self.f_s / (4.0 * self.slope)


def _slot_times(plan: ChirpPlan, slots: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = np.arange(plan.samples_per_slot) / plan.f_s
    t_abs = slots[:, None] * plan.subchirp_duration + t
    return t, t_abs


def _emitted_time(plan: ChirpPlan, hopping: HoppingPlan, u: np.ndarray) -> np.ndarray:
    """Conventional-chirp time emitted at absolute time ``u`` (frames repeat)."""
    T_b = plan.subchirp_duration
    u = np.mod(u, plan.duration)
    slot = np.minimum((u / T_b).astype(np.int64), plan.n_sub - 1)
    return hopping.perm[slot] * T_b + (u - slot * T_b)


def _synthesize(plan, hopping, scene, slots, rng, options) -> np.ndarray:
    if hopping.n_sub != plan.n_sub:
        raise ValueError(f"hopping plan has {hopping.n_sub} slots, chirp plan {plan.n_sub}")
    L = plan.samples_per_slot
    T_b = plan.subchirp_duration
    t, t_abs = _slot_times(plan, slots)
    u_v = (hopping.perm[slots][:, None] * T_b + t).ravel()
    t_abs = t_abs.ravel()
    out = np.zeros(u_v.size, dtype=np.complex128)
    ref = scene.reference_amplitude

    for r in scene.reflectors:
        tau = r.delay
        mask = None
        if options.boundary == "blank":
            m = np.ones((len(slots), L), dtype=np.uint8)
            m[:, : math.ceil(tau * plan.f_s)] = 0
            mask = m.ravel()
        kernels.accumulate_mixer(out, np.full(u_v.size, tau), u_v - 0.5 * tau, r.attenuation, plan.f_c, plan.slope, mask)

    for a in scene.adversaries:
        a_plan = a.own_plan or plan
        if a_plan.f_c != plan.f_c or a_plan.slope != plan.slope:
            raise ValueError("adversary must share the victim's start frequency and slope")
        if a.kind is AdversaryKind.BLUE:
            a_hop = a.own_hopping
        else:
            a_hop = identity_hopping(a_plan.n_sub)
        u_r = _emitted_time(a_plan, a_hop, t_abs - a.delay - a.start_offset)
        delay = u_v - u_r
        mask = None
        if options.adversary_lpf:
            mask = (np.abs(plan.slope * delay) < 0.5 * plan.f_s).astype(np.uint8)
        kernels.accumulate_mixer(out, delay, 0.5 * (u_v + u_r), a.amplitude(ref), plan.f_c, plan.slope, mask)

    out = out.reshape(len(slots), L)
    if scene.noise_snr_db is not None:
        if rng is None:
            raise ValueError("scene has noise; pass an RNG")
        sigma = ref * 10.0 ** (-scene.noise_snr_db / 20.0) / math.sqrt(2.0)
        for row in out:
            z = rng.standard_normal((2, L))
            row += sigma * (z[0] + 1j * z[1])
    return out


def beat_segment(plan, hopping, slot_j, scene, rng=None, options=DEFAULT_OPTIONS) -> np.ndarray:
    """Complex beat samples of time slot ``slot_j``."""
    if not 0 <= slot_j < plan.n_sub:
        raise ValueError(f"slot {slot_j} out of range 0..{plan.n_sub - 1}")
    return _synthesize(plan, hopping, scene, np.array([slot_j]), rng, options)[0]


def simulate_beat(plan, hopping, scene, rng=None, options=DEFAULT_OPTIONS) -> SegmentedBeat:
    """All slots of one chirp.

    Equal to calling :func:`beat_segment` for slots ``0..N-1`` in order
    with the same ``rng``.
    """
    segs = _synthesize(plan, hopping, scene, np.arange(plan.n_sub), rng, options)
    return SegmentedBeat(segs, plan, hopping)


def reconstruct_naive(seg: SegmentedBeat) -> BeatSignal:
    """Concatenate slot beats in transmission order."""
    return BeatSignal(seg.segments.ravel().copy(), BeatKind.NAIVE)


def reconstruct_aligned(seg: SegmentedBeat) -> BeatSignal:
    """Reorder slot beats by the inverse permutation so start frequencies ascend."""
    return BeatSignal(seg.segments[seg.hopping.inv].ravel(), BeatKind.ALIGNED)


def conventional_beat(seg: SegmentedBeat) -> BeatSignal:
    if not seg.hopping.is_identity:
        raise ValueError("conventional beat requires the identity hopping plan")
    return BeatSignal(seg.segments.ravel().copy(), BeatKind.CONVENTIONAL)


def range_profile(beat, plan: ChirpPlan, n_fft: int | None = None, window: str = "rectangular",
                  floor_db: float = DB_FLOOR) -> RangeProfile:
    """Windowed, zero-padded FFT magnitude in dB with a distance axis.

    ``beat`` may be a :class:`BeatSignal` or a raw sample array (e.g. a
    single slot for a sub-chirp profile).
    """
    x = np.asarray(beat.samples if isinstance(beat, BeatSignal) else beat)
    n = len(x)
    n_fft = n if n_fft is None else int(n_fft)
    if n_fft < n:
        raise ValueError(f"n_fft={n_fft} is shorter than the signal ({n} samples)")
    if window == "rectangular":
        w = np.ones(n)
    elif window == "hann":
        w = get_window("hann", n)
    else:
        raise ValueError(f"unknown window {window!r}")
    mag = np.abs(np.fft.fft(x * w, n_fft))
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    db = np.maximum(db, floor_db)
    freqs = np.arange(n_fft) * (plan.f_s / n_fft)
    dist = SPEED_OF_LIGHT * freqs[: (n_fft + 1) // 2] / (2.0 * plan.slope)
    return RangeProfile(db, freqs, dist, n_fft, n, plan.f_s, plan.slope, window)


def guard_indices(profile: RangeProfile, distance: float, guard_bins: int) -> np.ndarray:
    k0 = profile.bin_of_distance(distance)
    return (k0 + np.arange(-guard_bins, guard_bins + 1)) % profile.n_fft


def find_peak(profile: RangeProfile, expected_distance: float, guard_bins: int = 0) -> tuple[float, int]:
    """Strongest bin within ``guard_bins`` of the bin nearest ``expected_distance``."""
    if not 0 <= expected_distance <= profile.max_range:
        raise ValueError(
            f"distance {expected_distance} m outside unambiguous range [0, {profile.max_range:.3f}] m"
        )
    idx = guard_indices(profile, expected_distance, guard_bins)
    k = int(idx[np.argmax(profile.magnitudes_db[idx])])
    return float(profile.magnitudes_db[k]), k


def resolved_peaks(profile: RangeProfile, d_min: float, d_max: float, prominence_db: float = 3.0,
                   within_db: float = 6.0) -> np.ndarray:
    """Distances of distinct peaks in ``[d_min, d_max]``.

    A peak counts when it is a local maximum with at least ``prominence_db``
    of dip to its neighbours and lies within ``within_db`` of the strongest
    bin in the window.
    """
    d = profile.bin_distances
    sel = np.flatnonzero((d >= d_min) & (d <= d_max))
    mags = profile.magnitudes_db[sel]
    pk, _ = find_peaks(mags, prominence=prominence_db)
    pk = pk[mags[pk] >= mags.max() - within_db]
    return d[sel[pk]]


def write_beat_csv(path, beat: BeatSignal, plan: ChirpPlan) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "time_s", "real", "imag"])
        for i, z in enumerate(beat.samples):
            w.writerow([i, repr(i / plan.f_s), repr(float(z.real)), repr(float(z.imag))])


def write_profile_csv(path, profile: RangeProfile) -> None:
    half = len(profile.bin_distances)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin", "freq_hz", "distance_m", "magnitude_db"])
        for k in range(profile.n_fft):
            dist = repr(float(profile.bin_distances[k])) if k < half else ""
            w.writerow([k, repr(float(profile.bin_freqs[k])), dist, repr(float(profile.magnitudes_db[k]))])
