"""Chirp plans and random sub-chirp hopping plans.

A conventional FMCW chirp of ``n_samples`` ADC samples is cut into ``n_sub``
equal sub-chirps. A hopping plan assigns sub-chirp ``perm[j]`` to time
slot ``j``; the identity plan is the conventional chirp.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConfigError

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def _exact(value) -> Fraction:
    """Exact rational for an int/Fraction, or the shortest decimal of a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class ChirpPlan:
    """Full chirp parameterization.

    Attributes:
        f_c: start frequency of the full chirp (Hz)
        slope: chirp slope (Hz/s)
        f_s: ADC sampling rate (Hz)
        n_samples: ADC samples per chirp
        n_sub: number of sub-chirps
    """

    f_c: float
    slope: float
    f_s: float
    n_samples: int
    n_sub: int

    @property
    def duration(self) -> float:
        return self.n_samples / self.f_s

    @property
    def subchirp_duration(self) -> float:
        return self.samples_per_slot / self.f_s

    @property
    def bandwidth(self) -> float:
        return self.slope * self.duration

    @property
    def subchirp_bandwidth(self) -> float:
        return self.slope * self.subchirp_duration

    @property
    def samples_per_slot(self) -> int:
        return self.n_samples // self.n_sub

    @property
    def resolution(self) -> float:
        """Range resolution c / 2B of the full band (m)."""
        return SPEED_OF_LIGHT / (2.0 * self.bandwidth)

    @property
    def subchirp_resolution(self) -> float:
        """Range resolution of a single sub-chirp, N times coarser (m)."""
        return SPEED_OF_LIGHT / (2.0 * self.subchirp_bandwidth)

    @property
    def max_range(self) -> float:
        """Largest distance whose beat frequency stays below f_s / 2 (m)."""
        return SPEED_OF_LIGHT * self.f_s / (4.0 * self.slope)

    def exact_subchirp_bandwidth(self) -> Fraction:
        """B_sub as an exact rational, for diversity analysis."""
        return _exact(self.slope) * Fraction(self.n_samples, self.n_sub) / _exact(self.f_s)

    def exact_sampling_rate(self) -> Fraction:
        return _exact(self.f_s)

    def with_slope(self, slope: float) -> "ChirpPlan":
        return make_chirp_plan(self.f_c, slope, self.f_s, self.n_samples, self.n_sub)

    def to_dict(self) -> dict:
        return {
            "f_c": self.f_c,
            "slope": self.slope,
            "f_s": self.f_s,
            "n_samples": self.n_samples,
            "n_sub": self.n_sub,
        }


def make_chirp_plan(f_c, slope, f_s, n_samples, n_sub) -> ChirpPlan:
    """Validate parameters and build a :class:`ChirpPlan`.

    Raises:
        ConfigError: on non-positive values or when ``n_samples`` is not a
            multiple of ``n_sub``.
    """
    for name, value in (("f_c", f_c), ("slope", slope), ("f_s", f_s)):
        if not np.isfinite(value) or value <= 0:
            raise ConfigError(f"must be positive and finite, got {value!r}", key=name)
    for name, value in (("n_samples", n_samples), ("n_sub", n_sub)):
        if int(value) != value or value < 1:
            raise ConfigError(f"must be a positive integer, got {value!r}", key=name)
    n_samples, n_sub = int(n_samples), int(n_sub)
    if n_sub > n_samples:
        raise ConfigError(f"n_sub={n_sub} exceeds n_samples={n_samples}", key="n_sub")
    if n_samples % n_sub:
        raise ConfigError(
            f"n_samples={n_samples} is not divisible by n_sub={n_sub}", key="n_sub"
        )
    return ChirpPlan(float(f_c), float(slope), float(f_s), n_samples, n_sub)


@dataclass(frozen=True, eq=False)
class HoppingPlan:
    """Sub-chirp permutation.

    ``perm[j]`` is the (0-based) sub-chirp transmitted in time slot ``j``;
    ``inv`` is its inverse, so ``inv[perm[j]] == j``. ``seed`` is ``None``
    for plans that were not drawn at random.
    """

    perm: np.ndarray
    inv: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.perm.setflags(write=False)
        self.inv.setflags(write=False)

    @property
    def n_sub(self) -> int:
        return len(self.perm)

    @property
    def is_identity(self) -> bool:
        return bool(np.all(self.perm == np.arange(self.n_sub)))

    def offsets(self) -> np.ndarray:
        """Per-slot sub-chirp index shift ``perm[j] - j``."""
        return self.perm - np.arange(self.n_sub)

    def __eq__(self, other):
        if not isinstance(other, HoppingPlan):
            return NotImplemented
        return np.array_equal(self.perm, other.perm)

    def __hash__(self):
        return hash(self.perm.tobytes())


def hopping_from_sequence(seq: Sequence[int], *, one_based: bool = False, seed=None) -> HoppingPlan:
    """Build a plan from an explicit slot -> sub-chirp sequence.

    With ``one_based=True`` the sequence is the second row of the usual
    two-line permutation notation, e.g. ``[3, 2, 1, 4]``.
    """
    perm = np.asarray(seq, dtype=np.int64) - (1 if one_based else 0)
    n = len(perm)
    if n < 1 or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {list(seq)}")
    inv = np.empty_like(perm)
    inv[perm] = np.arange(n)
    return HoppingPlan(perm, inv, seed)


def identity_hopping(n_sub: int) -> HoppingPlan:
    return hopping_from_sequence(range(n_sub))


def random_hopping_plan(n_sub: int, seed: int) -> HoppingPlan:
    """Uniform random permutation of ``n_sub`` sub-chirps.

    Uses numpy's PCG64 generator seeded with ``seed`` and a Fisher-Yates
    shuffle, so a given seed always yields the same plan.
    """
    if n_sub < 1:
        raise ValueError(f"n_sub must be >= 1, got {n_sub}")
    perm = np.random.default_rng(seed).permutation(n_sub)
    return hopping_from_sequence(perm, seed=int(seed))


def subchirp_start_freqs(plan: ChirpPlan, hopping: HoppingPlan) -> np.ndarray:
    """Start frequency of the sub-chirp sent in each time slot (Hz)."""
    if hopping.n_sub != plan.n_sub:
        raise ConfigError(
            f"hopping plan has {hopping.n_sub} slots but chirp plan has {plan.n_sub}",
            key="n_sub",
        )
    return plan.f_c + hopping.perm * plan.subchirp_bandwidth


OPTIMAL_SLOPE = 24.785e12
NONOPTIMAL_SLOPE = 26.5625e12


def reference_plan(slope: float = OPTIMAL_SLOPE, n_sub: int = 32) -> ChirpPlan:
    """24 GHz, 20 MHz sampling, 4096 samples per chirp, 32 sub-chirps."""
    return make_chirp_plan(24e9, slope, 20e6, 4096, n_sub)
