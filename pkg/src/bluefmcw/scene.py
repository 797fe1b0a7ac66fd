"""Reflectors, adversary emitters and random scenario sampling."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .waveform import SPEED_OF_LIGHT, ChirpPlan, HoppingPlan, hopping_from_sequence, random_hopping_plan


def tof(distance: float) -> float:
    """Round-trip time of flight ``2 d / c`` in seconds."""
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance}")
    return 2.0 * distance / SPEED_OF_LIGHT


class AdversaryKind(str, enum.Enum):
    CONVENTIONAL = "conventional"
    BLUE = "blue"


@dataclass(frozen=True)
class Reflector:
    distance: float
    attenuation: float = 1.0

    def __post_init__(self):
        if self.distance < 0:
            raise ValueError(f"reflector distance must be >= 0, got {self.distance}")
        if self.attenuation <= 0:
            raise ValueError(f"attenuation must be > 0, got {self.attenuation}")

    @property
    def delay(self) -> float:
        return tof(self.distance)


@dataclass(frozen=True)
class Adversary:
    """An interferer or spoofer sharing the victim's chirp parameters.

    The received copy arrives ``2 * ghost_distance / c`` after the victim's
    chirp start, so a conventional adversary shows up as a ghost at
    ``ghost_distance``. ``power_sir_db`` is the input SIR relative to the
    strongest true echo. ``own_plan=None`` means the victim's plan.
    ``start_offset`` shifts the adversary's frame start (s).
    """

    kind: AdversaryKind
    ghost_distance: float
    power_sir_db: float
    own_plan: ChirpPlan | None = None
    own_hopping: HoppingPlan | None = None
    start_offset: float = 0.0

    def __post_init__(self):
        if self.ghost_distance < 0:
            raise ValueError(f"ghost_distance must be >= 0, got {self.ghost_distance}")
        if self.kind is AdversaryKind.BLUE and self.own_hopping is None:
            raise ValueError("a hopping adversary needs its own hopping plan")

    @property
    def delay(self) -> float:
        return tof(self.ghost_distance)

    def amplitude(self, reference: float) -> float:
        return reference * 10.0 ** (-self.power_sir_db / 20.0)


@dataclass(frozen=True)
class Scene:
    reflectors: tuple[Reflector, ...] = ()
    adversaries: tuple[Adversary, ...] = ()
    noise_snr_db: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "reflectors", tuple(self.reflectors))
        object.__setattr__(self, "adversaries", tuple(self.adversaries))

    @property
    def reference_amplitude(self) -> float:
        """Amplitude of the strongest true echo (1.0 when there is none)."""
        if not self.reflectors:
            return 1.0
        return max(r.attenuation for r in self.reflectors)

    def without_adversaries(self) -> "Scene":
        return Scene(self.reflectors, (), self.noise_snr_db)

    def to_dict(self) -> dict:
        advs = []
        for a in self.adversaries:
            advs.append(
                {
                    "kind": a.kind.value,
                    "ghost_distance": a.ghost_distance,
                    "power_sir_db": a.power_sir_db,
                    "own_plan": a.own_plan.to_dict() if a.own_plan else None,
                    "own_hopping": a.own_hopping.perm.tolist() if a.own_hopping else None,
                    "own_hopping_seed": a.own_hopping.seed if a.own_hopping else None,
                    "start_offset": a.start_offset,
                }
            )
        return {
            "reflectors": [{"distance": r.distance, "attenuation": r.attenuation} for r in self.reflectors],
            "adversaries": advs,
            "noise_snr_db": self.noise_snr_db,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scene":
        from .waveform import make_chirp_plan

        refl = [Reflector(float(r["distance"]), float(r.get("attenuation", 1.0))) for r in d.get("reflectors", [])]
        advs = []
        for a in d.get("adversaries", []):
            plan = make_chirp_plan(**a["own_plan"]) if a.get("own_plan") else None
            hop = None
            if a.get("own_hopping") is not None:
                hop = hopping_from_sequence(a["own_hopping"], seed=a.get("own_hopping_seed"))
            advs.append(
                Adversary(
                    AdversaryKind(a["kind"]),
                    float(a["ghost_distance"]),
                    float(a["power_sir_db"]),
                    plan,
                    hop,
                    float(a.get("start_offset", 0.0)),
                )
            )
        return cls(tuple(refl), tuple(advs), d.get("noise_snr_db"))


@dataclass(frozen=True)
class ScenarioParams:
    """Random scenario distribution; defaults follow the reference setup."""

    n_adversaries: int = 1
    distance_range: tuple[float, float] = (0.5, 200.0)
    sir_range_db: tuple[float, float] = (2.5, 6.0)
    object_distance: float = 25.0
    adversary_kind: AdversaryKind = AdversaryKind.CONVENTIONAL
    extra_reflectors: tuple[Reflector, ...] = field(default=())
    noise_snr_db: float | None = None

    def __post_init__(self):
        if self.n_adversaries < 0:
            raise ValueError("n_adversaries must be >= 0")
        for name in ("distance_range", "sir_range_db"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: min {lo} exceeds max {hi}")
        if self.distance_range[0] < 0:
            raise ValueError("distance_range must be nonnegative")
        object.__setattr__(self, "adversary_kind", AdversaryKind(self.adversary_kind))


def sample_scene(params: ScenarioParams, rng: np.random.Generator, plan: ChirpPlan | None = None) -> Scene:
    """Draw one scenario: the object at ``object_distance`` plus random adversaries.

    Each adversary gets a uniform ghost distance and input SIR. Hopping
    adversaries draw their own permutation seed from ``rng``, which needs
    ``plan`` to know the sub-chirp count.
    """
    reflectors = (Reflector(params.object_distance, 1.0),) + tuple(params.extra_reflectors)
    blue = params.adversary_kind is AdversaryKind.BLUE
    if blue and params.n_adversaries and plan is None:
        raise ValueError("sampling hopping adversaries requires the chirp plan")
    advs = []
    for _ in range(params.n_adversaries):
        d = float(rng.uniform(*params.distance_range))
        sir = float(rng.uniform(*params.sir_range_db))
        hop = None
        if blue:
            hop = random_hopping_plan(plan.n_sub, int(rng.integers(2**63)))
        advs.append(Adversary(params.adversary_kind, d, sir, None, hop))
    return Scene(reflectors, tuple(advs), params.noise_snr_db)
