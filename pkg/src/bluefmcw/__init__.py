"""Random frequency hopping FMCW radar: synthesis, phase alignment and evaluation."""

__version__ = "0.1.0"

from .analysis import (
    UNDEFINED,
    MetricsResult,
    adversary_beat_freqs,
    compute_sinr,
    compute_sinr_loss,
    compute_sir,
    design_report,
    diversity_bound,
    summarize,
)
from .dsp import (
    BeatSignal,
    RangeProfile,
    SegmentedBeat,
    beat_segment,
    find_peak,
    range_profile,
    reconstruct_aligned,
    reconstruct_naive,
    simulate_beat,
)
from .errors import ConfigError
from .kernels import BACKEND
from .scene import Adversary, AdversaryKind, Reflector, ScenarioParams, Scene, sample_scene, tof
from .waveform import (
    SPEED_OF_LIGHT,
    ChirpPlan,
    HoppingPlan,
    make_chirp_plan,
    random_hopping_plan,
    subchirp_start_freqs,
    reference_plan,
)
