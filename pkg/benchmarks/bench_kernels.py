"""Compare the compiled and numpy synthesis kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20] [--sizes 4096,65536]

Times the raw mixer kernel on random inputs and a full 10-adversary beat
synthesis with each backend. The backend of ``simulate_beat`` is swapped
by patching ``bluefmcw.kernels.accumulate_mixer``.
"""

import argparse
import timeit

import numpy as np

import bluefmcw.dsp as dsp
import bluefmcw.kernels as kernels
from bluefmcw.scene import AdversaryKind, ScenarioParams, sample_scene
from bluefmcw.waveform import random_hopping_plan, reference_plan


def bench_kernel(fn, n, repeat):
    rng = np.random.default_rng(0)
    delay = rng.uniform(-2e-4, 2e-4, n)
    mid = rng.uniform(0, 2e-4, n)
    out = np.zeros(n, complex)
    t = timeit.repeat(lambda: fn(out, delay, mid, 0.7, 24e9, 24.785e12), number=10, repeat=repeat)
    return min(t) / 10


def bench_synthesis(fn, repeat):
    plan = reference_plan()
    params = ScenarioParams(n_adversaries=10, adversary_kind=AdversaryKind.BLUE, noise_snr_db=30.0)
    scene = sample_scene(params, np.random.default_rng(1), plan)
    hop = random_hopping_plan(plan.n_sub, 2)
    saved = kernels.accumulate_mixer
    kernels.accumulate_mixer = fn
    try:
        t = timeit.repeat(lambda: dsp.simulate_beat(plan, hop, scene, np.random.default_rng(3)), number=5,
                          repeat=repeat)
    finally:
        kernels.accumulate_mixer = saved
    return min(t) / 5


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--sizes", default="4096,65536,1048576")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the numpy backend is available")
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'case':<28}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    rows = [(f"kernel n={n}", {k: bench_kernel(f, n, args.repeat) for k, f in backends.items()}) for n in sizes]
    rows.append(("simulate_beat, 10 adversaries", {k: bench_synthesis(f, args.repeat) for k, f in backends.items()}))
    for label, times in rows:
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<28}" + "".join(f"{times[k] * 1e3:>11.3f} ms" for k in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
