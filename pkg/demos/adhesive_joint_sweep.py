"""Demo: dispersion and attenuation curves of an epoxy bond line in aluminium.

A 1 mm epoxy layer sits between two aluminium half-spaces.  The phase
velocity axis splits at the aluminium bulk speeds into three radiation cases:
trapped modes below 3.12 km/s, shear-leaky modes up to 6.33 km/s and fully
leaky modes above.  Each case is its own eigenvalue problem.

The full 150-step sweep takes several minutes on one core; pass a smaller
step count to try it quickly.

Run:
  python3 demos/adhesive_joint_sweep.py          # 150 steps
  python3 demos/adhesive_joint_sweep.py 30       # 30 steps
"""

import math
import sys
import time

import numpy as np

from leakyscm import PipelineOptions, adhesive_joint, sweep
from leakyscm.modes import connect_curves, omega_grid


def main(steps=150):
    system = adhesive_joint()
    f_max = 30 / (2 * math.pi)
    omegas = omega_grid(f_max / steps, f_max, steps)

    t0 = time.perf_counter()
    ds = sweep(system, omegas, PipelineOptions(keep_vectors=False))
    print(f"{len(ds)} modes in {time.perf_counter() - t0:.0f} s")
    for case in ds.cases:
        lo, hi = case.phase_velocity_interval
        print(f"  case {case.index} ({case.label}, {lo:g} to {hi:g} km/s): {len(ds.in_case(case.index))} modes")

    curves = connect_curves(ds.modes)
    print(f"{len(curves)} connected curves")

    try:
        import matplotlib.pyplot as plt
    except ModuleNotFoundError:
        print("matplotlib not installed; skipping plots.")
        return

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    colours = {0: "k", 1: "tab:blue", 2: "tab:red"}
    for case in ds.cases:
        ms = ds.in_case(case.index)
        f = np.array([m.frequency for m in ms])
        ax1.plot(f, [m.phase_velocity for m in ms], ".", ms=3, color=colours[case.index], label=case.label)
        shown = [m for m in ms if m.attenuation < 10]
        ax2.plot([m.frequency for m in shown], [m.attenuation for m in shown], ".", ms=3, color=colours[case.index])
    ax1.set(xlabel="frequency (MHz)", ylabel="phase velocity (km/s)", ylim=(0, 12))
    ax2.set(xlabel="frequency (MHz)", ylabel="attenuation (Np/mm)")
    ax1.legend()
    fig.tight_layout()
    plt.show()


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 150)
