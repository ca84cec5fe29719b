"""Demo: displacement profiles of a trapped and a shear-leaky mode.

At 3.53 MHz the slowest-attenuating trapped mode decays into the aluminium on
both sides.  At 1.03 MHz the shear-leaky mode radiates a shear wave whose
amplitude grows with distance from the bond line: the mode attenuates along
the joint, so energy radiated earlier (further upstream) is larger.

Run:
  python3 demos/mode_shapes.py
"""

import math

import numpy as np

from leakyscm import adhesive_joint, mode_shape, sweep


def pick(modes, label):
    return min((m for m in modes if m.case.label == label), key=lambda m: m.attenuation)


def main():
    system = adhesive_joint()
    shapes = {}
    for f, label in ((3.53, "evanescent"), (1.03, "shear_leaky")):
        mode = pick(sweep(system, [2 * math.pi * f]).modes, label)
        shape = mode_shape(mode, system, y_extent=4.0)
        shapes[label] = (f, mode, shape)
        y, ux, uy = shape.profile()
        amp = np.hypot(np.abs(ux), np.abs(uy))
        print(f"{label} mode at {f} MHz: c_ph = {mode.phase_velocity:.4f} km/s, "
              f"attenuation = {mode.attenuation:.4g} Np/mm")
        print(f"  |u| at y = {y[0]:.1f} mm: {amp[0]:.3g}, at y = 0: {amp[len(amp) // 2]:.3g}, "
              f"at y = {y[-1]:.1f} mm: {amp[-1]:.3g}")
        print(f"  continuity error at the interfaces: {shape.continuity_error():.1e}")

    try:
        import matplotlib.pyplot as plt
    except ModuleNotFoundError:
        print("matplotlib not installed; skipping plots.")
        return

    fig, axes = plt.subplots(1, 2, figsize=(9, 5), sharey=True)
    for ax, (label, (f, mode, shape)) in zip(axes, shapes.items()):
        y, ux, uy = shape.profile()
        ax.plot(np.abs(ux), y, label="|u_x|")
        ax.plot(np.abs(uy), y, label="|u_y|")
        ax.axhspan(-system.d, system.d, color="0.9")
        ax.set(title=f"{label}, {f} MHz", xlabel="amplitude")
    axes[0].set_ylabel("y (mm)")
    axes[0].legend()
    fig.tight_layout()
    plt.show()


if __name__ == "__main__":
    main()
