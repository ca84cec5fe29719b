"""Demo: an epoxy layer between near-vacuum half-spaces behaves as a free plate.

The outer layers keep aluminium wavespeeds but get a density of 1e-6 g/cm^3,
so the interfaces are effectively traction free.  The collocation modes are
compared with the roots of the Rayleigh-Lamb equations.

Run:
  python3 demos/free_plate_limit.py
"""

import math

import numpy as np

from leakyscm import ALUMINIUM, EPOXY, TriLayerSystem, rayleigh_lamb_roots, sweep


def main():
    thin = ALUMINIUM.with_density(1e-6)
    system = TriLayerSystem(thin, EPOXY, thin, half_thickness_d=0.5)

    for f in (0.05, 1.03, 3.53):
        omega = 2 * math.pi * f
        plate = sorted(
            rayleigh_lamb_roots(EPOXY, system.d, omega, "S") + rayleigh_lamb_roots(EPOXY, system.d, omega, "A")
        )
        modes = [m for m in sweep(system, [omega]).modes if m.attenuation < 1e-3]
        print(f"f = {f} MHz: {len(plate)} plate roots, {len(modes)} collocation modes")
        for m in sorted(modes, key=lambda m: m.k_x.real):
            nearest = min(plate, key=lambda r: abs(r - m.k_x.real))
            print(f"  k_x = {m.k_x.real:9.5f}   plate root {nearest:9.5f}   rel. diff {abs(nearest - m.k_x.real) / nearest:.1e}")

    # at low frequency S0 travels at the plate velocity 2 c_t sqrt(1 - c_t^2/c_l^2)
    c_plate = 2 * EPOXY.c_t * np.sqrt(1 - (EPOXY.c_t / EPOXY.c_l) ** 2)
    print(f"plate velocity of epoxy: {c_plate:.4f} km/s")


if __name__ == "__main__":
    main()
