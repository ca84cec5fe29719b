"""Demo: checking collocation modes against the partial-wave determinant.

The collocation solver never looks at the characteristic determinant of the
layered system.  Here every mode found at one frequency is used as a Newton
seed on that determinant; a genuine mode barely moves.

Run:
  python3 demos/oracle_check.py
"""

import math

from leakyscm import adhesive_joint, characteristic_determinant, refine_root, sweep


def main(f=2.5):
    system = adhesive_joint()
    omega = 2 * math.pi * f
    ds = sweep(system, [omega])
    print(f"f = {f} MHz, {len(ds)} modes")
    print(f"{'case':<12}{'Re k_x':>10}{'Im k_x':>10}{'|D|':>10}{'shift':>10}")
    for m in ds.modes:
        det = abs(characteristic_determinant(system, omega, m.k_x, m.case))
        root = refine_root(system, omega, m.k_x, m.case)
        shift = abs(root - m.k_x) / abs(root)
        print(f"{m.case.label:<12}{m.k_x.real:>10.5f}{m.k_x.imag:>10.5f}{det:>10.1e}{shift:>10.1e}")


if __name__ == "__main__":
    main()
