"""Radiation cases and assembly of the quadratic eigenvalue problem.

Unknowns are stacked as (phi_a, psi_a, u_x, u_y, phi_b, psi_b), each a block
of N collocation values.  Half-space potentials follow the convention in
which the displacements are

    u_x = i k_x phi - dpsi/dy,    u_y = dphi/dy + i k_x psi,

which is the convention the continuity conditions below are written in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional

import numpy as np

from .materials import TriLayerSystem
from .spectral import MappedGrid, map_guide, map_half_space, reference_grid

EVANESCENT = "evanescent"
LEAKY = "leaky"

PHI_A, PSI_A, UX, UY, PHI_B, PSI_B = range(6)
BLOCK_NAMES = ("phi_a", "psi_a", "u_x", "u_y", "phi_b", "psi_b")

# (zeta_phi, zeta_psi) per half-space radiation status, in mm
DEFAULT_ZETA: dict[str, tuple[complex, complex]] = {
    "evanescent": (10.0, 10.0),
    "shear_leaky": (10.0, 10.0j),
    "fully_leaky": (10.0j, 10.0j),
}


class AssemblyError(ValueError):
    pass


def side_status(long_kind: str, shear_kind: str) -> str:
    if long_kind == LEAKY:
        return "fully_leaky"
    if shear_kind == LEAKY:
        return "shear_leaky"
    return "evanescent"


@dataclass(frozen=True)
class RadiationCase:
    """One phase-velocity interval with fixed partial-wave behaviour."""

    index: int
    side_a_long: str
    side_a_shear: str
    side_b_long: str
    side_b_shear: str
    phase_velocity_interval: tuple[float, float]
    zeta_phi_a: complex
    zeta_psi_a: complex
    zeta_phi_b: complex
    zeta_psi_b: complex

    def __post_init__(self):
        for lk, sk in ((self.side_a_long, self.side_a_shear), (self.side_b_long, self.side_b_shear)):
            if lk == LEAKY and sk != LEAKY:
                raise AssemblyError("a leaky longitudinal wave implies a leaky shear wave")
        lo, hi = self.phase_velocity_interval
        if not 0 <= lo < hi:
            raise AssemblyError(f"bad phase velocity interval {self.phase_velocity_interval}")

    @property
    def status_a(self) -> str:
        return side_status(self.side_a_long, self.side_a_shear)

    @property
    def status_b(self) -> str:
        return side_status(self.side_b_long, self.side_b_shear)

    @property
    def label(self) -> str:
        if self.status_a == self.status_b:
            return self.status_a
        return f"a:{self.status_a}/b:{self.status_b}"

    @property
    def is_radiating(self) -> bool:
        return LEAKY in (self.side_a_long, self.side_a_shear, self.side_b_long, self.side_b_shear)

    def kinds(self) -> dict[str, str]:
        """Partial-wave kind keyed by block name."""
        return {
            "phi_a": self.side_a_long,
            "psi_a": self.side_a_shear,
            "phi_b": self.side_b_long,
            "psi_b": self.side_b_shear,
        }

    def zetas(self) -> dict[str, complex]:
        return {
            "phi_a": self.zeta_phi_a,
            "psi_a": self.zeta_psi_a,
            "phi_b": self.zeta_phi_b,
            "psi_b": self.zeta_psi_b,
        }

    def contains(self, c_ph: float, edge_tol: float = 1e-6) -> bool:
        lo, hi = self.phase_velocity_interval
        return lo * (1 - edge_tol) <= c_ph <= hi * (1 + edge_tol)

    def to_dict(self) -> dict:
        lo, hi = self.phase_velocity_interval
        z = self.zetas()
        return {
            "index": self.index,
            "label": self.label,
            "kinds": self.kinds(),
            "phase_velocity_interval": [lo, None if math.isinf(hi) else hi],
            "zeta": {k: [v.real, v.imag] for k, v in z.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RadiationCase":
        k = data["kinds"]
        z = {name: complex(*v) for name, v in data["zeta"].items()}
        lo, hi = data["phase_velocity_interval"]
        return cls(
            data["index"], k["phi_a"], k["psi_a"], k["phi_b"], k["psi_b"],
            (lo, math.inf if hi is None else hi),
            z["phi_a"], z["psi_a"], z["phi_b"], z["psi_b"],
        )


def enumerate_cases(
    system: TriLayerSystem, zeta: Optional[Mapping[str, tuple[complex, complex]]] = None
) -> list[RadiationCase]:
    """Split the phase-velocity axis at the half-space bulk speeds."""
    zeta = dict(DEFAULT_ZETA, **(zeta or {}))
    a, b = system.side_a, system.side_b
    edges = sorted({a.c_t, a.c_l, b.c_t, b.c_l})
    bounds = [0.0, *edges, math.inf]
    cases = []
    for i, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
        kinds = [LEAKY if lo >= c else EVANESCENT for c in (a.c_l, a.c_t, b.c_l, b.c_t)]
        za = zeta[side_status(kinds[0], kinds[1])]
        zb = zeta[side_status(kinds[2], kinds[3])]
        cases.append(RadiationCase(i, *kinds, (lo, hi), complex(za[0]), complex(za[1]), complex(zb[0]), complex(zb[1])))
    return cases


@dataclass
class PEPMatrices:
    """Coefficients of (k_x**2 L2 + k_x L1 + L0) u = 0."""

    l0: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    n: int
    grids: dict[str, MappedGrid]
    replaced_rows: list[tuple[int, str]]
    omega: float = 0.0
    case: Optional[RadiationCase] = None
    row_scale: Optional[np.ndarray] = None
    block_layout: tuple[str, ...] = field(default=BLOCK_NAMES)

    @property
    def size(self) -> int:
        return self.l0.shape[0]

    def block(self, b: int) -> slice:
        return slice(b * self.n, (b + 1) * self.n)

    def evaluate(self, k) -> np.ndarray:
        return k * k * self.l2 + k * self.l1 + self.l0

    def derivative(self, k) -> np.ndarray:
        return 2 * k * self.l2 + self.l1

    def split(self, u: np.ndarray) -> dict[str, np.ndarray]:
        return {name: u[self.block(i)] for i, name in enumerate(self.block_layout)}


@lru_cache(maxsize=16)
def _cached_reference(n: int):
    return reference_grid(n)


def build_grids(system: TriLayerSystem, case: RadiationCase, n: int) -> dict[str, MappedGrid]:
    ref = _cached_reference(n)
    d = system.d
    z = case.zetas()
    return {
        "guide": map_guide(ref, d),
        "phi_a": map_half_space(ref, "side_a", d, z["phi_a"]),
        "psi_a": map_half_space(ref, "side_a", d, z["psi_a"]),
        "phi_b": map_half_space(ref, "side_b", d, z["phi_b"]),
        "psi_b": map_half_space(ref, "side_b", d, z["psi_b"]),
    }


def assemble_pep(
    system: TriLayerSystem,
    omega: float,
    case: RadiationCase,
    n: int,
    equilibrate: bool = True,
    grids: Optional[dict[str, MappedGrid]] = None,
) -> PEPMatrices:
    if omega <= 0:
        raise AssemblyError("omega must be positive")
    if n < 3:
        raise AssemblyError("n must be at least 3")
    if grids is None:
        grids = build_grids(system, case, n)
    if any(g.n_points != n for g in grids.values()):
        raise AssemblyError("inconsistent grid sizes")

    size = 6 * n
    l0 = np.zeros((size, size), dtype=complex)
    l1 = np.zeros_like(l0)
    l2 = np.zeros_like(l0)
    eye = np.eye(n)
    w2 = omega**2

    def blk(b):
        return slice(b * n, (b + 1) * n)

    g = system.guide
    gd = grids["guide"]
    lam, mu, rho = g.lam, g.mu, g.rho

    # guide, x and y momentum balance
    l0[blk(UX), blk(UX)] = rho * w2 * eye + mu * gd.d2
    l1[blk(UX), blk(UY)] = 1j * (lam + mu) * gd.d1
    l2[blk(UX), blk(UX)] = -(lam + 2 * mu) * eye
    l0[blk(UY), blk(UY)] = rho * w2 * eye + (lam + 2 * mu) * gd.d2
    l1[blk(UY), blk(UX)] = 1j * (lam + mu) * gd.d1
    l2[blk(UY), blk(UY)] = -mu * eye

    # half-space Helmholtz equations for the potentials
    for side, bphi, bpsi in (("a", PHI_A, PSI_A), ("b", PHI_B, PSI_B)):
        m = system.side(side)
        cl2 = m.lam + 2 * m.mu
        l0[blk(bphi), blk(bphi)] = m.rho * w2 * eye + cl2 * grids[f"phi_{side}"].d2
        l2[blk(bphi), blk(bphi)] = -cl2 * eye
        l0[blk(bpsi), blk(bpsi)] = m.rho * w2 * eye + m.mu * grids[f"psi_{side}"].d2
        l2[blk(bpsi), blk(bpsi)] = -m.mu * eye

    replaced: list[tuple[int, str]] = []
    for side, bphi, bpsi, gi in (("a", PHI_A, PSI_A, 0), ("b", PHI_B, PSI_B, n - 1)):
        m = system.side(side)
        lj, mj = m.lam, m.mu
        gphi, gpsi = grids[f"phi_{side}"], grids[f"psi_{side}"]
        hp, hs = gphi.interface_index, gpsi.interface_index
        cols = {b: blk(b) for b in range(6)}
        rows = {
            "normal_stress": bphi * n + hp,
            "shear_stress": bpsi * n + hs,
            "u_x": UX * n + gi,
            "u_y": UY * n + gi,
        }
        for r in rows.values():
            l0[r, :] = 0
            l1[r, :] = 0
            l2[r, :] = 0

        # continuity of normal stress
        r = rows["normal_stress"]
        l0[r, cols[UY]] += (lam + 2 * mu) * gd.d1[gi]
        l1[r, UX * n + gi] += 1j * lam
        l2[r, bphi * n + hp] += lj
        l0[r, cols[bphi]] += -(lj + 2 * mj) * gphi.d2[hp]
        l1[r, cols[bpsi]] += -2j * mj * gpsi.d1[hs]

        # continuity of shear stress
        r = rows["shear_stress"]
        l1[r, UY * n + gi] += 1j * mu
        l0[r, cols[UX]] += mu * gd.d1[gi]
        l1[r, cols[bphi]] += -2j * mj * gphi.d1[hp]
        l2[r, bpsi * n + hs] += mj
        l0[r, cols[bpsi]] += mj * gpsi.d2[hs]

        # continuity of u_x
        r = rows["u_x"]
        l0[r, UX * n + gi] += 1.0
        l1[r, bphi * n + hp] += -1j
        l0[r, cols[bpsi]] += gpsi.d1[hs]

        # continuity of u_y
        r = rows["u_y"]
        l0[r, UY * n + gi] += 1.0
        l0[r, cols[bphi]] += -gphi.d1[hp]
        l1[r, bpsi * n + hs] += -1j

        replaced += [(rows[key], f"{key}@{side}") for key in ("normal_stress", "shear_stress", "u_x", "u_y")]

    scale = None
    if equilibrate:
        rowmax = np.max(np.abs(np.hstack([l0, l1, l2])), axis=1)
        rowmax[rowmax == 0] = 1.0
        scale = 1.0 / rowmax
        l0 *= scale[:, None]
        l1 *= scale[:, None]
        l2 *= scale[:, None]

    return PEPMatrices(l0, l1, l2, n, grids, replaced, omega, case, scale)
