"""Isotropic elastic media and the plate/half-space geometry.

Units are fixed throughout the package: mm, µs, mg.  Density is therefore in
g/cm³ (mg/mm³), wavespeeds in mm/µs (km/s), moduli in GPa, angular frequency
in rad/µs and wavenumbers in rad/mm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


class InvalidMaterialError(ValueError):
    """Raised for non-physical material parameters."""


def lame_from_speeds(rho: float, c_l: float, c_t: float) -> tuple[float, float]:
    """Return (lambda, mu) in GPa from density and bulk wavespeeds."""
    if rho <= 0 or c_l <= 0 or c_t <= 0:
        raise InvalidMaterialError(f"rho, c_l, c_t must be positive, got {rho}, {c_l}, {c_t}")
    if c_l <= c_t:
        raise InvalidMaterialError(f"c_l={c_l} must exceed c_t={c_t}")
    mu = rho * c_t**2
    lam = rho * c_l**2 - 2.0 * mu
    return lam, mu


def speeds_from_lame(rho: float, lam: float, mu: float) -> tuple[float, float]:
    """Inverse of :func:`lame_from_speeds`; returns (c_l, c_t)."""
    if rho <= 0 or mu <= 0:
        raise InvalidMaterialError("rho and mu must be positive")
    m = lam + 2.0 * mu
    if m <= mu:
        raise InvalidMaterialError("lambda + 2 mu must exceed mu")
    return math.sqrt(m / rho), math.sqrt(mu / rho)


@dataclass(frozen=True)
class Material:
    name: str
    rho: float
    c_l: float
    c_t: float
    strict_poisson: bool = field(default=False, compare=False, repr=False)
    lam: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        lam, mu = lame_from_speeds(self.rho, self.c_l, self.c_t)
        if self.strict_poisson and lam < 0:
            raise InvalidMaterialError(f"{self.name}: negative Poisson ratio (lambda={lam:.4g} GPa)")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    @property
    def poisson_ratio(self) -> float:
        return self.lam / (2.0 * (self.lam + self.mu))

    def with_density(self, rho: float) -> "Material":
        return replace(self, rho=rho)

    def to_dict(self) -> dict:
        return {"name": self.name, "rho": self.rho, "c_l": self.c_l, "c_t": self.c_t}


def bulk_wavenumbers(m: Material, omega: float) -> tuple[float, float]:
    """Longitudinal and transverse bulk wavenumbers (rad/mm) at ``omega``."""
    if omega < 0:
        raise ValueError("omega must be non-negative")
    return omega / m.c_l, omega / m.c_t


def transverse_wavenumber_sq(k_bulk, k_x):
    """k_bulk**2 - k_x**2; the square-root branch is chosen elsewhere."""
    return k_bulk**2 - k_x**2


@dataclass(frozen=True)
class TriLayerSystem:
    """A plate of thickness ``2 d`` bonded between two half-spaces.

    ``side_a`` fills y <= -d, ``guide`` fills |y| <= d and ``side_b`` fills
    y >= d.
    """

    side_a: Material
    guide: Material
    side_b: Material
    half_thickness_d: float

    def __post_init__(self):
        if not self.half_thickness_d > 0:
            raise InvalidMaterialError("half_thickness_d must be positive")

    @property
    def thickness(self) -> float:
        return 2.0 * self.half_thickness_d

    @property
    def d(self) -> float:
        return self.half_thickness_d

    def side(self, which: str) -> Material:
        if which == "a":
            return self.side_a
        if which == "b":
            return self.side_b
        raise ValueError(f"unknown side {which!r}")

    def swapped(self) -> "TriLayerSystem":
        return replace(self, side_a=self.side_b, side_b=self.side_a)

    @property
    def is_symmetric(self) -> bool:
        a, b = self.side_a, self.side_b
        return (a.rho, a.c_l, a.c_t) == (b.rho, b.c_l, b.c_t)

    def bulk_speeds(self) -> list[float]:
        return [c for m in (self.side_a, self.guide, self.side_b) for c in (m.c_l, m.c_t)]

    def to_dict(self) -> dict:
        return {
            "side_a": self.side_a.to_dict(),
            "guide": self.guide.to_dict(),
            "side_b": self.side_b.to_dict(),
            "half_thickness_mm": self.half_thickness_d,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TriLayerSystem":
        return cls(
            Material(**data["side_a"]),
            Material(**data["guide"]),
            Material(**data["side_b"]),
            float(data["half_thickness_mm"]),
        )


EPOXY = Material("epoxy", rho=1.17, c_l=2.61, c_t=1.1)
ALUMINIUM = Material("aluminium", rho=2.82, c_l=6.33, c_t=3.12)

PRESETS: dict[str, Material] = {"epoxy": EPOXY, "aluminium": ALUMINIUM}


def adhesive_joint(d: float = 0.5) -> TriLayerSystem:
    """Epoxy layer between two aluminium half-spaces."""
    return TriLayerSystem(ALUMINIUM, EPOXY, ALUMINIUM, d)
