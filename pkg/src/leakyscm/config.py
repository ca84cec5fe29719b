"""Run configuration: a JSON file with a materials section and a run section.

    {
      "materials": {"steel": {"rho": 7.85, "c_l": 5.96, "c_t": 3.26}},
      "run": {
        "system": {"side_a": "aluminium", "guide": "epoxy",
                   "side_b": "aluminium", "half_thickness_mm": 0.5},
        "frequency": {"min_mhz": 0.0318, "max_mhz": 4.7746, "steps": 150},
        "n_points": 50,
        "zeta": {"evanescent": [10, 10], "shear_leaky": [10, "10j"],
                 "fully_leaky": ["10j", "10j"]},
        "filters": {"max_attenuation_np_mm": 15, "interface_residual_tol": 1e-3,
                    "dedup_tol": 1e-6},
        "outputs": {"directory": "out", "plots": true},
        "parallelism": 1
      }
    }

Anything omitted takes the default shown.  Complex numbers may be given as
numbers, strings accepted by ``complex()`` or ``[re, im]`` pairs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .assembly import DEFAULT_ZETA
from .materials import PRESETS, InvalidMaterialError, Material, TriLayerSystem
from .modes import PipelineOptions, omega_grid

DEFAULT_MAX_MHZ = 30.0 / (2 * math.pi)
DEFAULT_STEPS = 150


class ConfigError(ValueError):
    pass


class MaterialLookupError(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown material"


def parse_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex pair must have two entries: {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", "").replace("i", "j"))
        except ValueError as exc:
            raise ConfigError(f"cannot parse complex value {value!r}") from exc
    if isinstance(value, (int, float)):
        return complex(value)
    raise ConfigError(f"cannot parse complex value {value!r}")


def _materials(section) -> dict[str, Material]:
    mats = dict(PRESETS)
    if section is None:
        return mats
    items = section.items() if isinstance(section, dict) else ((m.get("name"), m) for m in section)
    for name, entry in items:
        try:
            mats[name] = Material(name, float(entry["rho"]), float(entry["c_l"]), float(entry["c_t"]))
        except KeyError as exc:
            raise ConfigError(f"material {name!r} is missing {exc}") from exc
        except InvalidMaterialError as exc:
            raise ConfigError(f"material {name!r}: {exc}") from exc
    return mats


@dataclass
class SweepConfig:
    side_a: str = "aluminium"
    guide: str = "epoxy"
    side_b: str = "aluminium"
    half_thickness_mm: float = 0.5
    f_min_mhz: float = DEFAULT_MAX_MHZ / DEFAULT_STEPS
    f_max_mhz: float = DEFAULT_MAX_MHZ
    steps: int = DEFAULT_STEPS
    n_points: int = 50
    zeta: dict = field(default_factory=lambda: {k: tuple(complex(z) for z in v) for k, v in DEFAULT_ZETA.items()})
    max_attenuation_np_mm: float = 15.0
    interface_residual_tol: float = 1e-3
    dedup_tol: float = 1e-6
    bulk_tol: float = 1e-4
    edge_tol: float = 1e-6
    output_dir: Optional[str] = None
    plots: bool = True
    parallelism: int = 1
    materials: dict = field(default_factory=lambda: dict(PRESETS))

    def material(self, name: str) -> Material:
        try:
            return self.materials[name]
        except KeyError:
            raise MaterialLookupError(f"unknown material {name!r}; known: {sorted(self.materials)}") from None

    def system(self) -> TriLayerSystem:
        return TriLayerSystem(
            self.material(self.side_a), self.material(self.guide), self.material(self.side_b), self.half_thickness_mm
        )

    def options(self) -> PipelineOptions:
        return PipelineOptions(
            n_points=self.n_points,
            max_attenuation=self.max_attenuation_np_mm,
            residual_tol=self.interface_residual_tol,
            dedup_tol=self.dedup_tol,
            bulk_tol=self.bulk_tol,
            edge_tol=self.edge_tol,
            zeta=dict(self.zeta),
        )

    def omegas(self) -> np.ndarray:
        return omega_grid(self.f_min_mhz, self.f_max_mhz, self.steps)

    def to_dict(self) -> dict:
        return {
            "materials": {
                name: {"rho": m.rho, "c_l": m.c_l, "c_t": m.c_t} for name, m in sorted(self.materials.items())
            },
            "run": {
                "system": {
                    "side_a": self.side_a,
                    "guide": self.guide,
                    "side_b": self.side_b,
                    "half_thickness_mm": self.half_thickness_mm,
                },
                "frequency": {"min_mhz": self.f_min_mhz, "max_mhz": self.f_max_mhz, "steps": self.steps},
                "n_points": self.n_points,
                "zeta": {k: [[z.real, z.imag] for z in v] for k, v in sorted(self.zeta.items())},
                "filters": {
                    "max_attenuation_np_mm": self.max_attenuation_np_mm,
                    "interface_residual_tol": self.interface_residual_tol,
                    "dedup_tol": self.dedup_tol,
                    "bulk_tol": self.bulk_tol,
                    "edge_tol": self.edge_tol,
                },
                "outputs": {"directory": self.output_dir, "plots": self.plots},
                "parallelism": self.parallelism,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def parse_config(data: dict) -> SweepConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    cfg = SweepConfig(materials=_materials(data.get("materials")))
    run = data.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("'run' must be an object")

    system = run.get("system", {})
    for key in ("side_a", "guide", "side_b"):
        if key in system:
            setattr(cfg, key, str(system[key]))
    if "half_thickness_mm" in system:
        cfg.half_thickness_mm = float(system["half_thickness_mm"])
    if not cfg.half_thickness_mm > 0:
        raise ConfigError("half_thickness_mm must be positive")

    freq = run.get("frequency", {})
    if "max_mhz" in freq:
        cfg.f_max_mhz = float(freq["max_mhz"])
    if "steps" in freq:
        steps = freq["steps"]
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            raise ConfigError(f"frequency.steps must be a positive integer, got {steps!r}")
        cfg.steps = steps
    cfg.f_min_mhz = float(freq.get("min_mhz", cfg.f_max_mhz / cfg.steps))
    if not 0 < cfg.f_min_mhz <= cfg.f_max_mhz:
        raise ConfigError("need 0 < min_mhz <= max_mhz")
    if cfg.steps > 1 and cfg.f_min_mhz == cfg.f_max_mhz:
        raise ConfigError("min_mhz == max_mhz with more than one step")

    if "n_points" in run:
        n = run["n_points"]
        if not isinstance(n, int) or n < 8:
            raise ConfigError("n_points must be an integer >= 8")
        cfg.n_points = n

    for status, pair in run.get("zeta", {}).items():
        if status not in DEFAULT_ZETA:
            raise ConfigError(f"unknown radiation status {status!r} in zeta")
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(f"zeta.{status} must be a [zeta_phi, zeta_psi] pair")
        zs = tuple(parse_complex(z) for z in pair)
        if any(z == 0 or z.real < 0 for z in zs):
            raise ConfigError(f"zeta.{status}: values must be non-zero with non-negative real part")
        cfg.zeta[status] = zs

    filters = run.get("filters", {})
    for key in ("max_attenuation_np_mm", "interface_residual_tol", "dedup_tol", "bulk_tol", "edge_tol"):
        if key in filters:
            value = float(filters[key])
            if value <= 0:
                raise ConfigError(f"filters.{key} must be positive")
            setattr(cfg, key, value)

    outputs = run.get("outputs", {})
    cfg.output_dir = outputs.get("directory", cfg.output_dir)
    cfg.plots = bool(outputs.get("plots", cfg.plots))
    par = run.get("parallelism", 1)
    if not isinstance(par, int) or par < 1:
        raise ConfigError("parallelism must be a positive integer")
    cfg.parallelism = par
    return cfg


def load_config(path) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)
