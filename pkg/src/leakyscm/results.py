"""Persistence of sweep results, plotting scripts and validation reports."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .assembly import RadiationCase
from .materials import TriLayerSystem
from .modes import DispersionDataset, ModeSolution, ModeShape
from .oracle import NoConvergenceError, characteristic_determinant, refine_root

CSV_COLUMNS = (
    "frequency_MHz",
    "omega_rad_per_us",
    "re_kx_rad_per_mm",
    "im_kx_np_per_mm",
    "phase_velocity_km_per_s",
    "case_id",
    "interface_residual",
    "backward_error",
)

ATTENUATION_DISPLAY_CAP = 10.0


def _num(x: float) -> str:
    return repr(float(x))


def dispersion_csv(dataset: DispersionDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for m in dataset.modes:
        w.writerow([
            _num(m.frequency),
            _num(m.omega),
            _num(m.k_x.real),
            _num(m.k_x.imag),
            _num(m.phase_velocity),
            m.case.index,
            f"{m.interface_residual:.6e}",
            f"{m.backward_error:.6e}",
        ])
    return buf.getvalue()


def mode_record(m: ModeSolution) -> dict:
    return {
        "frequency_MHz": m.frequency,
        "omega_rad_per_us": m.omega,
        "k_x": [m.k_x.real, m.k_x.imag],
        "phase_velocity_km_per_s": m.phase_velocity,
        "attenuation_np_per_mm": m.attenuation,
        "case_id": m.case.index,
        "case_label": m.case.label,
        "interface_residual": m.interface_residual,
        "backward_error": m.backward_error,
        "n_points": m.n_points,
        "branch_point": m.branch_point,
        "curve_id": m.curve_id,
    }


def dataset_to_dict(dataset: DispersionDataset) -> dict:
    return {
        "system": dataset.system.to_dict(),
        "cases": [c.to_dict() for c in dataset.cases],
        "metadata": dataset.metadata,
        "failures": dataset.failures,
        "modes": [mode_record(m) for m in dataset.modes],
    }


def dataset_from_dict(data: dict) -> DispersionDataset:
    system = TriLayerSystem.from_dict(data["system"])
    cases = [RadiationCase.from_dict(c) for c in data["cases"]]
    by_index = {c.index: c for c in cases}
    modes = [
        ModeSolution(
            omega=r["omega_rad_per_us"],
            k_x=complex(*r["k_x"]),
            case=by_index[r["case_id"]],
            interface_residual=r["interface_residual"],
            backward_error=r["backward_error"],
            n_points=r["n_points"],
            branch_point=r.get("branch_point", False),
            curve_id=r.get("curve_id"),
        )
        for r in data["modes"]
    ]
    return DispersionDataset(system, cases, modes, data.get("failures", []), data.get("metadata", {}))


def load_dataset(directory) -> DispersionDataset:
    path = Path(directory) / "modes.json"
    return dataset_from_dict(json.loads(path.read_text()))


PLOT_DISPERSION = '''"""Phase velocity against frequency from dispersion.csv."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "dispersion.csv")))
fig, ax = plt.subplots(figsize=(6, 4.5))
for cid in sorted({r["case_id"] for r in rows}, key=int):
    sel = [r for r in rows if r["case_id"] == cid]
    ax.plot([float(r["frequency_MHz"]) for r in sel],
            [float(r["phase_velocity_km_per_s"]) for r in sel],
            "o", mfc="none", ms=3, label=f"case {cid}")
ax.set_xlabel("Frequency (MHz)")
ax.set_ylabel("Phase velocity (m/ms)")
ax.set_ylim(0, 10)
ax.legend()
fig.tight_layout()
fig.savefig(here / "dispersion.png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

PLOT_ATTENUATION = '''"""Attenuation against frequency from dispersion.csv."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

CAP = {cap!r}  # Np/mm; larger values are in the data but not drawn

here = Path(__file__).resolve().parent
rows = [r for r in csv.DictReader(open(here / "dispersion.csv"))
        if float(r["im_kx_np_per_mm"]) <= CAP]
fig, ax = plt.subplots(figsize=(6, 4.5))
for cid in sorted({{r["case_id"] for r in rows}}, key=int):
    sel = [r for r in rows if r["case_id"] == cid]
    ax.plot([float(r["frequency_MHz"]) for r in sel],
            [float(r["im_kx_np_per_mm"]) for r in sel],
            "o", mfc="none", ms=3, label=f"case {{cid}}")
ax.set_xlabel("Frequency (MHz)")
ax.set_ylabel("Attenuation (Np/mm)")
ax.set_ylim(0, CAP)
ax.legend()
fig.tight_layout()
fig.savefig(here / "attenuation.png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

PLOT_MODESHAPE = '''"""Mode shape profile from {name}."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "{name}")))
y = [float(r["y_mm"]) for r in rows]
fig, ax = plt.subplots(figsize=(4.5, 6))
for key, style in (("re_ux", "-"), ("im_ux", "--"), ("re_uy", "-"), ("im_uy", "--")):
    ax.plot([float(r[key]) for r in rows], y, style, label=key)
ax.axhline(-{d}, color="k", lw=0.5)
ax.axhline({d}, color="k", lw=0.5)
ax.set_xlabel("Displacement (normalised)")
ax.set_ylabel("y (mm)")
ax.legend()
fig.tight_layout()
fig.savefig(here / "{stem}.png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''


def write_dataset(dataset: DispersionDataset, directory, config_dict: Optional[dict] = None, plots: bool = True) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    path = out / "dispersion.csv"
    path.write_text(dispersion_csv(dataset))
    files.append(path)
    data = dataset_to_dict(dataset)
    if config_dict is not None:
        data["config"] = config_dict
    data["metadata"] = dict(data["metadata"], written=time.strftime("%Y-%m-%dT%H:%M:%S"))
    path = out / "modes.json"
    path.write_text(json.dumps(data, indent=1, sort_keys=True))
    files.append(path)
    if plots:
        for name, text in (
            ("plot_dispersion.py", PLOT_DISPERSION),
            ("plot_attenuation.py", PLOT_ATTENUATION.format(cap=ATTENUATION_DISPLAY_CAP)),
        ):
            path = out / name
            path.write_text(text)
            files.append(path)
    return files


def write_mode_shape(shape: ModeShape, mode: ModeSolution, directory, d: float, tag: str) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"modeshape_{tag}"
    y, ux, uy = shape.profile()
    regions = ["side_a"] * len(shape.y_a) + ["guide"] * len(shape.y_guide) + ["side_b"] * len(shape.y_b)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["y_mm", "region", "re_ux", "im_ux", "re_uy", "im_uy"])
    for yi, reg, a, b in zip(y, regions, ux, uy):
        w.writerow([_num(yi), reg, _num(a.real), _num(a.imag), _num(b.real), _num(b.imag)])
    csv_path = out / f"{stem}.csv"
    csv_path.write_text(buf.getvalue())
    meta = out / f"{stem}.json"
    meta.write_text(json.dumps({
        "mode": mode_record(mode),
        "growth_flags": shape.growth_flags,
        "k_y": {k: [v.real, v.imag] for k, v in shape.k_y.items()},
        "continuity_error": shape.continuity_error(),
        "branch_point": shape.branch_point,
    }, indent=1, sort_keys=True))
    plot = out / f"plot_{stem}.py"
    plot.write_text(PLOT_MODESHAPE.format(name=csv_path.name, d=d, stem=stem))
    return [csv_path, meta, plot]


@dataclass
class ValidationRow:
    frequency: float
    case_id: int
    k_scm: complex
    det_at_scm: float
    k_refined: Optional[complex]
    deviation: float
    passed: bool
    note: str = ""


def validate_dataset(dataset: DispersionDataset, rel_tol: float = 1e-4, det_tol: float = 1e-5) -> list[ValidationRow]:
    """Check every mode against Newton refinement of the partial-wave determinant."""
    rows = []
    for m in dataset.modes:
        det = abs(characteristic_determinant(dataset.system, m.omega, m.k_x, m.case))
        try:
            k_ref = refine_root(dataset.system, m.omega, m.k_x, m.case)
            dev = abs(k_ref - m.k_x) / abs(k_ref)
            note = ""
        except NoConvergenceError as exc:
            k_ref, dev, note = None, math.inf, f"no convergence: {exc}"
        rows.append(ValidationRow(m.frequency, m.case.index, m.k_x, det, k_ref, dev, dev < rel_tol and det < det_tol, note))
    return rows


def validation_csv(rows: list[ValidationRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["frequency_MHz", "case_id", "re_kx_scm", "im_kx_scm", "abs_det_scaled",
                "re_kx_refined", "im_kx_refined", "relative_deviation", "pass", "note"])
    for r in rows:
        kr = r.k_refined if r.k_refined is not None else complex(math.nan, math.nan)
        w.writerow([_num(r.frequency), r.case_id, _num(r.k_scm.real), _num(r.k_scm.imag), f"{r.det_at_scm:.3e}",
                    _num(kr.real), _num(kr.imag), f"{r.deviation:.3e}", int(r.passed), r.note])
    return buf.getvalue()


def pass_fraction(rows: list[ValidationRow]) -> float:
    if not rows:
        return 1.0
    return float(np.mean([r.passed for r in rows]))
