"""Frequency sweeps, physical-mode filtering and mode-shape reconstruction."""

from __future__ import annotations

import cmath
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .assembly import (
    DEFAULT_ZETA,
    EVANESCENT,
    LEAKY,
    PEPMatrices,
    RadiationCase,
    assemble_pep,
    enumerate_cases,
)
from .materials import TriLayerSystem
from .pep_solver import EigenPair, SolverError, eigenvector_at, solve_pep
from .spectral import interpolate

log = logging.getLogger(__name__)


class BranchPointWarning(RuntimeWarning):
    pass


def select_branch(k_y_sq: complex, kind: str) -> complex:
    """Square root of ``k_y_sq`` matching the partial-wave behaviour.

    Evanescent waves take Im(k_y) >= 0 so exp(i k_y |y -/+ d|) decays away
    from the plate.  Leaky (outgoing) waves take Re(k_y) >= 0, which for an
    attenuating mode puts Im(k_y) < 0: the field grows with distance.
    """
    k_y_sq = complex(k_y_sq)
    if k_y_sq == 0:
        warnings.warn("transverse wavenumber at a branch point", BranchPointWarning, stacklevel=2)
    if kind == EVANESCENT:
        return 1j * cmath.sqrt(-k_y_sq)
    if kind == LEAKY:
        return cmath.sqrt(k_y_sq)
    raise ValueError(f"unknown branch kind {kind!r}")


# relative slack on Im(k) for unpolished eigenvalues
PRESELECT_SLACK = 1e-6


@dataclass
class PipelineOptions:
    n_points: int = 50
    max_attenuation: float = 15.0
    residual_tol: float = 1e-3
    dedup_tol: float = 1e-6
    bulk_tol: float = 1e-4
    edge_tol: float = 1e-6
    negative_attenuation_tol: float = 1e-9
    nonradiating_attenuation_tol: float = 1e-6
    guard: float = 1e8
    equilibrate: bool = True
    zeta: dict = field(default_factory=lambda: dict(DEFAULT_ZETA))
    keep_vectors: bool = True


@dataclass
class ModeSolution:
    omega: float
    k_x: complex
    case: RadiationCase
    interface_residual: float
    backward_error: float
    n_points: int
    vector: Optional[np.ndarray] = field(default=None, repr=False)
    branch_point: bool = False
    curve_id: Optional[int] = None

    @property
    def frequency(self) -> float:
        return self.omega / (2 * math.pi)

    @property
    def phase_velocity(self) -> float:
        return self.omega / self.k_x.real

    @property
    def attenuation(self) -> float:
        return self.k_x.imag

    @property
    def case_id(self) -> int:
        return self.case.index


@dataclass
class DispersionDataset:
    system: TriLayerSystem
    cases: list[RadiationCase]
    modes: list[ModeSolution] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.modes)

    def at(self, omega: float, rtol: float = 1e-12) -> list[ModeSolution]:
        return [m for m in self.modes if abs(m.omega - omega) <= rtol * omega]

    def in_case(self, index: int) -> list[ModeSolution]:
        return [m for m in self.modes if m.case.index == index]

    @property
    def omegas(self) -> np.ndarray:
        return np.unique([m.omega for m in self.modes])


# interface conditions


def _interface_terms(pep: PEPMatrices, system: TriLayerSystem, k: complex, v: np.ndarray, kinds: dict):
    """The eight continuity residuals with analytic half-space derivatives.

    Half-space potentials are represented only by their interface values;
    their y-derivatives come from the outgoing/decaying exponential with the
    branch implied by ``kinds``.  Spurious solutions whose discrete
    half-space field is not such an exponential fail these conditions.
    """
    n = pep.n
    blocks = pep.split(v)
    gd = pep.grids["guide"]
    g = system.guide
    lam, mu = g.lam, g.mu
    ux, uy = blocks["u_x"], blocks["u_y"]
    out = []
    for side, gi, sign in (("a", 0, -1), ("b", n - 1, 1)):
        m = system.side(side)
        omega = pep.omega
        phi0 = blocks[f"phi_{side}"][pep.grids[f"phi_{side}"].interface_index]
        psi0 = blocks[f"psi_{side}"][pep.grids[f"psi_{side}"].interface_index]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BranchPointWarning)
            p = select_branch((omega / m.c_l) ** 2 - k * k, kinds[f"phi_{side}"])
            q = select_branch((omega / m.c_t) ** 2 - k * k, kinds[f"psi_{side}"])
        dphi, ddphi = sign * 1j * p * phi0, -(p**2) * phi0
        dpsi, ddpsi = sign * 1j * q * psi0, -(q**2) * psi0
        lj, mj = m.lam, m.mu
        normal = (
            (lam + 2 * mu) * (gd.d1[gi] @ uy)
            + 1j * lam * k * ux[gi]
            + lj * k * k * phi0
            - (lj + 2 * mj) * ddphi
            - 2j * mj * k * dpsi
        )
        shear = mu * (1j * k * uy[gi] + gd.d1[gi] @ ux) - mj * (2j * k * dphi - k * k * psi0 - ddpsi)
        cx = ux[gi] - 1j * k * phi0 + dpsi
        cy = uy[gi] - dphi - 1j * k * psi0
        out.append((normal, shear, cx, cy))
    return out


def interface_residual(pep: PEPMatrices, system: TriLayerSystem, k: complex, v: np.ndarray, kinds=None) -> float:
    """Largest non-dimensional violation of the eight continuity conditions.

    Stress conditions are divided by mu_guide |k| max|u|, displacement
    conditions by max|u|, with max|u| taken over the guide displacements.
    """
    if kinds is None:
        kinds = pep.case.kinds()
    blocks = pep.split(v)
    umax = max(np.abs(blocks["u_x"]).max(), np.abs(blocks["u_y"]).max())
    if umax == 0:
        return math.inf
    stress_scale = system.guide.mu * abs(k) * umax
    worst = 0.0
    for normal, shear, cx, cy in _interface_terms(pep, system, k, v, kinds):
        worst = max(worst, abs(normal) / stress_scale, abs(shear) / stress_scale, abs(cx) / umax, abs(cy) / umax)
    return float(worst)


# filtering


def bulk_wavenumbers_all(system: TriLayerSystem, omega: float) -> list[float]:
    return [omega / c for c in system.bulk_speeds()]


def prefilter(
    k: complex, case: RadiationCase, system: TriLayerSystem, omega: float, opts: PipelineOptions, slack: float = 0.0
) -> Optional[str]:
    """Reason for rejecting ``k`` from its value alone, or None.

    ``slack`` widens the attenuation-sign tests by ``slack * |k|``; it is
    used before polishing, when Im(k) still carries eigensolver noise.
    """
    if not np.isfinite(k) or abs(k) >= opts.guard:
        return "infinite"
    if k.real <= 0:
        return "not forward propagating"
    if k.imag >= opts.max_attenuation:
        return "highly attenuative"
    if k.imag < -(opts.negative_attenuation_tol + slack * abs(k)):
        return "growing along the guide"
    if not case.is_radiating and abs(k.imag) > opts.nonradiating_attenuation_tol + slack * abs(k):
        return "non-propagating"
    if not case.contains(omega / k.real, opts.edge_tol):
        return "outside case interval"
    for kb in bulk_wavenumbers_all(system, omega):
        if abs(k - kb) <= opts.bulk_tol * kb:
            return "bulk wave"
    return None


def filter_modes(
    raw: Iterable[EigenPair],
    case: RadiationCase,
    system: TriLayerSystem,
    omega: float,
    opts: PipelineOptions,
    pep: PEPMatrices,
) -> list[ModeSolution]:
    """Keep eigenpairs that are physical modes of this radiation case."""
    kept = []
    for pair in raw:
        k = complex(pair.k_x)
        if prefilter(k, case, system, omega, opts) is not None:
            continue
        res = interface_residual(pep, system, k, pair.vector, case.kinds())
        if not res <= opts.residual_tol:
            continue
        if abs(k.imag) < opts.negative_attenuation_tol:
            k = complex(k.real, 0.0)
        bp = any(
            abs((omega / c) ** 2 - k * k) == 0
            for m in (system.side_a, system.side_b)
            for c in (m.c_l, m.c_t)
        )
        kept.append(
            ModeSolution(
                omega=omega,
                k_x=k,
                case=case,
                interface_residual=res,
                backward_error=pair.backward_error,
                n_points=pep.n,
                vector=pair.vector if opts.keep_vectors else None,
                branch_point=bp,
            )
        )
    return kept


def deduplicate(modes: Sequence[ModeSolution], tol: float = 1e-6) -> list[ModeSolution]:
    """Drop repeated modes at the same frequency, keeping the best residual."""
    by_omega: dict[float, list[ModeSolution]] = {}
    for m in modes:
        by_omega.setdefault(m.omega, []).append(m)
    out = []
    for omega in sorted(by_omega):
        kept: list[ModeSolution] = []
        for m in sorted(by_omega[omega], key=lambda m: (m.interface_residual, m.case.index, m.k_x.real)):
            if all(abs(m.k_x - o.k_x) >= tol * abs(o.k_x) for o in kept):
                kept.append(m)
        out.extend(kept)
    return sort_modes(out)


def sort_modes(modes: Iterable[ModeSolution]) -> list[ModeSolution]:
    return sorted(modes, key=lambda m: (m.omega, m.case.index, m.k_x.real, m.k_x.imag))


# sweeps


def solve_case(system: TriLayerSystem, omega: float, case: RadiationCase, opts: PipelineOptions) -> list[ModeSolution]:
    """Assemble, solve and filter one (omega, case) task."""
    pep = assemble_pep(system, omega, case, opts.n_points, equilibrate=opts.equilibrate)

    def select(k):
        return prefilter(k, case, system, omega, opts, slack=PRESELECT_SLACK) is None

    pairs = solve_pep(pep, guard=opts.guard, select=select)
    return filter_modes(pairs, case, system, omega, opts, pep)


def _task(args):
    system, omega, case, opts = args
    try:
        return omega, case.index, solve_case(system, omega, case, opts), None
    except (SolverError, np.linalg.LinAlgError, ValueError) as exc:
        return omega, case.index, [], f"{type(exc).__name__}: {exc}"


def sweep(
    system: TriLayerSystem,
    omega_grid: Sequence[float],
    opts: Optional[PipelineOptions] = None,
    cases: Optional[Sequence[RadiationCase]] = None,
    jobs: int = 1,
    progress=None,
) -> DispersionDataset:
    """Solve every radiation case at every frequency and merge the modes."""
    opts = opts or PipelineOptions()
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.size and (np.any(omega_grid <= 0) or np.any(np.diff(omega_grid) <= 0)):
        raise ValueError("omega_grid must be positive and strictly increasing")
    if cases is None:
        cases = enumerate_cases(system, opts.zeta)
    tasks = [(system, float(w), c, opts) for w in omega_grid for c in cases]

    results = []
    if jobs > 1 and len(tasks) > 1:
        os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for r in pool.map(_task, tasks, chunksize=1):
                results.append(r)
                if progress:
                    progress(len(results), len(tasks))
    else:
        for t in tasks:
            results.append(_task(t))
            if progress:
                progress(len(results), len(tasks))

    modes, failures = [], []
    for omega, ci, found, err in results:
        modes.extend(found)
        if err is not None:
            failures.append({"omega": omega, "case": ci, "error": err})
    failures.sort(key=lambda f: (f["omega"], f["case"]))
    return DispersionDataset(
        system=system,
        cases=list(cases),
        modes=deduplicate(modes, opts.dedup_tol),
        failures=failures,
        metadata={"n_points": opts.n_points, "n_omega": int(omega_grid.size)},
    )


def recompute_vector(mode: ModeSolution, system: TriLayerSystem, opts: Optional[PipelineOptions] = None) -> tuple[PEPMatrices, np.ndarray]:
    """Re-assemble the mode's problem and recover its eigenvector."""
    opts = opts or PipelineOptions()
    pep = assemble_pep(system, mode.omega, mode.case, mode.n_points, equilibrate=opts.equilibrate)
    if mode.vector is not None:
        return pep, mode.vector
    _, v, _ = eigenvector_at(pep, mode.k_x)
    return pep, v


def connect_curves(modes: Sequence[ModeSolution], jump: float = 0.25) -> list[list[ModeSolution]]:
    """Greedy nearest-neighbour continuation across frequency.

    Distance is measured in (phase velocity, attenuation); a mode joins the
    closest curve that ended at the previous frequency if that distance is
    below ``jump``.  Sets ``curve_id`` on every mode.
    """
    curves: list[list[ModeSolution]] = []
    open_curves: list[int] = []
    for omega in sorted({m.omega for m in modes}):
        here = [m for m in modes if m.omega == omega]
        pairs = []
        for i, m in enumerate(here):
            for ci in open_curves:
                last = curves[ci][-1]
                dist = math.hypot(m.phase_velocity - last.phase_velocity, m.attenuation - last.attenuation)
                if dist < jump:
                    pairs.append((dist, i, ci))
        pairs.sort()
        used_m, used_c, next_open = set(), set(), []
        for dist, i, ci in pairs:
            if i in used_m or ci in used_c:
                continue
            used_m.add(i)
            used_c.add(ci)
            curves[ci].append(here[i])
            next_open.append(ci)
        for i, m in enumerate(here):
            if i not in used_m:
                curves.append([m])
                next_open.append(len(curves) - 1)
        open_curves = next_open
    for cid, curve in enumerate(curves):
        for m in curve:
            m.curve_id = cid
    return curves


# mode shapes


@dataclass
class ModeShape:
    y_guide: np.ndarray
    u_x: np.ndarray
    u_y: np.ndarray
    y_a: np.ndarray
    y_b: np.ndarray
    fields_a: dict[str, np.ndarray]
    fields_b: dict[str, np.ndarray]
    growth_flags: dict[str, str]
    k_y: dict[str, complex]
    branch_point: bool = False

    def continuity_error(self) -> float:
        """Mismatch of (u_x, u_y) between guide and half-spaces at y = -/+ d."""
        errs = [
            abs(self.u_x[0] - self.fields_a["u_x"][-1]),
            abs(self.u_y[0] - self.fields_a["u_y"][-1]),
            abs(self.u_x[-1] - self.fields_b["u_x"][0]),
            abs(self.u_y[-1] - self.fields_b["u_y"][0]),
        ]
        return float(max(errs))

    def profile(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(y, u_x, u_y) through side_a, guide and side_b."""
        y = np.concatenate([self.y_a, self.y_guide, self.y_b])
        ux = np.concatenate([self.fields_a["u_x"], self.u_x, self.fields_b["u_x"]])
        uy = np.concatenate([self.fields_a["u_y"], self.u_y, self.fields_b["u_y"]])
        return y, ux, uy


def mode_shape(
    mode: ModeSolution,
    system: TriLayerSystem,
    y_extent: float,
    n_guide: int = 101,
    n_half: int = 101,
    pep: Optional[PEPMatrices] = None,
    vector: Optional[np.ndarray] = None,
) -> ModeShape:
    """Physical displacement profile across the plate and both half-spaces.

    Guide displacements are interpolated from the collocation values; each
    half-space potential is rebuilt on the real axis from its interface
    value as a single partial wave exp(i k_y |y -/+ d|).
    """
    if y_extent <= 0:
        raise ValueError("y_extent must be positive")
    if pep is None or vector is None:
        pep, vector = recompute_vector(mode, system)
    d = system.d
    blocks = pep.split(vector)
    scale = max(np.abs(blocks["u_x"]).max(), np.abs(blocks["u_y"]).max())
    blocks = {k: v / scale for k, v in blocks.items()}
    # fix the overall phase so the largest guide displacement is real
    gu = np.concatenate([blocks["u_x"], blocks["u_y"]])
    ph = gu[np.argmax(np.abs(gu))] / abs(gu[np.argmax(np.abs(gu))])
    blocks = {k: v / ph for k, v in blocks.items()}

    y_guide = np.linspace(-d, d, n_guide)
    s_nodes = pep.grids["guide"].s
    ux = interpolate(s_nodes, blocks["u_x"], y_guide / d)
    uy = interpolate(s_nodes, blocks["u_y"], y_guide / d)

    k = mode.k_x
    omega = mode.omega
    kinds = mode.case.kinds()
    flags, k_y, fields, ygrids = {}, {}, {}, {}
    bp = False
    for side, sign in (("a", -1), ("b", 1)):
        m = system.side(side)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", BranchPointWarning)
            p = select_branch((omega / m.c_l) ** 2 - k * k, kinds[f"phi_{side}"])
            q = select_branch((omega / m.c_t) ** 2 - k * k, kinds[f"psi_{side}"])
        bp = bp or bool(caught)
        k_y[f"phi_{side}"], k_y[f"psi_{side}"] = p, q
        flags[f"phi_{side}"], flags[f"psi_{side}"] = kinds[f"phi_{side}"], kinds[f"psi_{side}"]
        phi0 = blocks[f"phi_{side}"][pep.grids[f"phi_{side}"].interface_index]
        psi0 = blocks[f"psi_{side}"][pep.grids[f"psi_{side}"].interface_index]
        if side == "a":
            y = np.linspace(-d - y_extent, -d, n_half)
        else:
            y = np.linspace(d, d + y_extent, n_half)
        dist = np.abs(y - sign * d)
        phi = phi0 * np.exp(1j * p * dist)
        psi = psi0 * np.exp(1j * q * dist)
        dphi = sign * 1j * p * phi
        dpsi = sign * 1j * q * psi
        fields[side] = {
            "phi": phi,
            "psi": psi,
            "u_x": 1j * k * phi - dpsi,
            "u_y": dphi + 1j * k * psi,
        }
        ygrids[side] = y
    return ModeShape(y_guide, ux, uy, ygrids["a"], ygrids["b"], fields["a"], fields["b"], flags, k_y, bp)


def omega_grid(f_min_mhz: float, f_max_mhz: float, steps: int) -> np.ndarray:
    """Angular frequencies (rad/µs) for ``steps`` equally spaced values."""
    if steps <= 0:
        return np.empty(0)
    return 2 * math.pi * np.linspace(f_min_mhz, f_max_mhz, steps)
