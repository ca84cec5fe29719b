"""Acceptance suite for the adhesive-joint configuration.

Each test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  The full 150-frequency sweep runs once per session.
"""

import math
import os
import time

import numpy as np
import pytest

from conftest import record, relative_residual
from leakyscm.assembly import BLOCK_NAMES, assemble_pep, enumerate_cases
from leakyscm.config import parse_config
from leakyscm.materials import ALUMINIUM, EPOXY, Material, TriLayerSystem
from leakyscm.modes import PipelineOptions, filter_modes, prefilter, solve_case, sweep
from leakyscm.oracle import evaluate_fields, mode_amplitudes, rayleigh_lamb_roots, refine_root
from leakyscm.pep_solver import EigenPair, eigenvector_at
from leakyscm.results import pass_fraction, validate_dataset

pytestmark = pytest.mark.slow

RUNTIME_BUDGET_S = 20 * 60


@pytest.fixture(scope="session")
def joint_config():
    return parse_config({})


@pytest.fixture(scope="session")
def full_sweep(joint_config):
    system = joint_config.system()
    t0 = time.perf_counter()
    ds = sweep(system, joint_config.omegas(), joint_config.options(), jobs=os.cpu_count() or 1)
    return ds, time.perf_counter() - t0


def test_a1_full_sweep(full_sweep, joint_config):
    ds, runtime = full_sweep
    counts = [len(ds.in_case(c.index)) for c in ds.cases]
    ok = (
        len(ds.cases) == 3
        and all(n > 0 for n in counts)
        and runtime <= RUNTIME_BUDGET_S
        and not ds.failures
        and joint_config.steps == 150
        and joint_config.n_points == 50
    )
    record("A1", ok, f"{len(ds)} modes, per case {counts}, {len(ds.failures)} failed tasks, "
                     f"{runtime / 60:.1f} min on {os.cpu_count()} CPU(s)")
    assert ok


def test_a2_oracle_equivalence(full_sweep):
    ds, _ = full_sweep
    rows = validate_dataset(ds, rel_tol=1e-4, det_tol=1e-5)
    frac = pass_fraction(rows)
    worst_dev = max(r.deviation for r in rows)
    worst_det = max(r.det_at_scm for r in rows)
    ok = bool(rows) and frac >= 0.99
    record("A2", ok, f"{100 * frac:.2f}% of {len(rows)} modes within 1e-4 with |D| < 1e-5 "
                     f"(worst deviation {worst_dev:.1e}, worst |D| {worst_det:.1e})")
    assert ok


def test_a3_named_modes(joint_config):
    system = joint_config.system()
    opts = joint_config.options()
    high = sweep(system, [2 * math.pi * 3.53], opts).modes
    low = sweep(system, [2 * math.pi * 1.03], opts).modes
    trapped = [m for m in high if m.attenuation < 1e-6]
    leaky = [m for m in low if m.attenuation > 0 and 3.12 < m.phase_velocity < 6.33]
    ok = bool(trapped) and bool(leaky)
    # exact values from the partial-wave determinant
    k_leaky = refine_root(system, 2 * math.pi * 1.03, leaky[0].k_x, leaky[0].case) if leaky else None
    record("A3", ok, f"{len(trapped)} non-radiating modes at 3.53 MHz; {len(leaky)} shear-leaky at 1.03 MHz, "
                     f"k_x = {k_leaky:.8f} rad/mm (c_ph {2 * math.pi * 1.03 / k_leaky.real:.4f} km/s)")
    assert ok


def _spread_sample(ds, per_case=(4, 3, 3)):
    picks = []
    for case, count in zip(ds.cases, per_case):
        modes = sorted(ds.in_case(case.index), key=lambda m: (m.omega, m.k_x.real))
        for i in np.linspace(0, len(modes) - 1, count).round().astype(int):
            picks.append(modes[i])
    return picks


def test_a4_spectral_convergence(full_sweep, joint_config):
    ds, _ = full_sweep
    opts64 = joint_config.options()
    opts64.n_points = 64
    devs, over = [], []
    for m in _spread_sample(ds):
        fine = solve_case(ds.system, m.omega, m.case, opts64)
        k64 = min((f.k_x for f in fine), key=lambda k: abs(k - m.k_x), default=math.inf)
        devs.append(abs(k64 - m.k_x) / abs(m.k_x))
        if devs[-1] >= 1e-6:
            over.append(f"{m.case.label} {m.frequency:.3f} MHz {devs[-1]:.1e}")
    ok = len(devs) == 10 and max(devs) < 1e-6
    record("A4", ok, f"N=64 vs N=50 relative change over 10 modes: max {max(devs):.1e}, "
                     f"{sum(d < 1e-6 for d in devs)}/10 below 1e-6; over: {over or 'none'}")
    assert ok


def test_a5_free_plate_limit():
    thin = ALUMINIUM.with_density(1e-6)
    system = TriLayerSystem(thin, EPOXY, thin, 0.5)
    freqs = [0.05, 0.5, 1.03, 2.0, 3.53, 4.5]
    ds = sweep(system, [2 * math.pi * f for f in freqs])
    worst, matched, missing = 0.0, 0, 0
    for f in freqs:
        w = 2 * math.pi * f
        rl = np.array(rayleigh_lamb_roots(EPOXY, 0.5, w, "S") + rayleigh_lamb_roots(EPOXY, 0.5, w, "A"))
        scm = np.array([m.k_x.real for m in ds.at(w) if m.attenuation < 1e-3])
        for k in scm:
            worst = max(worst, np.min(np.abs(rl - k) / rl))
            matched += 1
        missing += sum(np.min(np.abs(scm - r) / r) > 1e-3 for r in rl)
    w0 = 2 * math.pi * 0.05
    s0 = min((m.k_x.real for m in ds.at(w0)), key=lambda k: abs(w0 / k - 1.995))
    c_s0 = w0 / s0
    ok = matched > 0 and worst < 1e-3 and missing == 0 and abs(c_s0 - 1.995) / 1.995 < 5e-3
    record("A5", ok, f"{matched} low-attenuation modes, worst mismatch {worst:.1e}, {missing} plate roots unmatched; "
                     f"S0 at 0.05 MHz {c_s0:.4f} km/s")
    assert ok


def _parity_error(mode):
    n = mode.n_points
    v = mode.vector
    guide = v[2 * n:4 * n]
    uy = v[3 * n:4 * n] / np.abs(guide).max()
    return min(np.abs(uy - uy[::-1]).max(), np.abs(uy + uy[::-1]).max())


def _mode_set_distance(a, b):
    ka = np.array([m.k_x for m in a])
    kb = np.array([m.k_x for m in b])
    if len(ka) != len(kb):
        return math.inf
    return max(np.min(np.abs(kb - k)) / abs(k) for k in ka) if len(ka) else 0.0


def test_a6_symmetry(full_sweep):
    ds, _ = full_sweep
    parity = max(_parity_error(m) for m in ds.modes)
    freqs = [2 * math.pi * f for f in (1.03, 2.28, 3.53)]
    joint = ds.system
    swap_joint = _mode_set_distance(sweep(joint, freqs).modes, sweep(joint.swapped(), freqs).modes)
    mixed = TriLayerSystem(ALUMINIUM, EPOXY, Material("steel", 7.8, 5.9, 3.2), 0.5)
    swap_mixed = _mode_set_distance(sweep(mixed, freqs).modes, sweep(mixed.swapped(), freqs).modes)
    ok = parity < 1e-6 and swap_joint < 1e-8 and swap_mixed < 1e-8
    record("A6", ok, f"worst u_y parity defect {parity:.1e} over {len(ds)} modes; "
                     f"swap change {swap_joint:.1e} (identical sides), {swap_mixed:.1e} (aluminium/steel)")
    assert ok


def test_a7_filter_injection(joint_config):
    system = joint_config.system()
    opts = joint_config.options()
    assert (opts.max_attenuation, opts.residual_tol) == (15.0, 1e-3)
    cases = {c.label: c for c in enumerate_cases(system)}
    case = cases["shear_leaky"]
    omega = 2 * math.pi * 1.03
    pep = assemble_pep(system, omega, case, opts.n_points)
    seed = refine_root(system, omega, 1.0824 + 0.1584j, case)
    k, v, err = eigenvector_at(pep, seed)
    rng = np.random.default_rng(7)

    def kept(kx, vec=v):
        return bool(filter_modes([EigenPair(kx, vec, err)], case, system, omega, opts, pep))

    injections = {
        "genuine mode kept": kept(k),
        "Re k_x < 0 rejected": not kept(complex(-k.real, k.imag)),
        "Re k_x = 0 rejected": not kept(complex(0.0, k.imag)),
        "attenuation 15 rejected": not kept(complex(k.real, 15.0)),
        "attenuation 14.9 passes the value checks": prefilter(complex(k.real, 14.9), case, system, omega, opts) is None,
        "residual > 1e-3 rejected": not kept(k, rng.standard_normal(v.size) + 0j),
    }
    # a rule-boundary check: an otherwise valid pair with a residual just over the tolerance
    tight = PipelineOptions(residual_tol=0.5 * filter_modes([EigenPair(k, v, err)], case, system, omega, opts, pep)[0].interface_residual)
    injections["residual just over tolerance rejected"] = not filter_modes([EigenPair(k, v, err)], case, system, omega, tight, pep)
    ok = all(injections.values())
    failed = [name for name, good in injections.items() if not good]
    record("A7", ok, f"{len(injections)} injections, failed: {failed or 'none'}")
    assert ok


def test_a8_manufactured_solution(joint_config):
    system = joint_config.system()
    worst = 0.0
    labels = []
    for case, seed, f in (
        (enumerate_cases(system)[0], 2.21186, 1.03),
        (enumerate_cases(system)[1], 1.0824 + 0.1584j, 1.03),
        (enumerate_cases(system)[2], 0.63619 + 3.81221j, 3.53),
    ):
        omega = 2 * math.pi * f
        k = refine_root(system, omega, seed, case)
        pep = assemble_pep(system, omega, case, 50)
        fields = evaluate_fields(mode_amplitudes(system, omega, k, case), system, pep.grids)
        u = np.concatenate([fields[name] for name in BLOCK_NAMES])
        worst = max(worst, relative_residual(pep, k, u))
        labels.append(case.label)
    ok = worst < 1e-6
    record("A8", ok, f"worst relative residual {worst:.1e} at N=50 ({', '.join(labels)})")
    assert ok
