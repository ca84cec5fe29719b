"""Command line entry point: ``leakyscm {sweep,modeshape,validate,materials}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import results
from .assembly import enumerate_cases
from .config import ConfigError, MaterialLookupError, SweepConfig, load_config, parse_config
from .materials import PRESETS
from .modes import PipelineOptions, mode_shape, recompute_vector, sort_modes, sweep

log = logging.getLogger("leakyscm")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MATERIAL = 3
EXIT_PARTIAL = 4
EXIT_VALIDATION = 5
EXIT_NOT_FOUND = 6


class ModeNotFoundError(LookupError):
    pass


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config)
        system = cfg.system()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MaterialLookupError as exc:
        print(f"material lookup failed: {exc}", file=sys.stderr)
        return EXIT_MATERIAL
    out = args.out or cfg.output_dir
    if out is None:
        print("config error: no output directory (use --out)", file=sys.stderr)
        return EXIT_CONFIG
    jobs = args.jobs or cfg.parallelism

    def progress(done, total):
        if not args.quiet and (done == total or done % 25 == 0):
            print(f"  {done}/{total} tasks", file=sys.stderr)

    t0 = time.perf_counter()
    dataset = sweep(system, cfg.omegas(), cfg.options(), jobs=jobs, progress=progress)
    dataset.metadata.update(
        config_hash=cfg.digest(),
        runtime_s=round(time.perf_counter() - t0, 3),
        frequency_range_mhz=[cfg.f_min_mhz, cfg.f_max_mhz],
        steps=cfg.steps,
    )
    results.write_dataset(dataset, out, cfg.to_dict(), plots=cfg.plots)
    print(f"{len(dataset)} modes written to {out}")
    if dataset.failures:
        print(f"{len(dataset.failures)} (omega, case) tasks failed; partial results written", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _dataset_config(data_dir) -> SweepConfig:
    data = json.loads((Path(data_dir) / "modes.json").read_text())
    if "config" in data:
        return parse_config(data["config"])
    return SweepConfig()


def select_mode(candidates, selector):
    """Pick a mode by index or by radiation status.

    ``selector`` is None (first candidate), an integer index into the list
    or one of 'non-radiating', 'shear-leaky', 'fully-leaky'; a status picks
    the least attenuated matching mode.
    """
    if not candidates:
        raise ModeNotFoundError("no modes at this frequency")
    if selector is None:
        return 0, candidates[0]
    try:
        idx = int(selector)
    except ValueError:
        status = {"non-radiating": "evanescent"}.get(selector, selector).replace("-", "_")
        matches = [(i, m) for i, m in enumerate(candidates) if status in m.case.label]
        if not matches:
            raise ModeNotFoundError(f"no {selector} mode") from None
        return min(matches, key=lambda im: im[1].attenuation)
    if not 0 <= idx < len(candidates):
        raise ModeNotFoundError(f"mode index {idx} out of range (0..{len(candidates) - 1})")
    return idx, candidates[idx]


def _describe(cands) -> str:
    return "\n".join(
        f"  [{i}] c_ph={m.phase_velocity:.4f} km/s  att={m.attenuation:.4g} Np/mm  case={m.case.label}"
        for i, m in enumerate(cands)
    )


def cmd_modeshape(args) -> int:
    try:
        cfg = _dataset_config(args.data)
        system = cfg.system()
    except (OSError, ConfigError, MaterialLookupError, json.JSONDecodeError) as exc:
        print(f"cannot load dataset: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    f = args.freq
    tol = 1e-9 * cfg.f_max_mhz
    if not (cfg.f_min_mhz - tol <= f <= cfg.f_max_mhz + tol):
        print(
            f"not found: {f} MHz is outside the sweep range [{cfg.f_min_mhz:.6g}, {cfg.f_max_mhz:.6g}] MHz",
            file=sys.stderr,
        )
        return EXIT_NOT_FOUND
    omega = 2 * math.pi * f
    opts = cfg.options()
    cands = sort_modes(sweep(system, [omega], opts).modes)
    try:
        idx, mode = select_mode(cands, args.mode)
    except ModeNotFoundError as exc:
        print(f"not found: {exc}; candidates at {f} MHz:\n{_describe(cands)}", file=sys.stderr)
        return EXIT_NOT_FOUND
    pep, vec = recompute_vector(mode, system, opts)
    extent = args.extent if args.extent else 4 * system.thickness
    shape = mode_shape(mode, system, extent, pep=pep, vector=vec)
    out = Path(args.out) if args.out else Path(args.data)
    files = results.write_mode_shape(shape, mode, out, system.d, f"{f:g}MHz_{idx}")
    print(f"mode [{idx}] c_ph={mode.phase_velocity:.4f} km/s att={mode.attenuation:.4g} Np/mm ({mode.case.label})")
    for p in files:
        print(f"  wrote {p}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        dataset = results.load_dataset(args.data)
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"cannot load dataset: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = results.validate_dataset(dataset, rel_tol=args.tol)
    (Path(args.data) / "validation.csv").write_text(results.validation_csv(rows))
    frac = results.pass_fraction(rows)
    failed = [r for r in rows if not r.passed]
    for r in failed[:20]:
        print(f"  FAIL f={r.frequency:.4f} MHz case={r.case_id} k={r.k_scm:.6g} dev={r.deviation:.2e} {r.note}")
    print(f"{len(rows) - len(failed)}/{len(rows)} modes pass ({100 * frac:.1f}%), threshold {args.tol:g}")
    return EXIT_OK if frac >= args.min_pass else EXIT_VALIDATION


def cmd_materials(args) -> int:
    mats = dict(PRESETS)
    if args.config:
        try:
            mats = load_config(args.config).materials
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    print(f"{'name':<14}{'rho':>8}{'c_l':>8}{'c_t':>8}{'lambda':>10}{'mu':>10}")
    for name, m in sorted(mats.items()):
        print(f"{name:<14}{m.rho:>8.4g}{m.c_l:>8.4g}{m.c_t:>8.4g}{m.lam:>10.4g}{m.mu:>10.4g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leakyscm", description="Leaky Lamb waves of a plate between elastic half-spaces")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="compute dispersion and attenuation curves")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int)
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("modeshape", help="write the mode shape of one mode")
    s.add_argument("--data", required=True)
    s.add_argument("--freq", type=float, required=True, help="frequency in MHz")
    s.add_argument("--mode", help="index or non-radiating / shear-leaky / fully-leaky")
    s.add_argument("--extent", type=float, help="distance into each half-space (mm)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_modeshape)

    s = sub.add_parser("validate", help="check modes against the partial-wave determinant")
    s.add_argument("--data", required=True)
    s.add_argument("--tol", type=float, default=1e-4)
    s.add_argument("--min-pass", type=float, default=0.99)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("materials", help="material database")
    s.add_argument("action", choices=["list"])
    s.add_argument("--config")
    s.set_defaults(func=cmd_materials)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
