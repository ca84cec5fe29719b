"""Partial-wave (global matrix) characteristic determinant.

An independent check on the collocation eigenvalues: the field in each
medium is written as a sum of plane partial waves and the eight continuity
conditions at y = -d and y = +d give an 8x8 system in the amplitudes.  A
mode is a zero of its determinant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import brentq

from .assembly import RadiationCase
from .materials import Material, TriLayerSystem
from .modes import select_branch


class NoConvergenceError(RuntimeError):
    pass


def is_branch_point(k_y: complex, tol: float = 1e-12) -> bool:
    return abs(k_y) < tol


def _wave_rows(m: Material, k: complex, beta: complex, potential: str) -> np.ndarray:
    """(sigma_yy, sigma_xy, u_x, u_y) of a unit partial wave exp(i beta y')."""
    lam, mu = m.lam, m.mu
    if potential == "phi":
        return np.array([
            -(lam + 2 * mu) * beta**2 - lam * k**2,
            -2 * mu * k * beta,
            1j * k,
            1j * beta,
        ])
    return np.array([
        -2 * mu * k * beta,
        mu * (beta**2 - k**2),
        -1j * beta,
        1j * k,
    ])


@dataclass
class PartialWaveBasis:
    omega: float
    k_x: complex
    k_y: dict[str, complex]
    branch_points: list[str]
    matrix: np.ndarray
    amplitude_vector: Optional[np.ndarray] = None


def _kinds(kinds) -> dict[str, str]:
    if isinstance(kinds, RadiationCase):
        return kinds.kinds()
    return dict(kinds)


def partial_wave_basis(
    system: TriLayerSystem, omega: float, k_x: complex, kinds: Mapping[str, str] | RadiationCase
) -> PartialWaveBasis:
    """Unscaled 8x8 continuity matrix.

    Columns: guide phi (up, down), guide psi (up, down), side_a phi, psi,
    side_b phi, psi.  Rows: normal stress, shear stress, u_x, u_y at y = -d
    then at y = +d.  Guide waves are referenced to the interface they decay
    away from so no entry overflows.
    """
    kinds = _kinds(kinds)
    k = complex(k_x)
    d = system.d
    g, a, b = system.guide, system.side_a, system.side_b

    def guide_root(c):
        r = cmath.sqrt((omega / c) ** 2 - k * k)
        return -r if r.imag < 0 else r

    p, q = guide_root(g.c_l), guide_root(g.c_t)
    k_y = {
        "guide_l": p,
        "guide_t": q,
        "phi_a": select_branch((omega / a.c_l) ** 2 - k * k, kinds["phi_a"]),
        "psi_a": select_branch((omega / a.c_t) ** 2 - k * k, kinds["psi_a"]),
        "phi_b": select_branch((omega / b.c_l) ** 2 - k * k, kinds["phi_b"]),
        "psi_b": select_branch((omega / b.c_t) ** 2 - k * k, kinds["psi_b"]),
    }
    mat = np.zeros((8, 8), dtype=complex)
    ep, eq = cmath.exp(2j * p * d), cmath.exp(2j * q * d)
    # guide: exp(i p (y + d)) and exp(-i p (y - d)), same for q
    guide_cols = [
        (p, "phi", 1.0, ep),
        (-p, "phi", ep, 1.0),
        (q, "psi", 1.0, eq),
        (-q, "psi", eq, 1.0),
    ]
    for j, (beta, pot, at_minus, at_plus) in enumerate(guide_cols):
        rows = _wave_rows(g, k, beta, pot)
        mat[:4, j] = rows * at_minus
        mat[4:, j] = rows * at_plus
    # half-spaces enter with a minus sign (guide minus half-space)
    mat[:4, 4] = -_wave_rows(a, k, -k_y["phi_a"], "phi")
    mat[:4, 5] = -_wave_rows(a, k, -k_y["psi_a"], "psi")
    mat[4:, 6] = -_wave_rows(b, k, k_y["phi_b"], "phi")
    mat[4:, 7] = -_wave_rows(b, k, k_y["psi_b"], "psi")
    bp = [name for name, v in k_y.items() if is_branch_point(v)]
    return PartialWaveBasis(omega, k, k_y, bp, mat)


def determinant_scales(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column then row 2-norm scalings that make the determinant <= 1."""
    col = np.linalg.norm(mat, axis=0)
    col[col == 0] = 1.0
    scaled = mat / col[None, :]
    row = np.linalg.norm(scaled, axis=1)
    row[row == 0] = 1.0
    return 1.0 / col, 1.0 / row


def characteristic_determinant(
    system: TriLayerSystem,
    omega: float,
    k_x: complex,
    kinds: Mapping[str, str] | RadiationCase,
    scales: Optional[tuple[np.ndarray, np.ndarray]] = None,
    scaled: bool = True,
) -> complex:
    """Determinant of the continuity matrix.

    With ``scaled=True`` the matrix is column- then row-normalised so that
    |D| <= 1 and thresholds on |D| are dimensionless.  Passing ``scales``
    freezes the normalisation, which keeps D analytic in k_x.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    mat = partial_wave_basis(system, omega, k_x, kinds).matrix
    if scaled:
        cs, rs = determinant_scales(mat) if scales is None else scales
        mat = rs[:, None] * mat * cs[None, :]
    return complex(np.linalg.det(mat))


def _potential_rows(m: Material, k: complex, f, df, ddf, potential: str) -> np.ndarray:
    """(sigma_yy, sigma_xy, u_x, u_y) of a potential with values f, f', f''."""
    lam, mu = m.lam, m.mu
    if potential == "phi":
        return np.array([(lam + 2 * mu) * ddf - lam * k**2 * f, 2j * mu * k * df, 1j * k * f, df])
    return np.array([2j * mu * k * df, -mu * (ddf + k**2 * f), -df, 1j * k * f])


def symmetric_determinants(
    system: TriLayerSystem, omega: float, k_x: complex, kinds: Mapping[str, str] | RadiationCase
) -> tuple[complex, complex]:
    """Unscaled 4x4 determinants of the symmetric and antisymmetric families.

    Only meaningful for a mirror-symmetric system.  Conditions are imposed
    at y = +d with guide potentials cos/sin in y; for the symmetric family
    phi is even and psi odd, for the antisymmetric family the reverse.
    """
    if not system.is_symmetric:
        raise ValueError("symmetric_determinants needs identical outer layers")
    basis = partial_wave_basis(system, omega, k_x, kinds)
    k, d, g, b = basis.k_x, system.d, system.guide, system.side_b
    p, q = basis.k_y["guide_l"], basis.k_y["guide_t"]
    cp, sp, cq, sq = cmath.cos(p * d), cmath.sin(p * d), cmath.cos(q * d), cmath.sin(q * d)
    outer = np.column_stack([
        -_wave_rows(b, k, basis.k_y["phi_b"], "phi"),
        -_wave_rows(b, k, basis.k_y["psi_b"], "psi"),
    ])
    sym = np.column_stack([
        _potential_rows(g, k, cp, -p * sp, -p * p * cp, "phi"),
        _potential_rows(g, k, sq, q * cq, -q * q * sq, "psi"),
        outer,
    ])
    anti = np.column_stack([
        _potential_rows(g, k, sp, p * cp, -p * p * sp, "phi"),
        _potential_rows(g, k, cq, -q * sq, -q * q * cq, "psi"),
        outer,
    ])
    return complex(np.linalg.det(sym)), complex(np.linalg.det(anti))


def refine_root(
    system: TriLayerSystem,
    omega: float,
    k_seed: complex,
    kinds: Mapping[str, str] | RadiationCase,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> complex:
    """Newton iteration on the determinant, started from ``k_seed``.

    The scaling is frozen at the seed; the derivative is a central
    difference.  Raises :class:`NoConvergenceError` on divergence.
    """
    kinds = _kinds(kinds)
    k = complex(k_seed)
    scales = determinant_scales(partial_wave_basis(system, omega, k, kinds).matrix)

    def f(z):
        return characteristic_determinant(system, omega, z, kinds, scales=scales)

    for _ in range(max_iter):
        h = 1e-7 * max(abs(k), 1e-3)
        fk = f(k)
        if fk == 0:
            return k
        df = (f(k + h) - f(k - h)) / (2 * h)
        if df == 0 or not np.isfinite(df):
            raise NoConvergenceError(f"zero derivative at k={k}")
        step = fk / df
        k -= step
        if not np.isfinite(k) or abs(k) > 1e8:
            raise NoConvergenceError("Newton iteration diverged")
        if abs(step) <= tol * abs(k):
            return k
    raise NoConvergenceError(f"no convergence from seed {k_seed} in {max_iter} iterations")


def mode_amplitudes(system: TriLayerSystem, omega: float, k_x: complex, kinds) -> PartialWaveBasis:
    """Partial-wave amplitudes spanning the (near) null space at a root."""
    basis = partial_wave_basis(system, omega, k_x, kinds)
    cs, rs = determinant_scales(basis.matrix)
    _, _, vh = np.linalg.svd(rs[:, None] * basis.matrix * cs[None, :])
    basis.amplitude_vector = vh[-1].conj() * cs
    return basis


def evaluate_fields(basis: PartialWaveBasis, system: TriLayerSystem, grids) -> dict[str, np.ndarray]:
    """Sample the partial-wave solution on collocation grids.

    Returns the six blocks (phi_a, psi_a, u_x, u_y, phi_b, psi_b).  Half-space
    potentials are continued analytically onto the (possibly complex)
    mapped coordinates; at the point at infinity they are zero.
    """
    amp = basis.amplitude_vector
    k = basis.k_x
    d = system.d
    p, q = basis.k_y["guide_l"], basis.k_y["guide_t"]
    y = grids["guide"].y
    up, dn = np.exp(1j * p * (y + d)), np.exp(-1j * p * (y - d))
    uq, dq = np.exp(1j * q * (y + d)), np.exp(-1j * q * (y - d))
    phi = amp[0] * up + amp[1] * dn
    dphi = 1j * p * (amp[0] * up - amp[1] * dn)
    psi = amp[2] * uq + amp[3] * dq
    dpsi = 1j * q * (amp[2] * uq - amp[3] * dq)
    out = {"u_x": 1j * k * phi - dpsi, "u_y": dphi + 1j * k * psi}

    for name, col, sign in (("phi_a", 4, -1), ("psi_a", 5, -1), ("phi_b", 6, 1), ("psi_b", 7, 1)):
        gr = grids[name]
        ky = basis.k_y[name]
        vals = np.zeros(gr.n_points, dtype=complex)
        fin = gr.finite
        vals[fin] = amp[col] * np.exp(1j * ky * sign * (gr.y[fin] - sign * d))
        out[name] = vals
    return out


# free plate


def _plate_parts(guide: Material, d: float, omega: float, k):
    k = np.asarray(k, dtype=complex)
    p2 = (omega / guide.c_l) ** 2 - k**2
    q2 = (omega / guide.c_t) ** 2 - k**2

    def cs(z2):
        r = np.sqrt(z2)
        small = np.abs(r) < 1e-12
        r_safe = np.where(small, 1.0, r)
        sinc = np.where(small, d, np.sin(r_safe * d) / r_safe)
        return np.cos(r * d), sinc

    cp, sp = cs(p2)
    cq, sq = cs(q2)
    return k**2, p2, q2, cp, sp, cq, sq


def rayleigh_lamb_function(guide: Material, d: float, omega: float, k, symmetry: str):
    """Real-valued Rayleigh-Lamb dispersion function of a free plate.

    Written with cos(x d) and sin(x d)/x, which are entire in x**2, so the
    value is real for real k on both sides of the bulk wavenumbers.
    Normalised by k_t**4.
    """
    k2, p2, q2, cp, sp, cq, sq = _plate_parts(guide, d, omega, k)
    a = (q2 - k2) ** 2
    if symmetry == "S":
        f = a * cp * sq + 4 * k2 * p2 * sp * cq
    elif symmetry == "A":
        f = a * sp * cq + 4 * k2 * q2 * cp * sq
    else:
        raise ValueError("symmetry must be 'S' or 'A'")
    return np.real(f) / (omega / guide.c_t) ** 4


def rayleigh_lamb_roots(
    guide: Material, d: float, omega: float, symmetry: str, n_scan: int = 4000, xtol: float = 1e-13
) -> list[float]:
    """Real wavenumbers of the free plate of thickness ``2 d``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    h = 2 * d
    e_mod = guide.mu * (3 * guide.lam + 2 * guide.mu) / (guide.lam + guide.mu)
    nu = guide.poisson_ratio
    bending = e_mod * h**3 / (12 * (1 - nu**2))
    k_flex = (omega**2 * guide.rho * h / bending) ** 0.25
    k_max = 2.0 * max(omega / (0.5 * guide.c_t), k_flex)
    ks = np.linspace(k_max * 1e-6, k_max, n_scan)
    f = rayleigh_lamb_function(guide, d, omega, ks, symmetry)

    def g(x):
        return float(rayleigh_lamb_function(guide, d, omega, x, symmetry))

    roots = []
    for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]:
        r = brentq(g, ks[i], ks[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)
        roots.append(r)
    return roots
