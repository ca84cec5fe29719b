"""Chebyshev collocation grids and mapped differentiation matrices.

The guide is discretised with a linear map of the Gauss-Lobatto points onto
[-d, d].  Each half-space uses the rational map

    side_b:  y =  d + zeta (1 + s) / (1 - s)
    side_a:  y = -d - zeta (1 - s) / (1 + s)

which sends one endpoint onto the interface and the other to infinity.  A
complex ``zeta`` turns the half-line into a ray in the complex plane on which
outgoing, physically growing partial waves decay.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import toeplitz


class GridError(ValueError):
    pass


def cheb_diff_matrices(n: int, order: int = 2) -> tuple[np.ndarray, list[np.ndarray]]:
    """Gauss-Lobatto points (increasing) and differentiation matrices.

    Follows the Weideman-Reddy construction: trigonometric identities for
    the point differences, the flipping trick for centro-symmetry and the
    negative-sum trick for the diagonal.
    """
    if n < 2:
        raise GridError("need at least two collocation points")
    nm1 = n - 1
    n1, n2 = n // 2, (n + 1) // 2
    k = np.arange(n)
    th = k * np.pi / nm1
    x = np.sin(np.pi * np.arange(nm1, -n, -2) / (2 * nm1))  # decreasing, 1 .. -1

    t = np.tile(th / 2, (n, 1)).T  # t[i, j] = th[i] / 2
    dx = 2 * np.sin(t.T + t) * np.sin(t.T - t)
    dx = np.vstack([dx[:n1], -np.flipud(np.fliplr(dx[:n2]))])
    dx[k, k] = 1.0

    c = toeplitz((-1.0) ** k)
    c[0, :] *= 2
    c[-1, :] *= 2
    c[:, 0] /= 2
    c[:, -1] /= 2

    z = 1.0 / dx
    z[k, k] = 0.0

    mats = []
    d = np.eye(n)
    for ell in range(1, order + 1):
        d = ell * z * (c * np.tile(np.diag(d), (n, 1)).T - d)
        d[k, k] = -d.sum(axis=1)
        mats.append(d)

    # reorder to increasing s = -cos((i-1) pi / (N-1))
    s = x[::-1].copy()
    mats = [m[::-1, ::-1].copy() for m in mats]
    return s, mats


@dataclass(frozen=True)
class ReferenceGrid:
    n_points: int
    s: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def reference_grid(n: int) -> ReferenceGrid:
    if n < 3:
        raise GridError(f"n={n}: at least 3 collocation points are required")
    s, (d1, d2) = cheb_diff_matrices(n, 2)
    for a in (s, d1, d2):
        a.setflags(write=False)
    return ReferenceGrid(n, s, d1, d2)


@dataclass(frozen=True)
class MappedGrid:
    """Collocation points and differentiation matrices on a physical domain.

    ``y[infinity_index]`` is stored as ``inf``; the chain-rule metric there
    is exactly zero so the matrices stay finite.
    """

    side: str
    zeta: complex
    y: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    interface_index: int
    infinity_index: Optional[int]
    s: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.y)

    @property
    def finite(self) -> np.ndarray:
        mask = np.ones(len(self.y), dtype=bool)
        if self.infinity_index is not None:
            mask[self.infinity_index] = False
        return mask


def map_guide(ref: ReferenceGrid, d: float) -> MappedGrid:
    if d <= 0:
        raise GridError("half thickness must be positive")
    return MappedGrid(
        side="guide",
        zeta=complex(d),
        y=(d * ref.s).astype(complex),
        d1=ref.d1 / d + 0j,
        d2=ref.d2 / d**2 + 0j,
        interface_index=0,
        infinity_index=None,
        s=ref.s,
    )


def half_space_metric(s: np.ndarray, side: str, zeta: complex) -> tuple[np.ndarray, np.ndarray]:
    """ds/dy and d2s/dy2 of the rational map, written in terms of s.

    For side_b these equal 2 zeta / (zeta + y - d)**2 and
    -4 zeta / (zeta + y - d)**3; writing them in s keeps the infinite
    endpoint finite (both vanish there).
    """
    zeta = complex(zeta)
    if side == "side_b":
        w = 1.0 - s
        return w**2 / (2 * zeta), -(w**3) / (2 * zeta**2)
    if side == "side_a":
        w = 1.0 + s
        return w**2 / (2 * zeta), w**3 / (2 * zeta**2)
    raise GridError(f"unknown half-space side {side!r}")


def map_half_space(ref: ReferenceGrid, side: str, d: float, zeta: complex) -> MappedGrid:
    zeta = complex(zeta)
    if zeta == 0:
        raise GridError("zeta must be non-zero")
    if zeta.real < 0:
        raise GridError("zeta must have a non-negative real part")
    s = ref.s
    n = len(s)
    y = np.empty(n, dtype=complex)
    if side == "side_b":
        iface, inf_idx = 0, n - 1
        y[:-1] = d + zeta * (1 + s[:-1]) / (1 - s[:-1])
        y[iface] = d
    elif side == "side_a":
        iface, inf_idx = n - 1, 0
        y[1:] = -d - zeta * (1 - s[1:]) / (1 + s[1:])
        y[iface] = -d
    else:
        raise GridError(f"unknown half-space side {side!r}")
    y[inf_idx] = np.inf

    m1, m2 = half_space_metric(s, side, zeta)
    m1[inf_idx] = 0.0
    m2[inf_idx] = 0.0
    d1 = m1[:, None] * ref.d1
    d2 = m2[:, None] * ref.d1 + (m1**2)[:, None] * ref.d2
    return MappedGrid(side, zeta, y, d1, d2, iface, inf_idx, s)


def barycentric_weights(n: int) -> np.ndarray:
    """Barycentric weights of the Gauss-Lobatto points."""
    w = (-1.0) ** np.arange(n)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def interpolate(s_nodes: np.ndarray, values: np.ndarray, s_eval: np.ndarray) -> np.ndarray:
    """Barycentric interpolation from Gauss-Lobatto nodes to ``s_eval``."""
    w = barycentric_weights(len(s_nodes))
    s_eval = np.atleast_1d(np.asarray(s_eval, dtype=float))
    diff = s_eval[:, None] - s_nodes[None, :]
    exact = diff == 0
    diff[exact] = 1.0
    c = w / diff
    out = (c @ values) / c.sum(axis=1)
    rows, cols = np.nonzero(exact)
    out[rows] = values[cols]
    return out
