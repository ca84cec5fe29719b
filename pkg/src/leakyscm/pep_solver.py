"""Companion linearisation and dense solution of the quadratic eigenproblem."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

from .assembly import PEPMatrices

log = logging.getLogger(__name__)

DEFAULT_GUARD = 1e8


class SolverError(RuntimeError):
    def __init__(self, message, omega=None, case=None):
        super().__init__(message)
        self.omega = omega
        self.case = case


class DegenerateProblemError(SolverError):
    pass


@dataclass
class EigenPair:
    k_x: complex
    vector: np.ndarray
    backward_error: float


def coefficient_norms(pep: PEPMatrices) -> tuple[float, float, float]:
    norms = getattr(pep, "_norms", None)
    if norms is None:
        norms = tuple(float(np.linalg.norm(m, 2)) for m in (pep.l0, pep.l1, pep.l2))
        pep._norms = norms
    return norms


def backward_error(pep: PEPMatrices, k: complex, v: np.ndarray) -> float:
    n0, n1, n2 = coefficient_norms(pep)
    res = np.linalg.norm(pep.evaluate(k) @ v)
    denom = (abs(k) ** 2 * n2 + abs(k) * n1 + n0) * np.linalg.norm(v)
    return float(res / denom)


def _normalise(v: np.ndarray) -> np.ndarray:
    i = np.argmax(np.abs(v))
    return v / v[i]


def _companion_pencil(pep: PEPMatrices) -> tuple[np.ndarray, np.ndarray]:
    n = pep.size
    eye = np.eye(n)
    zero = np.zeros((n, n))
    a = np.block([[-pep.l1, -pep.l0], [eye, zero]])
    b = np.block([[pep.l2, zero], [zero, eye]])
    return a, b


def _solve_pencil(pep: PEPMatrices, guard: float):
    n = pep.size
    a, b = _companion_pencil(pep)
    w, vr = sla.eig(a, b, homogeneous_eigvals=True)
    alpha, beta = w
    out = []
    for j in range(2 * n):
        if abs(beta[j]) <= abs(alpha[j]) / guard:
            continue
        k = alpha[j] / beta[j]
        # eigenvector of the first companion form is [k v; v]
        out.append((k, vr[n:, j]))
    return out


def _default_shift(pep: PEPMatrices) -> complex:
    # a point unlikely to coincide with an eigenvalue, scaled to the problem
    n0, n1, n2 = coefficient_norms(pep)
    if n0 > 0 and n2 > 0:
        scale = np.sqrt(n0 / n2)
    elif n0 > 0 and n1 > 0:
        scale = n0 / n1
    elif n1 > 0 and n2 > 0:
        scale = n1 / n2
    else:
        scale = 1.0
    return complex(0.37 * scale, 0.61 * scale)


def shifted_eigenvalues(pep: PEPMatrices, guard: float = DEFAULT_GUARD, shift: Optional[complex] = None) -> np.ndarray:
    """Finite eigenvalues via a Mobius-shifted companion matrix.

    Writing k = shift + 1/m turns the quadratic into one in m whose leading
    coefficient P(shift) is non-singular, so a standard (not generalised)
    eigensolver applies.  Infinite eigenvalues map to m = 0.
    """
    n = pep.size
    sigma = _default_shift(pep) if shift is None else complex(shift)
    lu = sla.lu_factor(pep.evaluate(sigma), check_finite=False)
    m1 = sla.lu_solve(lu, pep.derivative(sigma), check_finite=False)
    m0 = sla.lu_solve(lu, pep.l2, check_finite=False)
    comp = np.zeros((2 * n, 2 * n), dtype=complex)
    comp[:n, :n] = -m1
    comp[:n, n:] = -m0
    comp[n:, :n] = np.eye(n)
    mu = sla.eigvals(comp, check_finite=False, overwrite_a=True)
    keep = np.abs(mu) * guard > 1.0
    return sigma + 1.0 / mu[keep]


def eigenvector_at(
    pep: PEPMatrices, k: complex, polish_tol: float = 1e-14, max_iter: int = 4
) -> tuple[complex, np.ndarray, float]:
    """Polished eigenvalue and right eigenvector near ``k``.

    Two-sided inverse iteration with the LU of P(k); between factorisations
    the eigenvalue takes the Newton step dk = -(w^H P v) / (w^H P' v).  At
    least one Newton step is always taken: a small backward error alone
    does not mean Im(k) is free of eigensolver noise.
    """
    n = pep.size
    rng = np.random.default_rng(1234)
    start = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    best = latest = None
    for it in range(max_iter):
        mat = pep.evaluate(k)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", (sla.LinAlgWarning, RuntimeWarning))
            lu = sla.lu_factor(mat, check_finite=False)
            if np.any(lu[0].diagonal() == 0):
                # an exact eigenvalue: nudge off it so the solve stays finite
                lu = sla.lu_factor(pep.evaluate(k + 1e-14 * max(abs(k), 1.0)), check_finite=False)
            v = sla.lu_solve(lu, start, check_finite=False)
            v = sla.lu_solve(lu, v / np.linalg.norm(v), check_finite=False)
        if not np.all(np.isfinite(v)):
            break
        v /= np.linalg.norm(v)
        err = backward_error(pep, k, v)
        latest = (k, v, err)
        if best is None or err < best[2]:
            best = latest
        if (it > 0 and err < polish_tol) or it == max_iter - 1:
            break
        w = sla.lu_solve(lu, start, trans=2, check_finite=False)
        den = np.vdot(w, pep.derivative(k) @ v)
        if not np.isfinite(den) or den == 0:
            break
        step = np.vdot(w, mat @ v) / den
        k = k - step
        if abs(step) <= 1e-15 * abs(k):
            break
    if best is None:
        raise SolverError(f"inverse iteration failed at k={k}", pep.omega)
    # the last iterate unless polishing made things clearly worse
    k, v, err = latest if latest[2] <= max(100 * best[2], polish_tol) else best
    return complex(k), _normalise(v), err


def solve_pep(
    pep: PEPMatrices,
    guard: float = DEFAULT_GUARD,
    method: str = "shifted",
    select: Optional[Callable[[complex], bool]] = None,
    polish: bool = True,
) -> list[EigenPair]:
    """All finite eigenpairs of the quadratic problem.

    ``method="pencil"`` runs QZ on the first companion pencil
    A = [[-L1, -L0], [I, 0]], B = [[L2, 0], [0, I]].  ``method="shifted"``
    (default) uses :func:`shifted_eigenvalues` and computes eigenvectors
    only for eigenvalues accepted by ``select``, which is several times
    faster for the 6N-sized problems met in a sweep.
    """
    ctx = dict(omega=pep.omega, case=pep.case.label if pep.case is not None else None)
    try:
        if method == "pencil":
            raw = _solve_pencil(pep, guard)
        elif method == "shifted":
            raw = [(k, None) for k in shifted_eigenvalues(pep, guard)]
        else:
            raise ValueError(f"unknown method {method!r}")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"eigensolver failed: {exc}", **ctx) from exc

    raw = [(k, v) for k, v in raw if np.isfinite(k) and abs(k) < guard]
    if not raw:
        raise DegenerateProblemError("no finite eigenvalues", **ctx)

    pairs = []
    for k, v in raw:
        if select is not None and not select(k):
            continue
        if v is None or polish:
            k, v, err = eigenvector_at(pep, k)
        else:
            v = _normalise(v)
            err = backward_error(pep, k, v)
        pairs.append(EigenPair(complex(k), v, err))
    return pairs
