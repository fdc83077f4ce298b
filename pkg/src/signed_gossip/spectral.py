"""Dense spectral primitives: symmetric eigendecomposition by cyclic Jacobi
rotations, a general spectral radius via normalized repeated squaring, matrix
commutators, and the eigenvalue upper bound for the projected mean update of
a symmetric partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import (
    DimensionError,
    GainRangeError,
    NoConvergenceError,
    NotSymmetricError,
)
from .graphs import SignedGraph


@dataclass(frozen=True)
class Tolerances:
    """Central numeric tolerance record; pass a tightened copy to override."""

    symmetry: float = 1e-10          # accepted |M - M'| inf-norm for symmetric input
    jacobi_off_rel: float = 1e-12    # off-diagonal Frobenius target, relative to |M|_F
    jacobi_max_sweeps: int = 60
    radius_rel: float = 1e-10        # successive-estimate stop for spectral_radius
    radius_max_squarings: int = 60
    critical_band: float = 1e-7      # |f - 1| width reported as Critical


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class SpectrumResult:
    """Full real spectrum of a symmetric matrix.

    eigenvalues are sorted ascending; lambda_2 is the second largest
    counting multiplicity; residual is max |M v - lambda v| over the
    computed eigenpairs.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    lambda_max: float
    lambda_2: float
    residual: float


def _inf_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.abs(m).sum(axis=1).max())


def sym_eigenvalues(m, tol: Tolerances = DEFAULT_TOLERANCES) -> SpectrumResult:
    """Full spectrum of a symmetric real matrix via cyclic Jacobi rotations.

    Raises NotSymmetricError when |M - M'| exceeds the symmetry tolerance
    and NoConvergenceError when the sweep cap is hit before the off-diagonal
    norm falls under jacobi_off_rel * |M|_F.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError("expected a square matrix")
    if _inf_norm(m - m.T) > tol.symmetry:
        raise NotSymmetricError("matrix is not symmetric within tolerance")
    n = m.shape[0]
    a = 0.5 * (m + m.T)
    v = np.eye(n)
    off_tol = tol.jacobi_off_rel * float(np.linalg.norm(a))
    off, _sweeps = kernels.jacobi_sweeps(a, v, off_tol, tol.jacobi_max_sweeps)
    if off > off_tol:
        raise NoConvergenceError(
            f"Jacobi sweeps stalled at off-diagonal norm {off!r}"
        )
    d = np.diagonal(a).copy()
    order = np.argsort(d, kind="stable")
    eigenvalues = d[order]
    eigenvectors = v[:, order]
    residual = float(np.abs(m @ eigenvectors - eigenvectors * eigenvalues).max()) if n else 0.0
    lam_max = float(eigenvalues[-1])
    lam_2 = float(eigenvalues[-2]) if n >= 2 else lam_max
    return SpectrumResult(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        lambda_max=lam_max,
        lambda_2=lam_2,
        residual=residual,
    )


def spectral_radius(m, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Largest eigenvalue magnitude of a general real matrix.

    Uses Gelfand's limit with normalized repeated squaring,
    rho = lim |M^(2^k)|^(1/2^k), tracked in log scale so overflow cannot
    occur; correct for complex-pair spectra where plain power iteration
    oscillates. Raises NoConvergenceError when the squaring cap is reached
    before two successive estimates agree to radius_rel.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError("expected a square matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if m.shape[0] == 0:
        return 0.0
    b = m.copy()
    log_scale = 0.0
    power = 1
    est = None
    for _ in range(tol.radius_max_squarings):
        nrm = float(np.linalg.norm(b))
        if nrm == 0.0:
            return 0.0
        cur = math.exp((log_scale + math.log(nrm)) / power)
        if est is not None:
            if abs(cur - est) <= tol.radius_rel * max(cur, est) or max(cur, est) < 1e-290:
                return cur
        est = cur
        log_scale += math.log(nrm)
        b = (b / nrm) @ (b / nrm)
        power *= 2
        log_scale *= 2
    raise NoConvergenceError("spectral radius estimates did not stabilize")


def commutator_norm(a, b) -> float:
    """Inf-norm (max absolute row sum) of the commutator AB - BA."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("expected square matrices")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return _inf_norm(a @ b - b @ a)


def weyl_bound(g: SignedGraph, alpha: float, beta: float,
               tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Eigenvalue upper bound on the projected mean update for symmetric
    partitions: 1 - (alpha/n) * lambda_2asc(L_att) + (beta/n) * lambda_max(L_rep),
    where lambda_2asc is the second smallest attraction-Laplacian eigenvalue
    (the algebraic connectivity; 0 when the attraction graph is disconnected).

    Never smaller than the exact projected spectral radius for symmetric
    p_att and p_rep, by Weyl's inequality on the two Laplacian terms.
    """
    if not 0.0 <= alpha <= 1.0:
        raise GainRangeError("alpha must lie in [0, 1]")
    if beta < 0.0:
        raise GainRangeError("beta must be nonnegative")
    if _inf_norm(g.p_att - g.p_att.T) > tol.symmetry or \
            _inf_norm(g.p_rep - g.p_rep.T) > tol.symmetry:
        raise NotSymmetricError("weyl_bound needs symmetric p_att and p_rep")
    lam2_att = float(sym_eigenvalues(g.l_att, tol).eigenvalues[1])
    lam_max_rep = sym_eigenvalues(g.l_rep, tol).lambda_max
    n = g.n
    return 1.0 - (alpha / n) * lam2_att + (beta / n) * lam_max_rep
