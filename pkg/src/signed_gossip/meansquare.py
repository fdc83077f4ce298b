"""Second-moment analysis: the exact operator E[W' (I - 11'/n) W] assembled
arc by arc, and the sufficient mean-square convergence / divergence tests
built on its extreme eigenvalues."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import GainRangeError
from .graphs import ARC_ATT, ARC_REP, SignedGraph
from .schedules import Schedule
from .spectral import DEFAULT_TOLERANCES, Tolerances, sym_eigenvalues

CONVERGES_SUFFICIENT = "ConvergesSufficient"
DIVERGES_SUFFICIENT = "DivergesSufficient"
INCONCLUSIVE = "Inconclusive"

CLASSIFY_TOL = 1e-9


@dataclass(frozen=True)
class SecondMomentReport:
    """Spectral summary of the one-step second-moment operator.

    lambda2_full is the second entry of the descending spectrum;
    lambda2_restricted is the smallest eigenvalue of the operator restricted
    to the zero-mean subspace, which is the constant in the lower bound
    lambda2 |y|^2 <= E|y+|^2 and therefore what the divergence test uses.
    The two coincide for n = 3. Both tests are sufficient only, so
    Inconclusive is a first-class outcome.
    """

    operator: np.ndarray | None
    lambda_max: float | None
    lambda2_full: float | None
    lambda2_restricted: float | None
    classification: str
    convergence_log_sums: np.ndarray | None = None
    divergence_log_sums: np.ndarray | None = None
    finite_horizon_only: bool = field(default=False)

    def to_json_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "lambda2_full": self.lambda2_full,
            "lambda2_restricted": self.lambda2_restricted,
            "classification": self.classification,
        }


def second_moment_operator(g: SignedGraph, alpha: float, beta: float) -> np.ndarray:
    """Exact E[W' (I - 11'/n) W] as the probability-weighted sum over all
    arc realizations, assembled through rank-two updates per arc."""
    if not 0.0 <= alpha <= 1.0:
        raise GainRangeError("alpha must lie in [0, 1]")
    if beta < 0.0:
        raise GainRangeError("beta must be nonnegative")
    n = g.n
    s = np.full((n, n), -1.0 / n)
    np.fill_diagonal(s, 1.0 - 1.0 / n)

    src = np.concatenate([g.att_src, g.rep_src])
    dst = np.concatenate([g.att_dst, g.rep_dst])
    wn = np.concatenate([g.att_w, g.rep_w]) / n
    coefs = np.concatenate([
        np.full(len(g.att_w), -float(alpha)),
        np.full(len(g.rep_w), float(beta)),
    ])
    kernels.second_moment_accum(s, src, dst, wn, coefs)
    return 0.5 * (s + s.T)


def zero_mean_basis(n: int) -> np.ndarray:
    """Orthonormal basis (rows) of the subspace orthogonal to the all-ones
    vector, in the classic Helmert arrangement."""
    h = np.zeros((n - 1, n))
    for k in range(1, n):
        h[k - 1, :k] = 1.0
        h[k - 1, k] = -float(k)
        h[k - 1] /= math.sqrt(k * (k + 1.0))
    return h


def _spectrum_summary(s: np.ndarray, tol: Tolerances):
    full = sym_eigenvalues(s, tol)
    n = s.shape[0]
    h = zero_mean_basis(n)
    restricted = sym_eigenvalues(h @ s @ h.T, tol)
    lam_max = full.lambda_max
    lam2_full = full.lambda_2
    lam2_restricted = float(restricted.eigenvalues[0])
    return lam_max, lam2_full, lam2_restricted


def _classify(lam_max: float, lam2_restricted: float) -> str:
    if lam_max < 1.0 - CLASSIFY_TOL:
        return CONVERGES_SUFFICIENT
    if lam2_restricted > 1.0 + CLASSIFY_TOL:
        return DIVERGES_SUFFICIENT
    return INCONCLUSIVE


def _tail_slope(partial_sums: np.ndarray) -> float:
    m = len(partial_sums)
    if m < 2:
        return 0.0
    half = m // 2
    if half == m - 1:
        half = m - 2
    return float((partial_sums[-1] - partial_sums[half]) / (m - 1 - half))


def ms_classify(g: SignedGraph, schedule: Schedule,
                horizon: int | None = None,
                slope_eps: float = 1e-8,
                tol: Tolerances = DEFAULT_TOLERANCES) -> SecondMomentReport:
    """Sufficient mean-square classification.

    Constant gains compare the operator's extreme eigenvalues against 1.
    Time-varying gains produce finite-horizon partial log sums of the
    per-step lambda_max (convergence direction) and restricted lambda2
    (divergence direction) series; their tail slopes stand in for the
    infinite products, which is a diagnostic, not a proof.
    """
    if schedule.is_constant:
        s = second_moment_operator(g, float(schedule.alpha), float(schedule.beta))
        lam_max, lam2_full, lam2_r = _spectrum_summary(s, tol)
        return SecondMomentReport(
            operator=s,
            lambda_max=lam_max,
            lambda2_full=lam2_full,
            lambda2_restricted=lam2_r,
            classification=_classify(lam_max, lam2_r),
        )
    if horizon is None or horizon < 1:
        raise ValueError("a positive horizon is required for time-varying gains")
    alphas = schedule.alpha_values(horizon)
    betas = schedule.beta_values(horizon)
    conv_logs = np.empty(horizon)
    div_logs = np.empty(horizon)
    for k in range(horizon):
        s = second_moment_operator(g, alphas[k], betas[k])
        lam_max, _lam2_full, lam2_r = _spectrum_summary(s, tol)
        conv_logs[k] = math.log(max(lam_max, 1e-300))
        div_logs[k] = math.log(max(lam2_r, 1e-300))
    conv_sums = np.cumsum(conv_logs)
    div_sums = np.cumsum(div_logs)
    if _tail_slope(conv_sums) < -slope_eps:
        label = CONVERGES_SUFFICIENT
    elif _tail_slope(div_sums) > slope_eps:
        label = DIVERGES_SUFFICIENT
    else:
        label = INCONCLUSIVE
    return SecondMomentReport(
        operator=None,
        lambda_max=None,
        lambda2_full=None,
        lambda2_restricted=None,
        classification=label,
        convergence_log_sums=conv_sums,
        divergence_log_sums=div_sums,
        finite_horizon_only=True,
    )
