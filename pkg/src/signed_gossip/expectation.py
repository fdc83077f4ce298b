"""Mean-update analysis: the averaged one-step operator, its projected
spectral radius f(alpha, beta), convergence classification, and the
phase-transition threshold in the repulsion gain (bisection plus the closed
form for uniformly weighted complete graphs, and the Erdos-Renyi density
threshold alpha/(alpha+beta))."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyRepulsiveError,
    GainRangeError,
    HypothesisError,
    NoConvergenceError,
    NotCompleteUniformError,
    NotSymmetricError,
)
from .graphs import SignedGraph, connectivity, er_repulsive
from .rng import stream_key
from .schedules import Schedule
from .spectral import (
    DEFAULT_TOLERANCES,
    Tolerances,
    _inf_norm,
    spectral_radius,
    sym_eigenvalues,
    weyl_bound,
)

CONVERGES = "Converges"
DIVERGES = "Diverges"
CRITICAL = "Critical"

COMMUTE_TOL = 1e-10
_BRACKET_CAP = float(2 ** 60)


@dataclass(frozen=True)
class ExpectationReport:
    """Classification of the disagreement dynamics in expectation."""

    n: int
    alpha: float
    beta: float
    w_bar: np.ndarray
    f_value: float
    classification: str
    weyl_bound: float | None = None
    threshold_beta: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "f": self.f_value,
            "classification": self.classification,
            "weyl_bound": self.weyl_bound,
            "beta_star": self.threshold_beta,
        }


def _check_gains(alpha: float, beta: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise GainRangeError("alpha must lie in [0, 1]")
    if beta < 0.0:
        raise GainRangeError("beta must be nonnegative")


def mean_update(g: SignedGraph, alpha: float, beta: float) -> np.ndarray:
    """Averaged one-step update I - (alpha/n) L_att + (beta/n) L_rep.

    Row sums stay exactly 1 within floating-point tolerance because both
    Laplacians annihilate the all-ones vector.
    """
    _check_gains(alpha, beta)
    n = g.n
    return np.eye(n) - (alpha / n) * g.l_att + (beta / n) * g.l_rep


def project_disagreement(w_bar: np.ndarray) -> np.ndarray:
    """(I - 11'/n) @ w_bar without forming the projector explicitly."""
    return w_bar - w_bar.mean(axis=0)[None, :]


def f_rho(g: SignedGraph, alpha: float, beta: float,
          tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Spectral radius of the projected mean update; < 1 means the expected
    disagreement contracts, > 1 means it blows up for almost all starts."""
    return spectral_radius(project_disagreement(mean_update(g, alpha, beta)), tol)


def _symmetric_partition(g: SignedGraph, tol: Tolerances) -> bool:
    return (_inf_norm(g.p_att - g.p_att.T) <= tol.symmetry
            and _inf_norm(g.p_rep - g.p_rep.T) <= tol.symmetry)


def _threshold_hypotheses_ok(g: SignedGraph, tol: Tolerances) -> bool:
    if len(g.rep_src) == 0:
        return False
    if not connectivity(g).att_has_rooted_spanning_tree:
        return False
    if _symmetric_partition(g, tol):
        return True
    return _inf_norm(g.l_att @ g.l_rep - g.l_rep @ g.l_att) <= COMMUTE_TOL


def classify_expectation(g: SignedGraph, alpha: float, beta: float,
                         tol: Tolerances = DEFAULT_TOLERANCES,
                         compute_threshold: bool = True) -> ExpectationReport:
    """Full expectation report for constant gains.

    The classification uses a small critical band around f = 1 because the
    boundary case is genuinely unclassified. The eigenvalue bound is
    attached for symmetric partitions, the threshold when its structural
    hypotheses hold and alpha > 0.
    """
    _check_gains(alpha, beta)
    w_bar = mean_update(g, alpha, beta)
    f_value = spectral_radius(project_disagreement(w_bar), tol)
    if f_value < 1.0 - tol.critical_band:
        label = CONVERGES
    elif f_value > 1.0 + tol.critical_band:
        label = DIVERGES
    else:
        label = CRITICAL
    bound = None
    if _symmetric_partition(g, tol):
        bound = weyl_bound(g, alpha, beta, tol)
    beta_star = None
    if compute_threshold and alpha > 0.0 and _threshold_hypotheses_ok(g, tol):
        beta_star = threshold_beta(g, alpha, spectral_tol=tol)
    return ExpectationReport(
        n=g.n, alpha=float(alpha), beta=float(beta), w_bar=w_bar,
        f_value=f_value, classification=label,
        weyl_bound=bound, threshold_beta=beta_star,
    )


def threshold_beta(g: SignedGraph, alpha: float, tol: float = 1e-9,
                   spectral_tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Repulsion gain at which f(alpha, .) crosses 1, by bracketing from
    beta = 1 with doubling and then bisection to the requested width tol.

    Requires the structural hypotheses under which the crossing is unique:
    the attraction graph has a rooted spanning tree, the repulsive set is
    nonempty, and the two Laplacians commute or the partition is symmetric.
    """
    width = float(tol)
    if not 0.0 < alpha <= 1.0:
        raise GainRangeError("alpha must lie in (0, 1] for a threshold search")
    if len(g.rep_src) == 0:
        raise EmptyRepulsiveError(
            "no repulsive arcs: f stays below 1 for every beta"
        )
    if not connectivity(g).att_has_rooted_spanning_tree:
        raise HypothesisError("the attraction graph has no rooted spanning tree")
    if not (_symmetric_partition(g, spectral_tol)
            or _inf_norm(g.l_att @ g.l_rep - g.l_rep @ g.l_att) <= COMMUTE_TOL):
        raise HypothesisError(
            "threshold search needs commuting Laplacians or a symmetric partition"
        )

    def f(beta):
        return f_rho(g, alpha, beta, spectral_tol)

    lo = 0.0
    hi = 1.0
    while f(hi) <= 1.0:
        lo = hi
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise NoConvergenceError("no divergence bracket found below 2**60")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if f(mid) > 1.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def complete_graph_threshold(g: SignedGraph, alpha: float,
                             tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Closed-form threshold max{(n / ((n-1) lambda_max(L_rep)) - 1) alpha, 0}
    for the uniformly weighted complete graph with a bidirectional partition.
    """
    if not 0.0 <= alpha <= 1.0:
        raise GainRangeError("alpha must lie in [0, 1]")
    n = g.n
    expected = (np.ones((n, n)) - np.eye(n)) / (n - 1)
    if float(np.abs(g.p - expected).max()) > 1e-12:
        raise NotCompleteUniformError(
            "selection matrix is not the uniform complete graph"
        )
    if _inf_norm(g.p_rep - g.p_rep.T) > tol.symmetry:
        raise NotCompleteUniformError("partition is not bidirectional")
    if len(g.rep_src) == 0:
        raise EmptyRepulsiveError("no repulsive arcs: threshold undefined")
    if not connectivity(g).att_has_rooted_spanning_tree:
        raise HypothesisError("the attraction graph has no rooted spanning tree")
    lam_max_rep = sym_eigenvalues(g.l_rep, tol).lambda_max
    return max((n / ((n - 1) * lam_max_rep) - 1.0) * alpha, 0.0)


def er_threshold(alpha: float, beta: float) -> float:
    """Critical repulsion density alpha / (alpha + beta) for Erdos-Renyi
    repulsion over the uniform complete graph."""
    if not 0.0 < alpha <= 1.0:
        raise GainRangeError("alpha must lie in (0, 1]")
    if not beta > 0.0:
        raise GainRangeError("beta must be positive")
    return alpha / (alpha + beta)


def er_sweep(n: int, p_grid, alpha: float, beta: float, samples: int,
             seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Fraction of sampled Erdos-Renyi repulsion partitions whose projected
    mean update has spectral radius below 1, for each density in p_grid.

    Deterministic for a given seed: sample s of grid point i uses the
    derived stream (seed, i * samples + s).
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    _check_gains(alpha, beta)
    p_grid = [float(p) for p in p_grid]
    fractions = np.empty(len(p_grid))
    for pi, p in enumerate(p_grid):
        hits = 0
        for s in range(samples):
            sub_seed = stream_key(seed, pi * samples + s)
            graph = er_repulsive(n, p, sub_seed)
            if f_rho(graph, alpha, beta, tol) < 1.0:
                hits += 1
        fractions[pi] = hits / samples
    return fractions


@dataclass(frozen=True)
class ProductDiagnostic:
    """Finite-horizon log-product diagnostic for time-varying gains.

    This inspects the trend of the partial log sums over a finite horizon;
    it is evidence about the infinite product, not a proof.
    """

    criterion: str
    log_partial_sums: np.ndarray
    slope: float
    sufficient_condition_met: bool
    finite_horizon_only: bool = field(default=True)


def _tail_slope(partial_sums: np.ndarray) -> float:
    m = len(partial_sums)
    if m < 2:
        return 0.0
    half = m // 2
    if half == m - 1:
        half = m - 2
    return float((partial_sums[-1] - partial_sums[half]) / (m - 1 - half))


def product_convergence_check(g: SignedGraph, schedule: Schedule, horizon: int,
                              criterion: str = "exact",
                              slope_eps: float = 1e-8,
                              tol: Tolerances = DEFAULT_TOLERANCES) -> ProductDiagnostic:
    """Partial sums of log contraction factors for a gain schedule.

    criterion "exact" uses the per-step factor lambda_max(Wbar_k' P Wbar_k)
    (the squared spectral norm of the projected mean update); "weyl" uses
    the symmetric-partition eigenvalue bound instead. The sufficient
    condition is flagged met when the partial log sums drift to minus
    infinity, measured as the mean slope over the second half of the
    horizon falling below -slope_eps.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if criterion not in ("exact", "weyl"):
        raise ValueError("criterion must be 'exact' or 'weyl'")
    alphas = schedule.alpha_values(horizon)
    betas = schedule.beta_values(horizon)
    n = g.n
    logs = np.empty(horizon)
    if criterion == "weyl":
        if not _symmetric_partition(g, tol):
            raise NotSymmetricError("the weyl criterion needs a symmetric partition")
        lam2_att = float(sym_eigenvalues(g.l_att, tol).eigenvalues[1])
        lam_max_rep = sym_eigenvalues(g.l_rep, tol).lambda_max
        factors = 1.0 - (alphas / n) * lam2_att + (betas / n) * lam_max_rep
        logs = np.log(np.maximum(factors, 1e-300))
    else:
        for k in range(horizon):
            b = project_disagreement(mean_update(g, alphas[k], betas[k]))
            lam = sym_eigenvalues(b.T @ b, tol).lambda_max
            logs[k] = np.log(max(lam, 1e-300))
    partial = np.cumsum(logs)
    slope = _tail_slope(partial)
    return ProductDiagnostic(
        criterion=criterion,
        log_partial_sums=partial,
        slope=slope,
        sufficient_condition_met=bool(slope < -slope_eps),
    )
