"""Seeded gossip engine.

Implements the embedded discrete meeting chain: at each slot a node i is
drawn uniformly, i picks a neighbor j from its selection row, and i alone
moves, toward j on an attractive arc (gain alpha_k) or away from j on a
repulsive one (gain beta_k). Wall-clock arrival times of the underlying
asynchronous clocks are irrelevant to every quantity of interest and are
not simulated.

Updates are computed in the difference form x_i += g * (x_j - x_i) (with an
exact copy at alpha == 1), which makes exact consensus a bitwise absorbing
state and lets hitting times be detected by float equality of min and max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import GainRangeError, OverflowGuardError
from .fileio import fmt17
from .graphs import ARC_ATT, ARC_REP, SignedGraph
from .rng import RngStream, stream_key, stream_keys, uniforms
from .schedules import Schedule

OVERFLOW_LIMIT = 1e150
LOG10_SPREAD_FLOOR = -400.0
APPROX_HIT_REL_TOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """One simulated path, recorded at a configurable stride.

    hitting_time is the first state index with exact (bitwise) consensus;
    hitting_time_approx uses the relative spread tolerance instead and is
    the meaningful notion for alpha < 1. Both are None when never reached.
    """

    record_steps: np.ndarray
    states: np.ndarray
    min_series: np.ndarray
    max_series: np.ndarray
    spread_series: np.ndarray
    hitting_time: int | None
    hitting_time_approx: int | None
    diverged: bool
    overflow_step: int | None
    arc_log: np.ndarray | None
    final_state: np.ndarray


@dataclass(frozen=True)
class Ensemble:
    """Aggregates over independent trials, one rng stream per trial.

    Mean/standard-error series are taken over the trials still alive (not
    overflowed) at each recorded state; alive counts are reported so the
    conditioning is visible. Hitting times use -1 for "not reached".
    """

    record_steps: np.ndarray
    trials: int
    alive: np.ndarray
    mean_y: np.ndarray
    se_y: np.ndarray
    mean_y_sq: np.ndarray
    se_y_sq: np.ndarray
    mean_spread: np.ndarray
    se_spread: np.ndarray
    mean_log10_spread: np.ndarray
    se_log10_spread: np.ndarray
    hitting_times: np.ndarray
    hitting_times_approx: np.ndarray
    overflow_steps: np.ndarray
    diverged_count: int
    pair_max: np.ndarray | None = field(default=None, repr=False)

    @property
    def consensus_fraction(self) -> float:
        return float(np.mean(self.hitting_times >= 0))


def default_record_steps(horizon: int, dense_limit: int = 1000,
                         thin_ratio: float = 1.05) -> np.ndarray:
    """Every state up to dense_limit, then geometrically thinned."""
    if horizon <= dense_limit:
        return np.arange(horizon + 1, dtype=np.int64)
    ks = list(range(dense_limit + 1))
    k = dense_limit
    while k < horizon:
        k = max(k + 1, int(math.ceil(k * thin_ratio)))
        ks.append(min(k, horizon))
    return np.unique(np.asarray(ks, dtype=np.int64))


def _resolve_record_steps(horizon: int, record_steps) -> np.ndarray:
    if record_steps is None:
        return default_record_steps(horizon)
    if isinstance(record_steps, str):
        if record_steps == "all":
            return np.arange(horizon + 1, dtype=np.int64)
        raise ValueError(f"unknown record_steps spec: {record_steps!r}")
    ks = np.unique(np.asarray(record_steps, dtype=np.int64))
    if len(ks) == 0 or ks[0] < 0 or ks[-1] > horizon:
        raise ValueError("record steps must lie within [0, horizon]")
    return ks


def select_arc(g: SignedGraph, rng: RngStream) -> tuple[int, int, int]:
    """Draw one arc: node i uniformly, then neighbor j by inverse CDF over
    i's selection row in stored arc order. Consumes exactly two uniforms.

    Returns 1-based (j, i, kind).
    """
    row_ptr, nbr, cumw, kinds = g._arc_tables
    n = g.n
    u1 = rng.uniform()
    u2 = rng.uniform()
    i = int(u1 * n)
    if i >= n:
        i = n - 1
    a0, a1 = int(row_ptr[i]), int(row_ptr[i + 1])
    sel = a1 - 1
    for a in range(a0, a1):
        if u2 < cumw[a]:
            sel = a
            break
    return int(nbr[sel]) + 1, i + 1, int(kinds[sel])


def sample_arcs(g: SignedGraph, seed: int, count: int) -> np.ndarray:
    """Vectorized block of ``count`` arc draws from the stream (seed, 0);
    row k equals the k-th select_arc draw. Columns: 1-based (j, i, kind)."""
    row_ptr, nbr, cumw, kinds = g._arc_tables
    n = g.n
    key = stream_key(seed, 0)
    u = uniforms(key, 0, 2 * count)
    u1, u2 = u[0::2], u[1::2]
    ii = np.minimum((u1 * n).astype(np.int64), n - 1)
    deg = np.diff(row_ptr).astype(np.int64)
    maxdeg = int(deg.max())
    cumpad = np.full((n, maxdeg), np.inf)
    nbrpad = np.zeros((n, maxdeg), dtype=np.int64)
    kindpad = np.zeros((n, maxdeg), dtype=np.int64)
    for node in range(n):
        a0, a1 = int(row_ptr[node]), int(row_ptr[node + 1])
        cumpad[node, : a1 - a0] = cumw[a0:a1]
        nbrpad[node, : a1 - a0] = nbr[a0:a1]
        kindpad[node, : a1 - a0] = kinds[a0:a1]
    pos = (cumpad[ii] > u2[:, None]).argmax(axis=1)
    np.minimum(pos, deg[ii] - 1, out=pos)
    out = np.empty((count, 3), dtype=np.int64)
    out[:, 0] = nbrpad[ii, pos] + 1
    out[:, 1] = ii + 1
    out[:, 2] = kindpad[ii, pos]
    return out


def step(x, arc: tuple[int, int, int], alpha_k: float, beta_k: float) -> np.ndarray:
    """Apply one update for the 1-based arc (j, i, kind); only x_i changes.

    Raises OverflowGuardError when the updated coordinate leaves the guard
    range; raises GainRangeError on out-of-range gains.
    """
    x = np.asarray(x, dtype=float).copy()
    j, i, kind = int(arc[0]), int(arc[1]), int(arc[2])
    j -= 1
    i -= 1
    if kind == ARC_ATT:
        if not 0.0 <= alpha_k <= 1.0:
            raise GainRangeError("alpha must lie in [0, 1]")
        if alpha_k == 1.0:
            x[i] = x[j]
        else:
            x[i] = x[i] + alpha_k * (x[j] - x[i])
    elif kind == ARC_REP:
        if beta_k < 0.0:
            raise GainRangeError("beta must be nonnegative")
        x[i] = x[i] - beta_k * (x[j] - x[i])
    else:
        raise ValueError(f"unknown arc kind: {kind}")
    if not math.isfinite(x[i]) or abs(x[i]) > OVERFLOW_LIMIT:
        raise OverflowGuardError("state update exceeded the overflow guard")
    return x


def _check_x0(g: SignedGraph, x0) -> np.ndarray:
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (g.n,):
        raise ValueError(f"x0 must have length {g.n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 entries must be finite")
    return x


def _prepare_arcs(g: SignedGraph, arcs, horizon: int) -> np.ndarray:
    arr = np.empty((horizon, 3), dtype=np.int64)
    if len(arcs) != horizon:
        raise ValueError("len(arcs) must equal the horizon")
    for k, arc in enumerate(arcs):
        if len(arc) == 3:
            j, i, kind = arc
            if g.arc_kind(int(j), int(i)) != int(kind):
                raise ValueError(f"arc {arc!r} does not match the graph")
        else:
            j, i = arc
            kind = g.arc_kind(int(j), int(i))
            if kind < 0:
                raise ValueError(f"arc ({j}, {i}) is not in the graph")
        arr[k, 0] = int(j) - 1
        arr[k, 1] = int(i) - 1
        arr[k, 2] = int(kind)
    return arr


def run(g: SignedGraph, schedule: Schedule, x0, horizon: int,
        seed: int | None = None, *, record_steps=None, record_arcs: bool = False,
        arcs=None, approx_rel_tol: float = APPROX_HIT_REL_TOL) -> Trajectory:
    """Simulate one trajectory of ``horizon`` meeting slots.

    Deterministic given the seed (stream (seed, 0), two uniforms per slot).
    Pass ``arcs`` (1-based (j, i) or (j, i, kind) tuples, one per slot) to
    replay a fixed arc sequence instead of sampling. An update beyond the
    overflow guard aborts the run, which is returned flagged as diverged
    with the trajectory recorded so far.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    x = _check_x0(g, x0)
    ks = _resolve_record_steps(horizon, record_steps)
    alphas = schedule.alpha_values(horizon)
    betas = schedule.beta_values(horizon)
    row_ptr, nbr, cumw, kinds = g._arc_tables

    if arcs is not None:
        arcs_in = _prepare_arcs(g, arcs, horizon)
        use_arcs_in = True
        key = np.uint64(0)
    else:
        if seed is None:
            raise ValueError("a seed is required when arcs are not supplied")
        arcs_in = np.empty((0, 3), dtype=np.int64)
        use_arcs_in = False
        key = np.uint64(stream_key(seed, 0))

    m = len(ks)
    snaps = np.empty((m, g.n))
    mins = np.empty(m)
    maxs = np.empty(m)
    spreads = np.empty(m)
    arcs_out = np.empty((horizon if record_arcs else 0, 3), dtype=np.int64)
    spread0 = float(np.max(x) - np.min(x))
    approx_tol = approx_rel_tol * spread0

    n_rec, t0e, t0a, ovf = kernels.run_chain(
        x, row_ptr, nbr, cumw, kinds, alphas, betas, key, horizon,
        ks, snaps, mins, maxs, spreads,
        arcs_out, record_arcs, arcs_in, use_arcs_in,
        approx_tol, OVERFLOW_LIMIT,
    )
    diverged = ovf >= 0
    steps_taken = (ovf + 1) if diverged else horizon
    return Trajectory(
        record_steps=ks[:n_rec],
        states=snaps[:n_rec],
        min_series=mins[:n_rec],
        max_series=maxs[:n_rec],
        spread_series=spreads[:n_rec],
        hitting_time=int(t0e) if t0e >= 0 else None,
        hitting_time_approx=int(t0a) if t0a >= 0 else None,
        diverged=diverged,
        overflow_step=int(ovf) if diverged else None,
        arc_log=(arcs_out[:steps_taken] + np.array([1, 1, 0])) if record_arcs else None,
        final_state=x,
    )


def _mean_se(sums: np.ndarray, sumsqs: np.ndarray, counts: np.ndarray):
    counts = counts.astype(float)
    shape_extra = sums.ndim - counts.ndim
    c = counts.reshape(counts.shape + (1,) * shape_extra)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(c > 0, sums / np.maximum(c, 1), np.nan)
        var = np.where(
            c > 1,
            np.maximum(sumsqs - np.maximum(c, 1) * mean * mean, 0.0)
            / np.maximum(c - 1, 1),
            0.0,
        )
        se = np.sqrt(var / np.maximum(c, 1))
    return mean, se


def monte_carlo(g: SignedGraph, schedule: Schedule, x0, horizon: int,
                trials: int, seed: int, *, record_steps=None,
                track_pair_max: bool = False,
                approx_rel_tol: float = APPROX_HIT_REL_TOL) -> Ensemble:
    """Aggregate ``trials`` independent runs; trial t uses stream (seed, t).

    Diverged trials are kept, not discarded: they simply stop contributing
    to later recorded states (see the alive counts). Aggregation order over
    trials is deterministic.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    x0 = _check_x0(g, x0)
    ks = _resolve_record_steps(horizon, record_steps)
    alphas = schedule.alpha_values(horizon)
    betas = schedule.beta_values(horizon)
    row_ptr, nbr, cumw, kinds = g._arc_tables
    keys = stream_keys(seed, trials)

    m = len(ks)
    n = g.n
    sum_y = np.zeros((m, n))
    sumsq_y = np.zeros((m, n))
    sum_ysq = np.zeros(m)
    sumsq_ysq = np.zeros(m)
    sum_spread = np.zeros(m)
    sumsq_spread = np.zeros(m)
    sum_logspread = np.zeros(m)
    sumsq_logspread = np.zeros(m)
    alive_counts = np.zeros(m, dtype=np.int64)
    t0e = np.empty(trials, dtype=np.int64)
    t0a = np.empty(trials, dtype=np.int64)
    ovf = np.empty(trials, dtype=np.int64)
    pair_max = np.zeros((trials, n, n)) if track_pair_max else np.zeros((1, 1, 1))

    spread0 = float(np.max(x0) - np.min(x0))
    approx_tol = approx_rel_tol * spread0

    kernels.run_ensemble(
        x0, row_ptr, nbr, cumw, kinds, alphas, betas, keys, horizon,
        ks, track_pair_max,
        sum_y, sumsq_y, sum_ysq, sumsq_ysq,
        sum_spread, sumsq_spread, sum_logspread, sumsq_logspread,
        alive_counts, t0e, t0a, ovf, pair_max,
        approx_tol, OVERFLOW_LIMIT,
    )

    mean_y, se_y = _mean_se(sum_y, sumsq_y, alive_counts)
    mean_ysq, se_ysq = _mean_se(sum_ysq, sumsq_ysq, alive_counts)
    mean_sp, se_sp = _mean_se(sum_spread, sumsq_spread, alive_counts)
    mean_lg, se_lg = _mean_se(sum_logspread, sumsq_logspread, alive_counts)
    return Ensemble(
        record_steps=ks,
        trials=trials,
        alive=alive_counts,
        mean_y=mean_y,
        se_y=se_y,
        mean_y_sq=mean_ysq,
        se_y_sq=se_ysq,
        mean_spread=mean_sp,
        se_spread=se_sp,
        mean_log10_spread=mean_lg,
        se_log10_spread=se_lg,
        hitting_times=t0e,
        hitting_times_approx=t0a,
        overflow_steps=ovf,
        diverged_count=int(np.sum(ovf >= 0)),
        pair_max=pair_max if track_pair_max else None,
    )


def no_survivor_probe(g: SignedGraph, schedule: Schedule, x0, horizon: int,
                      trials: int, m_star: float, seed: int) -> np.ndarray:
    """For every ordered node pair, the fraction of trials whose running
    max |x_i(k) - x_j(k)| over the horizon exceeds m_star.

    In almost-surely divergent regimes with a strongly connected attraction
    graph, every pair's fraction should approach 1 (no node survives).
    """
    if m_star < 0:
        raise ValueError("m_star must be nonnegative")
    ens = monte_carlo(g, schedule, x0, horizon, trials, seed,
                      record_steps=np.asarray([0, horizon]),
                      track_pair_max=True)
    return (ens.pair_max > m_star).mean(axis=0)


@dataclass(frozen=True)
class PhiSequence:
    """Window contraction margins for the almost-sure convergence test.

    Each window of n consecutive slots contributes
    phi = 1 - (1 - prod(alpha)/2) q - (1 - q) prod(1 + beta), q = (p/n)^(n-1)
    with p the smallest selection weight; windows start every n-1 slots.
    The sufficient condition asks every value to sit in [0, 1] with
    divergent partial sums and bounded beta; over a finite window count
    that is a trend diagnostic, not a proof.
    """

    values: np.ndarray
    window_starts: np.ndarray
    in_range: np.ndarray
    partial_sums: np.ndarray
    all_in_range: bool
    sum_slope: float
    beta_bound: float | None
    condition_met: bool
    finite_horizon_only: bool = field(default=True)

    def to_json_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "in_range": [bool(b) for b in self.in_range],
            "partial_sums": [float(v) for v in self.partial_sums],
            "all_in_range": self.all_in_range,
            "sum_slope": self.sum_slope,
            "beta_bound": self.beta_bound,
            "condition_met": self.condition_met,
            "finite_horizon_only": self.finite_horizon_only,
        }


@dataclass(frozen=True)
class QSequence:
    """Per-window log growth margins for the almost-sure divergence test.

    Q(m) mixes the chance of a repulsive burst through the widest pair
    against the chance of any attractive contraction in a window of Z
    slots. The running average of the partial sums is reported; the caller
    chooses the threshold (the condition wants linear growth).
    """

    values: np.ndarray
    running_sums: np.ndarray
    running_avg: np.ndarray
    z: int

    def to_json_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "running_sums": [float(v) for v in self.running_sums],
            "running_avg": [float(v) for v in self.running_avg],
            "z": self.z,
        }


@dataclass(frozen=True)
class ConditionReport:
    """Both almost-sure condition evaluations plus the graph constants."""

    phi: PhiSequence
    q: QSequence
    n: int
    min_weight: float
    max_weight: float
    att_arc_count: int

    def to_json_dict(self) -> dict:
        return {
            "phi": self.phi.to_json_dict(),
            "q": self.q.to_json_dict(),
            "params": {
                "n": self.n,
                "p_min": self.min_weight,
                "p_max": self.max_weight,
                "att_arc_count": self.att_arc_count,
            },
        }


def phi_sequence(g: SignedGraph, schedule: Schedule, count: int,
                 slope_eps: float = 1e-8) -> PhiSequence:
    """Evaluate the window contraction margin at starts 0, n-1, 2(n-1), ...

    condition_met requires every value in [0, 1], a known beta bound, and a
    positive trend of the partial sums over the last half of the windows.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    n = g.n
    length = (count - 1) * (n - 1) + n
    alphas = schedule.alpha_values(length)
    betas = schedule.beta_values(length)
    q = (g.min_weight / n) ** (n - 1)
    values = np.empty(count)
    starts = np.empty(count, dtype=np.int64)
    for w in range(count):
        s = w * (n - 1)
        pa = float(np.prod(alphas[s:s + n]))
        pb = float(np.prod(1.0 + betas[s:s + n]))
        values[w] = 1.0 - (1.0 - pa / 2.0) * q - (1.0 - q) * pb
        starts[w] = s
    in_range = (values >= 0.0) & (values <= 1.0)
    partial = np.cumsum(values)
    slope = _tail_slope(partial)
    beta_bound = schedule.beta_upper_bound()
    met = bool(in_range.all() and beta_bound is not None and slope > slope_eps)
    return PhiSequence(
        values=values,
        window_starts=starts,
        in_range=in_range,
        partial_sums=partial,
        all_in_range=bool(in_range.all()),
        sum_slope=slope,
        beta_bound=beta_bound,
        condition_met=met,
    )


def q_sequence(g: SignedGraph, schedule: Schedule, z: int, count: int) -> QSequence:
    """Evaluate the window log-growth margin over windows of z slots.

    Q(m) = (p/n)^z [log(1/(n-1)) + sum log(1+beta_k)]
         + (1 - (1 - P/n)^(E z)) [sum log(1-alpha_k)]
    with p/P the smallest/largest selection weight and E the attractive arc
    count; sums run over the m-th window. Requires alpha_k < 1 throughout.
    """
    if z < 1:
        raise ValueError("z must be at least 1")
    if count < 1:
        raise ValueError("count must be at least 1")
    n = g.n
    length = z * count
    alphas = schedule.alpha_values(length)
    betas = schedule.beta_values(length)
    if np.any(alphas >= 1.0):
        raise GainRangeError("q_sequence needs alpha_k < 1 (log(1 - alpha))")
    qz = (g.min_weight / n) ** z
    att_factor = 1.0 - (1.0 - g.max_weight / n) ** (g.att_arc_count * z)
    values = np.empty(count)
    for w in range(count):
        s = w * z
        rep_sum = float(np.sum(np.log1p(betas[s:s + z])))
        att_sum = float(np.sum(np.log(1.0 - alphas[s:s + z])))
        values[w] = qz * (math.log(1.0 / (n - 1)) + rep_sum) + att_factor * att_sum
    running = np.cumsum(values)
    avg = running / np.arange(1, count + 1)
    return QSequence(values=values, running_sums=running, running_avg=avg, z=z)


def evaluate_conditions(g: SignedGraph, schedule: Schedule, z: int,
                        count: int) -> ConditionReport:
    """Bundle both almost-sure condition evaluations for reporting."""
    return ConditionReport(
        phi=phi_sequence(g, schedule, count),
        q=q_sequence(g, schedule, z, count),
        n=g.n,
        min_weight=g.min_weight,
        max_weight=g.max_weight,
        att_arc_count=g.att_arc_count,
    )


def _tail_slope(partial_sums: np.ndarray) -> float:
    m = len(partial_sums)
    if m < 2:
        return 0.0
    half = m // 2
    if half == m - 1:
        half = m - 2
    return float((partial_sums[-1] - partial_sums[half]) / (m - 1 - half))


TREND_DECADES = math.log10(2.0)


def spread_trend(ens: Ensemble) -> tuple[str, float]:
    """Empirical verdict from the mean log10 spread over the last quarter
    of the horizon: "converging" if it fell by half a doubling, "diverging"
    if it rose by as much, else "undecided". Returns (label, delta)."""
    ks = ens.record_steps
    horizon = int(ks[-1])
    cutoff = horizon * 3 // 4
    idx = np.nonzero(ks >= cutoff)[0]
    if len(idx) < 2:
        return "undecided", 0.0
    lo = idx[0]
    valid = ens.alive > 0
    if not (valid[lo] and valid[-1]):
        return "diverging", math.inf
    delta = float(ens.mean_log10_spread[-1] - ens.mean_log10_spread[lo])
    if delta < -TREND_DECADES:
        return "converging", delta
    if delta > TREND_DECADES:
        return "diverging", delta
    return "undecided", delta


def trajectory_states_csv(traj: Trajectory) -> str:
    n = traj.states.shape[1]
    lines = ["k," + ",".join(f"x_{i + 1}" for i in range(n))]
    for row, k in enumerate(traj.record_steps):
        lines.append(f"{int(k)}," + ",".join(fmt17(v) for v in traj.states[row]))
    return "\n".join(lines) + "\n"


def trajectory_series_csv(traj: Trajectory) -> str:
    lines = ["k,min,max,spread"]
    for row, k in enumerate(traj.record_steps):
        lines.append(
            f"{int(k)},{fmt17(traj.min_series[row])},"
            f"{fmt17(traj.max_series[row])},{fmt17(traj.spread_series[row])}"
        )
    return "\n".join(lines) + "\n"


def ensemble_csv(ens: Ensemble) -> str:
    n = ens.mean_y.shape[1]
    header = ["k", "alive", "mean_y_sq", "se_y_sq", "mean_spread", "se_spread",
              "mean_log10_spread", "se_log10_spread"]
    header += [f"mean_y_{i + 1}" for i in range(n)]
    header += [f"se_y_{i + 1}" for i in range(n)]
    lines = [",".join(header)]
    for row, k in enumerate(ens.record_steps):
        vals = [str(int(k)), str(int(ens.alive[row])),
                fmt17(ens.mean_y_sq[row]), fmt17(ens.se_y_sq[row]),
                fmt17(ens.mean_spread[row]), fmt17(ens.se_spread[row]),
                fmt17(ens.mean_log10_spread[row]), fmt17(ens.se_log10_spread[row])]
        vals += [fmt17(v) for v in ens.mean_y[row]]
        vals += [fmt17(v) for v in ens.se_y[row]]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
