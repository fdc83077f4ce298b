"""Pure-numpy implementations of the hot kernels.

Fallback twins of the jitted kernels in ``_kernels_numba``; both modules
expose the same functions with the same array contracts. Per-trial gossip
trajectories are bit-identical between the backends. Batched ensemble
aggregates and the Jacobi sweep termination may differ from the numba
backend by floating-point summation order only.
"""

import math

import numpy as np

from .rng import GAMMA_U, INV_2_53, MIX1_U, MIX2_U, uniform_at

LOG10_SPREAD_FLOOR = -400.0


def _off_norm(a):
    # sum the off-diagonal squares directly; the |A|_F^2 - |diag|^2 form
    # cancels catastrophically once the matrix is nearly diagonal
    b = a.copy()
    np.fill_diagonal(b, 0.0)
    return math.sqrt(float(np.sum(b * b)))


def jacobi_sweeps(a, v, off_tol, max_sweeps):
    """Cyclic-by-row Jacobi rotations on symmetric ``a``, in place.

    ``v`` accumulates the rotations (columns become eigenvectors). Returns
    (off_diagonal_frobenius_norm, sweeps_used); the caller decides whether
    the final norm is acceptable.
    """
    n = a.shape[0]
    off = _off_norm(a)
    sweeps = 0
    while off > off_tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                h = t * apq
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                newp = c * colp - s * colq
                newq = s * colp + c * colq
                a[:, p] = newp
                a[p, :] = newp
                a[:, q] = newq
                a[q, :] = newq
                a[p, p] = app - h
                a[q, q] = aqq + h
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        off = _off_norm(a)
        sweeps += 1
    return off, sweeps


def run_chain(x, row_ptr, nbr, cumw, kinds, alphas, betas, key, horizon,
              record_steps, snaps, mins, maxs, spreads,
              arcs_out, record_arcs, arcs_in, use_arcs_in,
              approx_tol, overflow_limit):
    """Single gossip trajectory; fills the preallocated output arrays.

    Returns (n_recorded, t0_exact, t0_approx, overflow_step), where the
    hitting times are state indices (-1 when never reached) and
    overflow_step is the step whose update tripped the overflow guard.
    """
    n = x.shape[0]
    n_rec_total = record_steps.shape[0]
    key_i = int(key)
    t0_exact = -1
    t0_approx = -1
    overflow_step = -1
    ri = 0

    m = float(np.min(x))
    big = float(np.max(x))
    spread = big - m
    if spread == 0.0:
        t0_exact = 0
    if spread <= approx_tol:
        t0_approx = 0
    if n_rec_total > 0 and record_steps[0] == 0:
        snaps[0, :] = x
        mins[0] = m
        maxs[0] = big
        spreads[0] = spread
        ri = 1

    for k in range(horizon):
        if use_arcs_in:
            j = int(arcs_in[k, 0])
            i = int(arcs_in[k, 1])
            kd = int(arcs_in[k, 2])
        else:
            u1 = uniform_at(key_i, 2 * k)
            u2 = uniform_at(key_i, 2 * k + 1)
            i = int(u1 * n)
            if i >= n:
                i = n - 1
            a0 = int(row_ptr[i])
            a1 = int(row_ptr[i + 1])
            sel = a1 - 1
            for a in range(a0, a1):
                if u2 < cumw[a]:
                    sel = a
                    break
            j = int(nbr[sel])
            kd = int(kinds[sel])
        if record_arcs:
            arcs_out[k, 0] = j
            arcs_out[k, 1] = i
            arcs_out[k, 2] = kd
        xi = x[i]
        xj = x[j]
        if kd == 0:
            al = alphas[k]
            if al == 1.0:
                xn = xj
            else:
                xn = xi + al * (xj - xi)
        else:
            xn = xi - betas[k] * (xj - xi)
        x[i] = xn
        if not math.isfinite(xn) or abs(xn) > overflow_limit:
            overflow_step = k
            break
        m = float(np.min(x))
        big = float(np.max(x))
        spread = big - m
        kk = k + 1
        if t0_exact < 0 and spread == 0.0:
            t0_exact = kk
        if t0_approx < 0 and spread <= approx_tol:
            t0_approx = kk
        if ri < n_rec_total and record_steps[ri] == kk:
            snaps[ri, :] = x
            mins[ri] = m
            maxs[ri] = big
            spreads[ri] = spread
            ri += 1
    return ri, t0_exact, t0_approx, overflow_step


def _uniform_block(keys, counter):
    z = keys + np.uint64(counter + 1) * GAMMA_U
    z = (z ^ (z >> np.uint64(30))) * MIX1_U
    z = (z ^ (z >> np.uint64(27))) * MIX2_U
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * INV_2_53


def run_ensemble(x0, row_ptr, nbr, cumw, kinds, alphas, betas, keys, horizon,
                 record_steps, track_pairs,
                 sum_y, sumsq_y, sum_ysq, sumsq_ysq,
                 sum_spread, sumsq_spread, sum_logspread, sumsq_logspread,
                 alive_counts, t0_exact, t0_approx, overflow_steps, pair_max,
                 approx_tol, overflow_limit):
    """Batched gossip trials, vectorized across the trial axis.

    Aggregate sums are taken over the trials still alive (not overflowed) at
    each recorded state. Per-trial hitting times and overflow steps are
    written into the output vectors.
    """
    trials = keys.shape[0]
    n = x0.shape[0]
    n_rec_total = record_steps.shape[0]

    X = np.repeat(x0[None, :], trials, axis=0)
    rows = np.arange(trials)
    alive = np.ones(trials, dtype=bool)
    t0_exact[:] = -1
    t0_approx[:] = -1
    overflow_steps[:] = -1

    deg = np.diff(row_ptr)
    maxdeg = int(deg.max())
    cumpad = np.full((n, maxdeg), np.inf)
    nbrpad = np.zeros((n, maxdeg), dtype=np.int64)
    kindpad = np.zeros((n, maxdeg), dtype=np.int64)
    for node in range(n):
        a0 = int(row_ptr[node])
        a1 = int(row_ptr[node + 1])
        cumpad[node, : a1 - a0] = cumw[a0:a1]
        nbrpad[node, : a1 - a0] = nbr[a0:a1]
        kindpad[node, : a1 - a0] = kinds[a0:a1]
    deg = deg.astype(np.int64)

    def record(ri, spread):
        sel = np.nonzero(alive)[0]
        alive_counts[ri] = sel.shape[0]
        if sel.shape[0] == 0:
            return
        xa = X[sel]
        y = xa - xa.mean(axis=1, keepdims=True)
        sum_y[ri, :] = y.sum(axis=0)
        sumsq_y[ri, :] = (y * y).sum(axis=0)
        ysq = (y * y).sum(axis=1)
        sum_ysq[ri] = ysq.sum()
        sumsq_ysq[ri] = (ysq * ysq).sum()
        sp = spread[sel]
        sum_spread[ri] = sp.sum()
        sumsq_spread[ri] = (sp * sp).sum()
        lg = np.full(sp.shape, LOG10_SPREAD_FLOOR)
        pos = sp > 0.0
        lg[pos] = np.log10(sp[pos])
        sum_logspread[ri] = lg.sum()
        sumsq_logspread[ri] = (lg * lg).sum()

    m = X.min(axis=1)
    big = X.max(axis=1)
    spread = big - m
    hit = spread == 0.0
    t0_exact[hit] = 0
    hit_a = spread <= approx_tol
    t0_approx[hit_a] = 0
    if track_pairs:
        np.maximum(pair_max, np.abs(X[:, :, None] - X[:, None, :]), out=pair_max)
    ri = 0
    if n_rec_total > 0 and record_steps[0] == 0:
        record(0, spread)
        ri = 1

    for k in range(horizon):
        u1 = _uniform_block(keys, 2 * k)
        u2 = _uniform_block(keys, 2 * k + 1)
        ii = (u1 * n).astype(np.int64)
        np.minimum(ii, n - 1, out=ii)
        exceed = cumpad[ii] > u2[:, None]
        pos = exceed.argmax(axis=1)
        np.minimum(pos, deg[ii] - 1, out=pos)
        jj = nbrpad[ii, pos]
        kd = kindpad[ii, pos]

        xi = X[rows, ii]
        xj = X[rows, jj]
        diff = xj - xi
        al = alphas[k]
        be = betas[k]
        att_val = xj if al == 1.0 else xi + al * diff
        rep_val = xi - be * diff
        xn = np.where(kd == 0, att_val, rep_val)
        xn = np.where(alive, xn, xi)
        X[rows, ii] = xn

        bad = alive & (~np.isfinite(xn) | (np.abs(xn) > overflow_limit))
        if bad.any():
            overflow_steps[bad] = k
            alive[bad] = False

        m = X.min(axis=1)
        big = X.max(axis=1)
        spread = big - m
        kk = k + 1
        hit = alive & (t0_exact < 0) & (spread == 0.0)
        t0_exact[hit] = kk
        hit_a = alive & (t0_approx < 0) & (spread <= approx_tol)
        t0_approx[hit_a] = kk
        if track_pairs:
            sel = np.nonzero(alive)[0]
            if sel.shape[0]:
                d = np.abs(X[sel][:, :, None] - X[sel][:, None, :])
                pair_max[sel] = np.maximum(pair_max[sel], d)
        if ri < n_rec_total and record_steps[ri] == kk:
            record(ri, spread)
            ri += 1


def second_moment_accum(S, src, dst, wn, coefs):
    """Accumulate the per-arc rank-two corrections of E[W' P W] onto S.

    S must be preloaded with the centering projector. For the arc (j, i)
    with update matrix W = I + c e_i (e_i - e_j)', the exact contribution
    beyond the projector is c (d u' + u d') + c^2 (1 - 1/n) d d' with
    d = e_i - e_j and u = P e_i, scaled by the arc probability wn = p/n.
    """
    n = S.shape[0]
    u = np.empty(n)
    for a in range(src.shape[0]):
        j = int(src[a])
        i = int(dst[a])
        wc = wn[a] * coefs[a]
        wcc = wn[a] * coefs[a] * coefs[a] * (1.0 - 1.0 / n)
        u[:] = -1.0 / n
        u[i] = 1.0 - 1.0 / n
        wcu = wc * u
        S[i, :] += wcu
        S[j, :] -= wcu
        S[:, i] += wcu
        S[:, j] -= wcu
        S[i, i] += wcc
        S[j, j] += wcc
        S[i, j] -= wcc
        S[j, i] -= wcc
