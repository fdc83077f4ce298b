"""Numba-jitted implementations of the hot kernels.

Same function contracts as ``_kernels_numpy``; see that module for the
reference semantics. Compiled lazily on first call, cached on disk.
"""

import math

import numba
import numpy as np

LOG10_SPREAD_FLOOR = -400.0

_U11 = np.uint64(11)
_U27 = np.uint64(27)
_U30 = np.uint64(30)
_U31 = np.uint64(31)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@numba.njit(cache=True)
def _uniform_at(key, counter):
    z = key + np.uint64(counter + 1) * _GAMMA
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> _U27)) * _MIX2
    z = z ^ (z >> _U31)
    return (z >> _U11) * _INV_2_53


@numba.njit(cache=True)
def _off_norm(a):
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += a[i, j] * a[i, j]
    return math.sqrt(total)


@numba.njit(cache=True)
def jacobi_sweeps(a, v, off_tol, max_sweeps):
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
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    newp = c * akp - s * akq
                    newq = s * akp + c * akq
                    a[k, p] = newp
                    a[p, k] = newp
                    a[k, q] = newq
                    a[q, k] = newq
                a[p, p] = app - h
                a[q, q] = aqq + h
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        off = _off_norm(a)
        sweeps += 1
    return off, sweeps


@numba.njit(cache=True)
def run_chain(x, row_ptr, nbr, cumw, kinds, alphas, betas, key, horizon,
              record_steps, snaps, mins, maxs, spreads,
              arcs_out, record_arcs, arcs_in, use_arcs_in,
              approx_tol, overflow_limit):
    n = x.shape[0]
    n_rec_total = record_steps.shape[0]
    t0_exact = -1
    t0_approx = -1
    overflow_step = -1
    ri = 0

    m = x[0]
    big = x[0]
    for idx in range(1, n):
        if x[idx] < m:
            m = x[idx]
        if x[idx] > big:
            big = x[idx]
    spread = big - m
    if spread == 0.0:
        t0_exact = 0
    if spread <= approx_tol:
        t0_approx = 0
    if n_rec_total > 0 and record_steps[0] == 0:
        for idx in range(n):
            snaps[0, idx] = x[idx]
        mins[0] = m
        maxs[0] = big
        spreads[0] = spread
        ri = 1

    for k in range(horizon):
        if use_arcs_in:
            j = arcs_in[k, 0]
            i = arcs_in[k, 1]
            kd = arcs_in[k, 2]
        else:
            u1 = _uniform_at(key, 2 * k)
            u2 = _uniform_at(key, 2 * k + 1)
            i = np.int64(u1 * n)
            if i >= n:
                i = np.int64(n - 1)
            a0 = row_ptr[i]
            a1 = row_ptr[i + 1]
            sel = a1 - 1
            for a in range(a0, a1):
                if u2 < cumw[a]:
                    sel = a
                    break
            j = nbr[sel]
            kd = np.int64(kinds[sel])
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
        m = x[0]
        big = x[0]
        for idx in range(1, n):
            if x[idx] < m:
                m = x[idx]
            if x[idx] > big:
                big = x[idx]
        spread = big - m
        kk = k + 1
        if t0_exact < 0 and spread == 0.0:
            t0_exact = kk
        if t0_approx < 0 and spread <= approx_tol:
            t0_approx = kk
        if ri < n_rec_total and record_steps[ri] == kk:
            for idx in range(n):
                snaps[ri, idx] = x[idx]
            mins[ri] = m
            maxs[ri] = big
            spreads[ri] = spread
            ri += 1
    return ri, t0_exact, t0_approx, overflow_step


@numba.njit(cache=True)
def run_ensemble(x0, row_ptr, nbr, cumw, kinds, alphas, betas, keys, horizon,
                 record_steps, track_pairs,
                 sum_y, sumsq_y, sum_ysq, sumsq_ysq,
                 sum_spread, sumsq_spread, sum_logspread, sumsq_logspread,
                 alive_counts, t0_exact, t0_approx, overflow_steps, pair_max,
                 approx_tol, overflow_limit):
    trials = keys.shape[0]
    n = x0.shape[0]
    n_rec_total = record_steps.shape[0]
    x = np.empty(n)

    for t in range(trials):
        for idx in range(n):
            x[idx] = x0[idx]
        key = keys[t]
        te = -1
        ta = -1
        ov = -1
        ri = 0

        m = x[0]
        big = x[0]
        for idx in range(1, n):
            if x[idx] < m:
                m = x[idx]
            if x[idx] > big:
                big = x[idx]
        spread = big - m
        if spread == 0.0:
            te = 0
        if spread <= approx_tol:
            ta = 0
        if track_pairs:
            for a in range(n):
                for b in range(n):
                    d = abs(x[a] - x[b])
                    if d > pair_max[t, a, b]:
                        pair_max[t, a, b] = d
        if n_rec_total > 0 and record_steps[0] == 0:
            _accumulate(x, n, 0, spread,
                        sum_y, sumsq_y, sum_ysq, sumsq_ysq,
                        sum_spread, sumsq_spread, sum_logspread,
                        sumsq_logspread, alive_counts)
            ri = 1

        for k in range(horizon):
            u1 = _uniform_at(key, 2 * k)
            u2 = _uniform_at(key, 2 * k + 1)
            i = np.int64(u1 * n)
            if i >= n:
                i = np.int64(n - 1)
            a0 = row_ptr[i]
            a1 = row_ptr[i + 1]
            sel = a1 - 1
            for a in range(a0, a1):
                if u2 < cumw[a]:
                    sel = a
                    break
            j = nbr[sel]
            kd = kinds[sel]
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
                ov = k
                break
            m = x[0]
            big = x[0]
            for idx in range(1, n):
                if x[idx] < m:
                    m = x[idx]
                if x[idx] > big:
                    big = x[idx]
            spread = big - m
            kk = k + 1
            if te < 0 and spread == 0.0:
                te = kk
            if ta < 0 and spread <= approx_tol:
                ta = kk
            if track_pairs:
                for b in range(n):
                    d = abs(x[i] - x[b])
                    if d > pair_max[t, i, b]:
                        pair_max[t, i, b] = d
                        pair_max[t, b, i] = d
            if ri < n_rec_total and record_steps[ri] == kk:
                _accumulate(x, n, ri, spread,
                            sum_y, sumsq_y, sum_ysq, sumsq_ysq,
                            sum_spread, sumsq_spread, sum_logspread,
                            sumsq_logspread, alive_counts)
                ri += 1
        t0_exact[t] = te
        t0_approx[t] = ta
        overflow_steps[t] = ov


@numba.njit(cache=True)
def _accumulate(x, n, ri, spread,
                sum_y, sumsq_y, sum_ysq, sumsq_ysq,
                sum_spread, sumsq_spread, sum_logspread, sumsq_logspread,
                alive_counts):
    avg = 0.0
    for idx in range(n):
        avg += x[idx]
    avg /= n
    ysq = 0.0
    for idx in range(n):
        y = x[idx] - avg
        sum_y[ri, idx] += y
        sumsq_y[ri, idx] += y * y
        ysq += y * y
    sum_ysq[ri] += ysq
    sumsq_ysq[ri] += ysq * ysq
    sum_spread[ri] += spread
    sumsq_spread[ri] += spread * spread
    if spread > 0.0:
        lg = math.log10(spread)
    else:
        lg = LOG10_SPREAD_FLOOR
    sum_logspread[ri] += lg
    sumsq_logspread[ri] += lg * lg
    alive_counts[ri] += 1


@numba.njit(cache=True)
def second_moment_accum(S, src, dst, wn, coefs):
    n = S.shape[0]
    for a in range(src.shape[0]):
        j = src[a]
        i = dst[a]
        wc = wn[a] * coefs[a]
        wcc = wn[a] * coefs[a] * coefs[a] * (1.0 - 1.0 / n)
        un = -1.0 / n
        ui = 1.0 - 1.0 / n
        for k in range(n):
            uk = ui if k == i else un
            S[i, k] += wc * uk
        for k in range(n):
            uk = ui if k == i else un
            S[j, k] -= wc * uk
        for k in range(n):
            uk = ui if k == i else un
            S[k, i] += wc * uk
        for k in range(n):
            uk = ui if k == i else un
            S[k, j] -= wc * uk
        S[i, i] += wcc
        S[j, j] += wcc
        S[i, j] -= wcc
        S[j, i] -= wcc
