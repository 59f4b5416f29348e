# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled CFR traversal kernel. Twin of ``_cfr_py.run`` (same operation order)."""

import numpy as np

COMPILED = True


cdef struct Pair:
    double v0
    double v1


cdef Pair traverse(int nid, double r1, double r2, double r0,
                   const signed char[:] kind, const signed char[:] player,
                   const int[:] iset, const int[:] child_off, const int[:] child,
                   const double[:] cprob, const double[:, :] util,
                   const int[:] iset_off, double[:] reg, double[:] ssum,
                   double[:] cur, double[:, :] scratch, int depth) noexcept:
    cdef Pair out, cv
    cdef int lo, hi, e, f, base, j, a, na
    cdef double p, s, rj, rmj
    cdef signed char k = kind[nid]
    if k == 2:
        out.v0 = util[nid, 0]
        out.v1 = util[nid, 1]
        return out
    lo = child_off[nid]
    hi = child_off[nid + 1]
    out.v0 = 0.0
    out.v1 = 0.0
    if k == 1:
        for e in range(lo, hi):
            p = cprob[e]
            if p == 0.0:
                continue
            cv = traverse(child[e], r1, r2, r0 * p, kind, player, iset, child_off,
                          child, cprob, util, iset_off, reg, ssum, cur, scratch,
                          depth + 1)
            out.v0 += p * cv.v0
            out.v1 += p * cv.v1
        return out
    f = iset[nid]
    base = iset_off[f]
    j = player[nid]
    na = hi - lo
    for e in range(lo, hi):
        s = cur[base + (e - lo)]
        if j == 1:
            cv = traverse(child[e], r1 * s, r2, r0, kind, player, iset, child_off,
                          child, cprob, util, iset_off, reg, ssum, cur, scratch,
                          depth + 1)
        else:
            cv = traverse(child[e], r1, r2 * s, r0, kind, player, iset, child_off,
                          child, cprob, util, iset_off, reg, ssum, cur, scratch,
                          depth + 1)
        scratch[depth, 2 * (e - lo)] = cv.v0
        scratch[depth, 2 * (e - lo) + 1] = cv.v1
        out.v0 += s * cv.v0
        out.v1 += s * cv.v1
    if j == 1:
        rj = r1
        rmj = r2 * r0
        for a in range(na):
            reg[base + a] += rmj * (scratch[depth, 2 * a] - out.v0)
            ssum[base + a] += rj * cur[base + a]
    else:
        rj = r2
        rmj = r1 * r0
        for a in range(na):
            reg[base + a] += rmj * (scratch[depth, 2 * a + 1] - out.v1)
            ssum[base + a] += rj * cur[base + a]
    return out


def run(kind, player, iset, child_off, child, cprob, util, iset_off,
        int iterations, regret, strat_sum, current, root_values,
        int max_depth, int max_actions):
    cdef const signed char[:] kind_v = kind
    cdef const signed char[:] player_v = player
    cdef const int[:] iset_v = iset
    cdef const int[:] off_v = child_off
    cdef const int[:] child_v = child
    cdef const double[:] cprob_v = cprob
    cdef const double[:, :] util_v = util
    cdef const int[:] ioff_v = iset_off
    cdef double[:] reg_v = regret
    cdef double[:] ssum_v = strat_sum
    cdef double[:] cur_v = current
    cdef double[:, :] rv = root_values
    cdef int n_isets = ioff_v.shape[0] - 1
    cdef int t, f, a, base, na
    cdef double total, r
    cdef Pair v

    scratch_np = np.zeros((max_depth + 1, 2 * max(max_actions, 1)))
    cdef double[:, :] scratch = scratch_np

    for t in range(iterations):
        v = traverse(0, 1.0, 1.0, 1.0, kind_v, player_v, iset_v, off_v, child_v,
                     cprob_v, util_v, ioff_v, reg_v, ssum_v, cur_v, scratch, 0)
        rv[t, 0] = v.v0
        rv[t, 1] = v.v1
        for f in range(n_isets):
            base = ioff_v[f]
            na = ioff_v[f + 1] - base
            total = 0.0
            for a in range(na):
                r = reg_v[base + a]
                if r > 0.0:
                    total += r
            if total > 0.0:
                for a in range(na):
                    r = reg_v[base + a]
                    cur_v[base + a] = (r / total) if r > 0.0 else 0.0
            else:
                for a in range(na):
                    cur_v[base + a] = 1.0 / na
