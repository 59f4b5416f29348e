"""Pure-Python CFR traversal kernel.

Mirrors ``_cfr_cy.pyx`` operation for operation so both produce identical
iterates; selected by ``tepsro.solvers.kernel`` when the compiled extension is
unavailable or disabled.
"""

from __future__ import annotations

COMPILED = False


def run(kind, player, iset, child_off, child, cprob, util, iset_off,
        iterations, regret, strat_sum, current, root_values,
        max_depth=0, max_actions=0):
    kind_l = kind.tolist()
    player_l = player.tolist()
    iset_l = iset.tolist()
    off_l = child_off.tolist()
    child_l = child.tolist()
    cprob_l = cprob.tolist()
    u0 = util[:, 0].tolist()
    u1 = util[:, 1].tolist()
    ioff_l = iset_off.tolist()
    reg = regret.tolist()
    ssum = strat_sum.tolist()
    cur = current.tolist()
    n_isets = len(ioff_l) - 1

    def traverse(nid, r1, r2, r0):
        k = kind_l[nid]
        if k == 2:
            return u0[nid], u1[nid]
        lo = off_l[nid]
        hi = off_l[nid + 1]
        if k == 1:
            a0 = 0.0
            a1 = 0.0
            for e in range(lo, hi):
                p = cprob_l[e]
                if p == 0.0:
                    continue
                c0, c1 = traverse(child_l[e], r1, r2, r0 * p)
                a0 += p * c0
                a1 += p * c1
            return a0, a1
        f = iset_l[nid]
        base = ioff_l[f]
        j = player_l[nid]
        v0 = 0.0
        v1 = 0.0
        av0 = []
        av1 = []
        for e in range(lo, hi):
            s = cur[base + (e - lo)]
            if j == 1:
                c0, c1 = traverse(child_l[e], r1 * s, r2, r0)
            else:
                c0, c1 = traverse(child_l[e], r1, r2 * s, r0)
            av0.append(c0)
            av1.append(c1)
            v0 += s * c0
            v1 += s * c1
        if j == 1:
            rj = r1
            rmj = r2 * r0
            for a in range(hi - lo):
                reg[base + a] += rmj * (av0[a] - v0)
                ssum[base + a] += rj * cur[base + a]
        else:
            rj = r2
            rmj = r1 * r0
            for a in range(hi - lo):
                reg[base + a] += rmj * (av1[a] - v1)
                ssum[base + a] += rj * cur[base + a]
        return v0, v1

    for t in range(iterations):
        v0, v1 = traverse(0, 1.0, 1.0, 1.0)
        root_values[t, 0] = v0
        root_values[t, 1] = v1
        for f in range(n_isets):
            base = ioff_l[f]
            na = ioff_l[f + 1] - base
            total = 0.0
            for a in range(na):
                r = reg[base + a]
                if r > 0.0:
                    total += r
            if total > 0.0:
                for a in range(na):
                    r = reg[base + a]
                    cur[base + a] = (r / total) if r > 0.0 else 0.0
            else:
                for a in range(na):
                    cur[base + a] = 1.0 / na

    regret[:] = reg
    strat_sum[:] = ssum
    current[:] = cur
