"""Counterfactual regret minimization over explicit game trees.

``cfr_solve`` runs vanilla CFR on the whole tree. ``subgame_cfr`` runs the
same traversal below a chosen root while holding a partial solution fixed:
any node whose infoset is already assigned returns its exact continuation
value under the partial profile instead of being traversed, so regret updates
touch only the unsolved infosets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tepsro.efg import (
    BehavioralProfile, ChanceNode, DecisionNode, GameTree, TerminalNode,
)
from tepsro.errors import MissingPartialSolution
from tepsro.solvers.flatten import FlatGame, build_flat
from tepsro.solvers import kernel


@dataclass
class CfrState:
    """Kernel state after a solve: cumulative regrets/strategies per infoset action."""

    flat: FlatGame
    regret: np.ndarray
    strat_sum: np.ndarray
    current: np.ndarray
    root_values: np.ndarray
    iterations: int

    def average_profile(self) -> BehavioralProfile:
        prof = BehavioralProfile()
        off = self.flat.iset_off
        for k, iset in enumerate(self.flat.isets):
            s = self.strat_sum[off[k]:off[k + 1]]
            total = s.sum()
            if total > 0.0:
                probs = s / total
            else:
                probs = np.full(len(iset.actions), 1.0 / len(iset.actions))
            prof.set(iset.owner, iset.key, dict(zip(iset.actions, probs.tolist())))
        return prof


def continuation_values(tree: GameTree, root: int,
                        partial: BehavioralProfile) -> dict[int, np.ndarray]:
    """Exact value vector under ``partial`` for every node where it is defined.

    A node's value is defined when every decision node below it (inclusive)
    has its infoset assigned in the partial profile.
    """
    values: dict[int, np.ndarray] = {}

    def walk(nid: int):
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            values[nid] = node.utility
            return values[nid]
        if isinstance(node, ChanceNode):
            acc = np.zeros(tree.n_players)
            ok = True
            for a, c in node.children.items():
                cv = walk(c)
                p = node.probs.get(a, 0.0)
                if cv is None:
                    if p != 0.0:
                        ok = False
                elif p != 0.0:
                    acc = acc + p * cv
            if ok:
                values[nid] = acc
                return acc
            return None
        pk = (node.player, node.infoset)
        child_vals = {a: walk(c) for a, c in node.children.items()}
        if pk not in partial:
            return None
        dist = partial.get(*pk)
        acc = np.zeros(tree.n_players)
        for a, c in node.children.items():
            p = dist.get(a, 0.0)
            if p != 0.0:
                if child_vals[a] is None:
                    return None
                acc = acc + p * child_vals[a]
        values[nid] = acc
        return acc

    walk(root)
    return values


def frozen_boundary(tree: GameTree, root: int,
                    partial: BehavioralProfile) -> dict[int, np.ndarray]:
    """Topmost nodes below ``root`` whose infoset is already solved, with values."""
    if not len(partial):
        return {}
    values = continuation_values(tree, root, partial)
    frozen: dict[int, np.ndarray] = {}
    stack = [root]
    while stack:
        nid = stack.pop()
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            continue
        if isinstance(node, DecisionNode) and (node.player, node.infoset) in partial:
            if nid not in values:
                raise MissingPartialSolution(
                    f"infoset {node.infoset!r} is fixed but nodes below it are unsolved")
            frozen[nid] = values[nid]
            continue
        stack.extend(tree.children_of(nid).values())
    return frozen


def subgame_cfr(tree: GameTree, root: int, partial: BehavioralProfile,
                iterations: int, *, return_state: bool = False):
    """CFR below ``root`` with already-solved infosets held fixed.

    Returns the average strategy over the unsolved infosets, unioned with the
    partial profile restricted to the subgame. A whole-game call with an empty
    partial is exactly ``cfr_solve``.
    """
    frozen = frozen_boundary(tree, root, partial)
    flat = build_flat(tree, root, frozen)

    covered = [(p, k) for (p, k) in tree_subgame_infosets(tree, root) if (p, k) in partial]
    result = partial.restrict(covered)

    if flat.n_isets == 0:
        return (result, None) if return_state else result

    total = flat.total_actions
    regret = np.zeros(total)
    strat_sum = np.zeros(total)
    current = np.zeros(total)
    off = flat.iset_off
    for k in range(flat.n_isets):
        na = off[k + 1] - off[k]
        current[off[k]:off[k + 1]] = 1.0 / na

    root_values = kernel.run_iterations(flat, iterations, regret, strat_sum, current)
    state = CfrState(flat, regret, strat_sum, current, root_values, iterations)
    result.update(state.average_profile())
    return (result, state) if return_state else result


def tree_subgame_infosets(tree: GameTree, root: int) -> list[tuple[int, str]]:
    """(player, key) pairs of all infosets with a member inside subtree(root)."""
    seen: set[tuple[int, str]] = set()
    order: list[tuple[int, str]] = []
    for nid in tree.subtree_nodes(root):
        node = tree.nodes[nid]
        if isinstance(node, DecisionNode):
            pk = (node.player, node.infoset)
            if pk not in seen:
                seen.add(pk)
                order.append(pk)
    return order


def cfr_solve(tree: GameTree, iterations: int, *, return_state: bool = False):
    """Vanilla CFR; returns the average strategy profile (uniform when T=0)."""
    if iterations == 0:
        prof = BehavioralProfile.uniform(tree)
        return (prof, None) if return_state else prof
    return subgame_cfr(tree, tree.root, BehavioralProfile(), iterations,
                       return_state=return_state)
