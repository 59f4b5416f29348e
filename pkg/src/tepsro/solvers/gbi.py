"""Exponential backward-induction enumeration of subgame-perfect equilibria.

Cross-validation oracle for tiny games only: enumerates candidate strategy
assignments per subgame group (pure by default, optionally a fixed probability
grid), keeps those that survive a pure-deviation Nash check on the reduced
subgame (inner subgames replaced by their candidate payoff), and combines
survivors bottom-up. Guarded by a node cap.
"""

from __future__ import annotations

import itertools

import numpy as np

from tepsro.efg import (
    BehavioralProfile, ChanceNode, DecisionNode, GameTree, InfoSet, TerminalNode,
)
from tepsro.errors import TooLarge
from tepsro.solvers.subgames import get_subgame_roots

DEFAULT_NODE_CAP = 30
NASH_TOL = 1e-9

#: opt-in mixed grid from the solver design notes
MIXED_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def _grid_dists(actions: tuple[str, ...], grid) -> list[dict[str, float]]:
    if grid is None:
        return [{a: 1.0 if a == chosen else 0.0 for a in actions} for chosen in actions]
    out = []
    for combo in itertools.product(grid, repeat=len(actions)):
        if abs(sum(combo) - 1.0) < 1e-12:
            out.append(dict(zip(actions, combo)))
    return out


def _evaluate(tree: GameTree, nid: int, assign: dict, frozen: dict) -> np.ndarray:
    node = tree.nodes[nid]
    if nid in frozen:
        return frozen[nid]
    if isinstance(node, TerminalNode):
        return node.utility
    if isinstance(node, ChanceNode):
        acc = np.zeros(tree.n_players)
        for a, c in node.children.items():
            p = node.probs.get(a, 0.0)
            if p != 0.0:
                acc = acc + p * _evaluate(tree, c, assign, frozen)
        return acc
    dist = assign[(node.player, node.infoset)]
    acc = np.zeros(tree.n_players)
    for a, c in node.children.items():
        p = dist.get(a, 0.0)
        if p != 0.0:
            acc = acc + p * _evaluate(tree, c, assign, frozen)
    return acc


def _is_nash(tree: GameTree, theta: int, trunk: list[InfoSet],
             assign: dict, frozen: dict, value: np.ndarray) -> bool:
    """Pure-deviation check over the reduced subgame rooted at ``theta``."""
    for j in (1, 2):
        own = [i for i in trunk if i.owner == j]
        if not own:
            continue
        for combo in itertools.product(*[i.actions for i in own]):
            dev = dict(assign)
            for iset, a in zip(own, combo):
                dev[(j, iset.key)] = {b: 1.0 if b == a else 0.0 for b in iset.actions}
            u = _evaluate(tree, theta, dev, frozen)
            if u[j - 1] > value[j - 1] + NASH_TOL:
                return False
    return True


def gbi_enumerate(tree: GameTree, grid=None,
                  node_cap: int = DEFAULT_NODE_CAP) -> list[BehavioralProfile]:
    """All SPE found at the given resolution; empty when none exist on the grid."""
    if len(tree.nodes) > node_cap:
        raise TooLarge(f"{len(tree.nodes)} nodes exceeds enumeration cap {node_cap}")

    psi = get_subgame_roots(tree)
    # (assignment dict, value at root) survivors per subgame root
    survivors: dict[int, list[tuple[dict, np.ndarray]]] = {}

    groups = psi.by_height()
    for k in range(1, psi.ell + 1):
        for theta in groups[k]:
            kids = psi.children.get(theta, [])
            inner = set()
            for c in kids:
                inner.update(tree.subtree_nodes(c))
            trunk_keys: list[tuple[int, str]] = []
            for nid in tree.subtree_nodes(theta):
                node = tree.nodes[nid]
                if isinstance(node, DecisionNode) and nid not in inner:
                    pk = (node.player, node.infoset)
                    if pk not in trunk_keys:
                        trunk_keys.append(pk)
            trunk = [tree.infosets[pk] for pk in trunk_keys]

            found: list[tuple[dict, np.ndarray]] = []
            for inner_combo in itertools.product(*[survivors[c] for c in kids]):
                frozen = {c: val for c, (_, val) in zip(kids, inner_combo)}
                merged_inner: dict = {}
                for sub_assign, _ in inner_combo:
                    merged_inner.update(sub_assign)
                for trunk_combo in itertools.product(
                        *[_grid_dists(i.actions, grid) for i in trunk]):
                    assign = dict(merged_inner)
                    for iset, dist in zip(trunk, trunk_combo):
                        assign[(iset.owner, iset.key)] = dist
                    value = _evaluate(tree, theta, assign, frozen)
                    if _is_nash(tree, theta, trunk, assign, frozen, value):
                        found.append((assign, value))
            survivors[theta] = found

    return [BehavioralProfile(assign) for assign, _ in survivors[tree.root]]
