"""Flattened array view of a (sub)tree for the CFR kernels.

Decision-node children are laid out in their infoset's action order, so the
k-th child edge of a member node is the k-th action of the infoset. Frozen
nodes (already-solved subgame roots) become pseudo-terminals carrying their
cached continuation value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tepsro.efg import ChanceNode, DecisionNode, GameTree, InfoSet, TerminalNode

KIND_DECISION = 0
KIND_CHANCE = 1
KIND_TERMINAL = 2


@dataclass
class FlatGame:
    kind: np.ndarray          # int8 [n]
    player: np.ndarray        # int8 [n]
    iset: np.ndarray          # int32 [n], local infoset index or -1
    child_off: np.ndarray     # int32 [n+1]
    child: np.ndarray         # int32 [E]
    cprob: np.ndarray         # float64 [E]
    util: np.ndarray          # float64 [n, 2]
    iset_off: np.ndarray      # int32 [F+1]
    iset_player: np.ndarray   # int8 [F]
    isets: list[InfoSet]      # local index -> infoset
    node_ids: list[int]       # flat index -> tree node id
    max_depth: int
    max_actions: int

    @property
    def n_nodes(self) -> int:
        return len(self.kind)

    @property
    def n_isets(self) -> int:
        return len(self.isets)

    @property
    def total_actions(self) -> int:
        return int(self.iset_off[-1])


def build_flat(tree: GameTree, root: int | None = None,
               frozen: dict[int, np.ndarray] | None = None) -> FlatGame:
    root = tree.root if root is None else root
    frozen = frozen or {}

    order: list[int] = []
    depth_of: list[int] = []
    stack = [(root, 0)]
    while stack:
        nid, d = stack.pop()
        order.append(nid)
        depth_of.append(d)
        if nid in frozen:
            continue
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            continue
        if isinstance(node, DecisionNode):
            iset = tree.infosets[(node.player, node.infoset)]
            kids = [node.children[a] for a in iset.actions]
        else:
            kids = list(node.children.values())
        for c in reversed(kids):
            stack.append((c, d + 1))

    n = len(order)
    flat_id = {nid: i for i, nid in enumerate(order)}
    kind = np.zeros(n, dtype=np.int8)
    player = np.zeros(n, dtype=np.int8)
    iset_idx = np.full(n, -1, dtype=np.int32)
    util = np.zeros((n, 2), dtype=np.float64)
    child_off = np.zeros(n + 1, dtype=np.int32)

    iset_local: dict[tuple[int, str], int] = {}
    isets: list[InfoSet] = []
    children: list[int] = []
    cprobs: list[float] = []

    for i, nid in enumerate(order):
        node = tree.nodes[nid]
        if nid in frozen:
            kind[i] = KIND_TERMINAL
            util[i] = np.asarray(frozen[nid], dtype=float)
        elif isinstance(node, TerminalNode):
            kind[i] = KIND_TERMINAL
            util[i] = node.utility
        elif isinstance(node, ChanceNode):
            kind[i] = KIND_CHANCE
            for a, c in node.children.items():
                children.append(flat_id[c])
                cprobs.append(node.probs.get(a, 0.0))
        else:
            kind[i] = KIND_DECISION
            player[i] = node.player
            pk = (node.player, node.infoset)
            if pk not in iset_local:
                iset_local[pk] = len(isets)
                isets.append(tree.infosets[pk])
            iset_idx[i] = iset_local[pk]
            iset = tree.infosets[pk]
            for a in iset.actions:
                children.append(flat_id[node.children[a]])
                cprobs.append(0.0)
        child_off[i + 1] = len(children)

    f = len(isets)
    iset_off = np.zeros(f + 1, dtype=np.int32)
    iset_player = np.zeros(f, dtype=np.int8)
    for k, iset in enumerate(isets):
        iset_off[k + 1] = iset_off[k] + len(iset.actions)
        iset_player[k] = iset.owner

    return FlatGame(
        kind=kind, player=player, iset=iset_idx,
        child_off=child_off,
        child=np.asarray(children, dtype=np.int32),
        cprob=np.asarray(cprobs, dtype=np.float64),
        util=util, iset_off=iset_off, iset_player=iset_player,
        isets=isets, node_ids=order,
        max_depth=(max(depth_of) + 1) if depth_of else 1,
        max_actions=max((len(i.actions) for i in isets), default=1),
    )
