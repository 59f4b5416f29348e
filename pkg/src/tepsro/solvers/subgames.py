"""Subgame roots and their height structure.

A node roots a subgame when (a) if it is a decision node, its infoset is a
singleton, and (b) every infoset that intersects its subtree lies wholly
inside that subtree. The game root always qualifies. Roots are organized into
a tree (parent = closest subgame root above) whose leaf-most entries have
height 1 and whose root has the maximum height.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from tepsro.efg import DecisionNode, GameTree, TerminalNode


@dataclass
class SubgameRootTree:
    roots: list[int] = field(default_factory=list)  # pre-order over the game tree
    parent: dict[int, int | None] = field(default_factory=dict)
    children: dict[int, list[int]] = field(default_factory=dict)
    height: dict[int, int] = field(default_factory=dict)
    ell: int = 1

    def by_height(self) -> dict[int, list[int]]:
        groups: dict[int, list[int]] = {k: [] for k in range(1, self.ell + 1)}
        for nid in self.roots:
            groups[self.height[nid]].append(nid)
        return groups


def get_subgame_roots(tree: GameTree) -> SubgameRootTree:
    order: list[int] = []
    tin: dict[int, int] = {}
    tout: dict[int, int] = {}

    # pre-order numbering with subtree extents
    stack: list[tuple[int, bool]] = [(tree.root, False)]
    while stack:
        nid, done = stack.pop()
        if done:
            tout[nid] = len(order) - 1
            continue
        tin[nid] = len(order)
        order.append(nid)
        stack.append((nid, True))
        for c in reversed(list(tree.children_of(nid).values())):
            stack.append((c, False))

    iset_tins = {pk: sorted(tin[m] for m in iset.members)
                 for pk, iset in tree.infosets.items()}

    def closed_under(nid: int) -> bool:
        lo, hi = tin[nid], tout[nid]
        for tins in iset_tins.values():
            inside = sum(1 for t in tins if lo <= t <= hi)
            if inside not in (0, len(tins)):
                return False
        return True

    psi = SubgameRootTree()
    is_root = set()
    for nid in order:
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            continue
        if nid == tree.root:
            qualifies = True
        else:
            if isinstance(node, DecisionNode):
                if len(tree.infoset_of(nid).members) != 1:
                    continue
            qualifies = closed_under(nid)
        if qualifies:
            psi.roots.append(nid)
            is_root.add(nid)

    for nid in psi.roots:
        anc = tree.parent[nid]
        while anc >= 0 and anc not in is_root:
            anc = tree.parent[anc]
        psi.parent[nid] = anc if anc >= 0 else None
        psi.children.setdefault(nid, [])
        if anc >= 0:
            psi.children.setdefault(anc, []).append(nid)

    def compute_height(nid: int) -> int:
        kids = psi.children.get(nid, [])
        h = 1 if not kids else 1 + max(compute_height(c) for c in kids)
        psi.height[nid] = h
        return h

    psi.ell = compute_height(tree.root)
    return psi


def get_subgame_groups(tree: GameTree, psi: SubgameRootTree) -> dict[int, list[int]]:
    """Subgame roots grouped by height, 1 (leaf-most) through ell (game root)."""
    return psi.by_height()
