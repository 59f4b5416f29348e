"""Extensive-form game trees and the basic quantities every solver consumes.

A :class:`GameTree` is an arena of nodes (decision / chance / terminal) with
per-player information sets keyed by canonical observable-history strings.
Player 0 is Nature; strategic players are numbered from 1. Strategies are
behavioral: a :class:`BehavioralProfile` assigns one distribution over action
labels to each (player, infoset-key) pair.

Trees are built through the ``add_*`` methods and treated as immutable
afterwards; every operation in this module is read-only. The empirical-game
layer mutates trees through the same methods under exclusive access.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from tepsro.errors import ProfileIncomplete, ShapeError

CHANCE_PLAYER = 0

#: structural tolerance (probability sums, sample averages)
STRUCT_TOL = 1e-9
#: game-theoretic tolerance (regret clamps, equilibrium checks)
GAME_TOL = 1e-6


def make_key(player: int, parts) -> str:
    """Canonical infoset key: ``"player|obs1|act1|..."``."""
    return "|".join([str(player)] + [str(p) for p in parts])


@dataclass
class DecisionNode:
    player: int
    infoset: str
    children: dict[str, int] = field(default_factory=dict)  # action label -> child id


@dataclass
class ChanceNode:
    children: dict[str, int] = field(default_factory=dict)  # outcome label -> child id
    probs: dict[str, float] = field(default_factory=dict)
    tag: str = ""  # which stochastic event this node realizes, when known


@dataclass
class TerminalNode:
    utility: np.ndarray
    count: int = 0
    total: np.ndarray = None

    def __post_init__(self):
        self.utility = np.asarray(self.utility, dtype=float)
        if self.total is None:
            self.total = np.zeros_like(self.utility)
        else:
            self.total = np.asarray(self.total, dtype=float)

    def add_sample(self, u) -> None:
        """Fold one sampled payoff vector into the running average."""
        self.total = self.total + np.asarray(u, dtype=float)
        self.count += 1
        self.utility = self.total / self.count


@dataclass
class InfoSet:
    owner: int
    key: str
    members: list[int] = field(default_factory=list)
    actions: tuple[str, ...] = ()


@dataclass
class Violation:
    code: str
    node: int | None
    message: str
    path: tuple[str, ...] = ()


class GameTree:
    """Arena-indexed extensive-form tree for two strategic players."""

    def __init__(self, n_players: int = 2):
        self.n_players = n_players
        self.nodes: list = []
        self.root: int = -1
        self.infosets: dict[tuple[int, str], InfoSet] = {}
        self.parent: list[int] = []
        self.edge_in: list[str | None] = []

    # -- construction -----------------------------------------------------

    def _attach(self, node, parent: int | None, edge: str | None) -> int:
        nid = len(self.nodes)
        self.nodes.append(node)
        self.parent.append(-1 if parent is None else parent)
        self.edge_in.append(edge)
        if parent is None:
            if self.root >= 0:
                raise ValueError("tree already has a root")
            self.root = nid
        else:
            pn = self.nodes[parent]
            if isinstance(pn, TerminalNode):
                raise ValueError("cannot attach children to a terminal node")
            if edge in pn.children:
                raise ValueError(f"duplicate edge {edge!r} at node {parent}")
            pn.children[edge] = nid
        return nid

    def add_chance(self, parent: int | None, edge: str | None,
                   outcomes: list[tuple[str, float]] | None = None,
                   tag: str = "") -> int:
        node = ChanceNode(tag=tag)
        if outcomes:
            node.probs = {lbl: float(p) for lbl, p in outcomes}
        return self._attach(node, parent, edge)

    def add_decision(self, parent: int | None, edge: str | None, player: int,
                     infoset: str, actions=None) -> int:
        nid = self._attach(DecisionNode(player, infoset), parent, edge)
        iset = self.infosets.get((player, infoset))
        if iset is None:
            iset = InfoSet(player, infoset, [], tuple(actions) if actions else ())
            self.infosets[(player, infoset)] = iset
        elif actions is not None and tuple(actions) != iset.actions:
            raise ValueError(f"action set mismatch for infoset {infoset!r}")
        iset.members.append(nid)
        return nid

    def add_terminal(self, parent: int | None, edge: str | None, utility,
                     count: int = 0, total=None) -> int:
        return self._attach(TerminalNode(np.asarray(utility, float), count, total), parent, edge)

    def set_chance_probs(self, nid: int, probs: dict[str, float]) -> None:
        node = self.nodes[nid]
        if not isinstance(node, ChanceNode):
            raise ValueError(f"node {nid} is not a chance node")
        node.probs = {lbl: float(p) for lbl, p in probs.items()}

    def promote_terminal(self, nid: int, player: int, infoset: str) -> TerminalNode:
        """Replace a leaf with an empty decision node; returns the old leaf."""
        old = self.nodes[nid]
        if not isinstance(old, TerminalNode):
            raise ValueError(f"node {nid} is not terminal")
        self.nodes[nid] = DecisionNode(player, infoset)
        iset = self.infosets.setdefault((player, infoset), InfoSet(player, infoset))
        iset.members.append(nid)
        return old

    # -- simple accessors -------------------------------------------------

    def node(self, nid: int):
        return self.nodes[nid]

    def infoset_of(self, nid: int) -> InfoSet:
        n = self.nodes[nid]
        return self.infosets[(n.player, n.infoset)]

    def children_of(self, nid: int) -> dict[str, int]:
        n = self.nodes[nid]
        return {} if isinstance(n, TerminalNode) else n.children

    def path_to(self, nid: int) -> tuple[str, ...]:
        """Edge labels from the root to ``nid``."""
        labels = []
        while self.parent[nid] >= 0:
            labels.append(self.edge_in[nid])
            nid = self.parent[nid]
        return tuple(reversed(labels))

    def subtree_nodes(self, root: int) -> list[int]:
        out, stack = [], [root]
        while stack:
            nid = stack.pop()
            out.append(nid)
            stack.extend(reversed(list(self.children_of(nid).values())))
        return out

    def player_infosets(self, player: int) -> list[InfoSet]:
        return [i for (p, _), i in self.infosets.items() if p == player]

    def num_edges(self) -> int:
        return sum(len(self.children_of(i)) for i in range(len(self.nodes)))

    # -- perfect-recall bookkeeping ---------------------------------------

    def own_sequences(self) -> dict[int, tuple]:
        """For each decision node, the acting player's (infoset, action) history."""
        seqs: dict[int, tuple] = {}
        per_player: dict[int, dict[int, tuple]] = {}
        stack = [(self.root, {p: () for p in range(1, self.n_players + 1)})]
        while stack:
            nid, hist = stack.pop()
            node = self.nodes[nid]
            if isinstance(node, TerminalNode):
                continue
            if isinstance(node, DecisionNode):
                seqs[nid] = hist[node.player]
                for a, c in node.children.items():
                    nh = dict(hist)
                    nh[node.player] = hist[node.player] + ((node.infoset, a),)
                    stack.append((c, nh))
            else:
                for _, c in node.children.items():
                    stack.append((c, hist))
        per_player.clear()
        return seqs

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        nodes = []
        for nid, n in enumerate(self.nodes):
            if isinstance(n, DecisionNode):
                nodes.append({"id": nid, "kind": "decision", "player": n.player,
                              "infoset": n.infoset,
                              "actions": [[a, c] for a, c in n.children.items()]})
            elif isinstance(n, ChanceNode):
                rec = {"id": nid, "kind": "chance",
                       "probs": [[a, n.probs.get(a, 0.0), c]
                                 for a, c in n.children.items()]}
                if n.tag:
                    rec["tag"] = n.tag
                nodes.append(rec)
            else:
                nodes.append({"id": nid, "kind": "terminal",
                              "utility": list(map(float, n.utility)),
                              "samples": [n.count, list(map(float, n.total))]})
        infosets = [{"player": i.owner, "key": i.key, "members": list(i.members),
                     "actions": list(i.actions)}
                    for i in self.infosets.values()]
        return {"root": self.root, "players": self.n_players,
                "nodes": nodes, "infosets": infosets}

    @classmethod
    def from_json(cls, data: dict) -> "GameTree":
        tree = cls(n_players=data.get("players", 2))
        tree.root = data["root"]
        nn = len(data["nodes"])
        tree.nodes = [None] * nn
        tree.parent = [-1] * nn
        tree.edge_in = [None] * nn
        for rec in data["nodes"]:
            nid = rec["id"]
            if rec["kind"] == "decision":
                node = DecisionNode(rec["player"], rec["infoset"],
                                    {a: c for a, c in rec["actions"]})
            elif rec["kind"] == "chance":
                node = ChanceNode({a: c for a, _, c in rec["probs"]},
                                  {a: p for a, p, _ in rec["probs"]},
                                  tag=rec.get("tag", ""))
            else:
                count, total = rec.get("samples", [0, None])
                node = TerminalNode(np.asarray(rec["utility"], float), count, total)
            tree.nodes[nid] = node
        for nid, n in enumerate(tree.nodes):
            if not isinstance(n, TerminalNode):
                for a, c in n.children.items():
                    tree.parent[c] = nid
                    tree.edge_in[c] = a
        for rec in data["infosets"]:
            tree.infosets[(rec["player"], rec["key"])] = InfoSet(
                rec["player"], rec["key"], list(rec["members"]), tuple(rec["actions"]))
        return tree

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, s: str) -> "GameTree":
        return cls.from_json(json.loads(s))


class BehavioralProfile:
    """Per (player, infoset-key) distribution over that infoset's action labels."""

    def __init__(self, dists: dict | None = None):
        self._d: dict[tuple[int, str], dict[str, float]] = {}
        if dists:
            for k, v in dists.items():
                self._d[k] = dict(v)

    def set(self, player: int, key: str, dist: dict[str, float]) -> None:
        self._d[(player, key)] = dict(dist)

    def get(self, player: int, key: str) -> dict[str, float]:
        return self._d[(player, key)]

    def __contains__(self, pk) -> bool:
        return pk in self._d

    def __len__(self) -> int:
        return len(self._d)

    def keys(self):
        return self._d.keys()

    def items(self):
        return self._d.items()

    def copy(self) -> "BehavioralProfile":
        return BehavioralProfile(self._d)

    def update(self, other: "BehavioralProfile") -> None:
        for k, v in other.items():
            self._d[k] = dict(v)

    def probs_for(self, iset: InfoSet) -> np.ndarray:
        """Distribution aligned to ``iset.actions``. Unknown labels are a ShapeError."""
        dist = self._d.get((iset.owner, iset.key))
        if dist is None:
            raise ProfileIncomplete([(iset.owner, iset.key)])
        extra = set(dist) - set(iset.actions)
        if extra:
            raise ShapeError(f"distribution for {iset.key!r} names unknown actions {sorted(extra)}")
        return np.array([dist.get(a, 0.0) for a in iset.actions], dtype=float)

    def missing_for(self, tree: GameTree, player: int | None = None) -> list:
        need = [(p, k) for (p, k) in tree.infosets if player is None or p == player]
        return [pk for pk in need if pk not in self._d]

    def require_cover(self, tree: GameTree, player: int | None = None) -> None:
        missing = self.missing_for(tree, player)
        if missing:
            raise ProfileIncomplete(missing)

    def restrict(self, keys) -> "BehavioralProfile":
        keys = set(keys)
        return BehavioralProfile({k: v for k, v in self._d.items() if k in keys})

    @classmethod
    def uniform(cls, tree: GameTree) -> "BehavioralProfile":
        prof = cls()
        for (p, k), iset in tree.infosets.items():
            n = len(iset.actions)
            prof.set(p, k, {a: 1.0 / n for a in iset.actions})
        return prof

    def to_records(self) -> list[dict]:
        return [{"player": p, "infoset": k, "dist": dict(v)}
                for (p, k), v in sorted(self._d.items())]

    @classmethod
    def from_records(cls, records) -> "BehavioralProfile":
        prof = cls()
        for rec in records:
            prof.set(rec["player"], rec["infoset"], rec["dist"])
        return prof


# -- core operations -------------------------------------------------------


def expected_utility(tree: GameTree, profile: BehavioralProfile) -> np.ndarray:
    """Exact expected utility vector of ``profile`` (no sampling)."""
    profile.require_cover(tree)
    dist_cache = {pk: profile.probs_for(iset) for pk, iset in tree.infosets.items()}

    def walk(nid: int) -> np.ndarray:
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            return node.utility
        out = np.zeros(tree.n_players)
        if isinstance(node, ChanceNode):
            for a, c in node.children.items():
                p = node.probs.get(a, 0.0)
                if p != 0.0:
                    out = out + p * walk(c)
            return out
        probs = dist_cache[(node.player, node.infoset)]
        iset = tree.infosets[(node.player, node.infoset)]
        for a, p in zip(iset.actions, probs):
            if p != 0.0:
                out = out + p * walk(node.children[a])
        return out

    return walk(tree.root)


def reach_probability(tree: GameTree, target: int, profile: BehavioralProfile) -> float:
    """Product of edge probabilities on the unique root-to-target path."""
    prob = 1.0
    nid = target
    while tree.parent[nid] >= 0:
        par, edge = tree.parent[nid], tree.edge_in[nid]
        node = tree.nodes[par]
        if isinstance(node, ChanceNode):
            prob *= node.probs.get(edge, 0.0)
        else:
            iset = tree.infosets[(node.player, node.infoset)]
            probs = profile.probs_for(iset)
            prob *= probs[iset.actions.index(edge)]
        nid = par
    return prob


def best_response_value(tree: GameTree, player: int,
                        opponent: BehavioralProfile) -> tuple[float, BehavioralProfile]:
    """Exact best response of ``player`` against a fixed opponent profile.

    Counterfactual-reach-weighted backward pass over the player's infosets
    (valid under perfect recall); ties broken by lowest action index. Returns
    the best-response value and the argmax pure strategy.
    """
    missing = [pk for pk in opponent.missing_for(tree) if pk[0] != player]
    if missing:
        raise ProfileIncomplete(missing)

    # counterfactual reach: chance and opponent contributions only
    cf = np.zeros(len(tree.nodes))
    cf[tree.root] = 1.0
    own_seq_len: dict[int, int] = {}
    order = []
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        order.append(nid)
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            continue
        if isinstance(node, ChanceNode):
            for a, c in node.children.items():
                cf[c] = cf[nid] * node.probs.get(a, 0.0)
                stack.append(c)
        else:
            iset = tree.infosets[(node.player, node.infoset)]
            if node.player == player:
                for c in node.children.values():
                    cf[c] = cf[nid]
                    stack.append(c)
            else:
                probs = opponent.probs_for(iset)
                for a, p in zip(iset.actions, probs):
                    c = node.children[a]
                    cf[c] = cf[nid] * p
                    stack.append(c)

    seqs = tree.own_sequences()
    own_isets = tree.player_infosets(player)
    for iset in own_isets:
        own_seq_len[id(iset)] = len(seqs[iset.members[0]])
    own_isets.sort(key=lambda i: -own_seq_len[id(i)])

    value: dict[int, float] = {}

    def node_value(nid: int) -> float:
        if nid in value:
            return value[nid]
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            v = float(node.utility[player - 1])
        elif isinstance(node, ChanceNode):
            v = sum(node.probs.get(a, 0.0) * node_value(c)
                    for a, c in node.children.items())
        else:
            iset = tree.infosets[(node.player, node.infoset)]
            if node.player == player:
                raise AssertionError("own infoset reached before its backward pass")
            probs = opponent.probs_for(iset)
            v = sum(p * node_value(node.children[a])
                    for a, p in zip(iset.actions, probs))
        value[nid] = v
        return v

    br = BehavioralProfile()
    for iset in own_isets:
        best_a, best_v = None, -np.inf
        for a in iset.actions:
            v = sum(cf[h] * node_value(tree.nodes[h].children[a]) for h in iset.members)
            if v > best_v:
                best_a, best_v = a, v
        br.set(player, iset.key, {a: 1.0 if a == best_a else 0.0 for a in iset.actions})
        for h in iset.members:
            value[h] = node_value(tree.nodes[h].children[best_a])

    return node_value(tree.root), br


def profile_regret(tree: GameTree, profile: BehavioralProfile) -> tuple[np.ndarray, float]:
    """Per-player regrets (clamped at zero) and their sum."""
    profile.require_cover(tree)
    u = expected_utility(tree, profile)
    regrets = np.zeros(tree.n_players)
    for j in range(1, tree.n_players + 1):
        brv, _ = best_response_value(tree, j, profile)
        regrets[j - 1] = max(brv - u[j - 1], 0.0)
    return regrets, float(regrets.sum())


def extract_subgame(tree: GameTree, root: int) -> tuple[GameTree, dict[int, int]]:
    """Copy the subtree rooted at ``root`` as a standalone game.

    Intended for subgame roots in the sense of the closed-infoset definition;
    infosets are rebuilt from the members that fall inside the subtree.
    """
    sub = GameTree(tree.n_players)
    mapping: dict[int, int] = {}

    def copy(nid: int, parent: int | None, edge: str | None) -> None:
        node = tree.nodes[nid]
        if isinstance(node, TerminalNode):
            new = sub.add_terminal(parent, edge, node.utility.copy(),
                                   node.count, node.total.copy())
        elif isinstance(node, ChanceNode):
            new = sub.add_chance(parent, edge, list(node.probs.items()), tag=node.tag)
        else:
            iset = tree.infosets[(node.player, node.infoset)]
            new = sub.add_decision(parent, edge, node.player, node.infoset, iset.actions)
        mapping[nid] = new
        for a, c in tree.children_of(nid).items():
            copy(c, new, a)

    copy(root, None, None)
    return sub, mapping


def worst_case_subgame_regret(tree: GameTree, profile: BehavioralProfile) -> float:
    """Maximum profile regret over all subgames, each treated as a game root."""
    from tepsro.solvers.subgames import get_subgame_roots

    profile.require_cover(tree)
    psi = get_subgame_roots(tree)
    worst = 0.0
    for theta in psi.roots:
        sub, _ = extract_subgame(tree, theta)
        restricted = profile.restrict(sub.infosets.keys())
        _, total = profile_regret(sub, restricted)
        worst = max(worst, total)
    return worst


# -- validation -------------------------------------------------------------


def validate_game(tree: GameTree) -> list[Violation]:
    """Check all structural invariants; an empty list means the tree is valid."""
    v: list[Violation] = []

    if not (0 <= tree.root < len(tree.nodes)):
        return [Violation("NoRoot", None, "root id out of range")]

    seen: dict[int, int] = {}
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            v.append(Violation("MultipleParents", nid,
                               f"node {nid} reachable by more than one path",
                               tree.path_to(nid)))
            continue
        seen[nid] = 1
        for a, c in tree.children_of(nid).items():
            if not (0 <= c < len(tree.nodes)):
                v.append(Violation("DanglingChild", nid, f"edge {a!r} points outside arena"))
            else:
                stack.append(c)
    for nid in range(len(tree.nodes)):
        if nid not in seen:
            v.append(Violation("UnreachableNode", nid, f"node {nid} unreachable from root"))

    for nid in seen:
        node = tree.nodes[nid]
        if isinstance(node, ChanceNode):
            if set(node.probs) != set(node.children):
                v.append(Violation("ChanceNotNormalized", nid,
                                   "outcome labels and probabilities disagree",
                                   tree.path_to(nid)))
                continue
            total = sum(node.probs.values())
            if any(p < -STRUCT_TOL for p in node.probs.values()) or abs(total - 1.0) > STRUCT_TOL:
                v.append(Violation("ChanceNotNormalized", nid,
                                   f"chance probabilities sum to {total:.12g}",
                                   tree.path_to(nid)))
        elif isinstance(node, DecisionNode):
            iset = tree.infosets.get((node.player, node.infoset))
            if iset is None or nid not in iset.members:
                v.append(Violation("InfosetMembership", nid,
                                   f"node {nid} not registered in infoset {node.infoset!r}",
                                   tree.path_to(nid)))
            elif set(node.children) != set(iset.actions):
                v.append(Violation("ActionSetMismatch", nid,
                                   f"node actions {sorted(node.children)} != "
                                   f"infoset actions {sorted(iset.actions)}",
                                   tree.path_to(nid)))
        else:
            if node.count > 0:
                expect = node.total / node.count
                if not np.allclose(node.utility, expect, rtol=0, atol=1e-12):
                    v.append(Violation("SampleAverageMismatch", nid,
                                       f"utility {node.utility} != sample average {expect}",
                                       tree.path_to(nid)))

    for (p, key), iset in tree.infosets.items():
        if not iset.members:
            v.append(Violation("EmptyInfoset", None, f"infoset {key!r} has no members"))
            continue
        for nid in iset.members:
            node = tree.nodes[nid]
            if not isinstance(node, DecisionNode) or node.player != p or node.infoset != key:
                v.append(Violation("InfosetMembership", nid,
                                   f"node {nid} is not a decision node of {key!r}"))

    seqs = tree.own_sequences()
    for (p, key), iset in tree.infosets.items():
        refs = {seqs.get(nid) for nid in iset.members if nid in seqs}
        if len(refs) > 1:
            v.append(Violation("PerfectRecallViolation", iset.members[0],
                               f"members of {key!r} have differing own histories",
                               tree.path_to(iset.members[0])))
    return v
