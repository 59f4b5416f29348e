"""The empirical game: a growing tree of policy-label edges over sampled payoffs.

Paths returned by playouts are merged one at a time. A path that ends on an
existing leaf re-averages it; a disjoint suffix becomes a new branch; a path
that walks past a leaf promotes that leaf to a decision node whose single
default edge (``<continue>``) inherits the old samples. Leaf utilities are
always the running average of their samples.
"""

from __future__ import annotations

import json

import numpy as np

from tepsro.efg import (
    BehavioralProfile, ChanceNode, DecisionNode, GameTree, TerminalNode, make_key,
)
from tepsro.oracle.nets import Mlp
from tepsro.oracle.policies import MlpPolicy, PolicyParameters, PolicyRegistry, TabularPolicy
from tepsro.psro.adapters import CONTINUE, EmpiricalAdapter, edge_label

INITIAL_LABEL = "p0"


class EmpiricalGame:
    def __init__(self, adapter: EmpiricalAdapter):
        self.adapter = adapter
        self.tree = GameTree(2)
        self.registry = PolicyRegistry()
        self.reveal_bits: dict[tuple[str, str], bool] = {}  # (infoset key, label) -> R
        self.chance_counts: dict[int, dict[str, float]] = {}
        self.phi: dict[tuple[int, str], str] = {}  # true infostate key -> empirical key
        self.epoch = 0

    # -- basic views --------------------------------------------------------

    def infoset_count(self, player: int) -> int:
        return sum(1 for (p, _) in self.tree.infosets if p == player)

    def size_metrics(self) -> dict:
        return {
            "nodes": len(self.tree.nodes),
            "edges": self.tree.num_edges(),
            "infosets_p1": self.infoset_count(1),
            "infosets_p2": self.infoset_count(2),
            "bytes": len(self.tree.dumps().encode()),
        }

    def edge_token(self, infoset_key: str, label: str) -> str:
        if label == CONTINUE:
            return CONTINUE
        if self.adapter.uses_reveal:
            return self.adapter.edge_token(label, self.reveal_bits.get((infoset_key, label), False))
        return label

    def policy_for_token(self, player: int, token: str):
        return self.registry.get(player, edge_label(token))

    # -- chance bookkeeping ---------------------------------------------------

    def _chance_probs_at(self, prefix: tuple) -> dict[str, float]:
        analytic = self.adapter.analytic_chance_probs(prefix)
        if analytic is not None:
            return analytic
        return {lbl: 0.0 for lbl in self.adapter.chance_outcome_labels(prefix)}

    def refresh_chance_probs(self) -> None:
        for nid, counts in self.chance_counts.items():
            total = sum(counts.values())
            if total > 0:
                node = self.tree.nodes[nid]
                node.probs = {lbl: counts.get(lbl, 0.0) / total for lbl in node.children}

    def _count_chance(self, nid: int, token: str) -> None:
        if self.adapter.analytic_chance_probs(()) is None:
            counts = self.chance_counts.setdefault(nid, {})
            counts[token] = counts.get(token, 0.0) + 1.0

    # -- node creation ---------------------------------------------------------

    def _new_node(self, prefix: tuple, parent: int | None, edge: str | None,
                  terminal: bool) -> int:
        """Create the node that lives at path position ``prefix``."""
        if terminal:
            return self.tree.add_terminal(parent, edge, np.zeros(2))
        kind = self.adapter.position_kind(prefix)
        if kind[0] == "chance":
            probs = self._chance_probs_at(prefix)
            nid = self.tree.add_chance(parent, edge, list(sorted(probs.items())), tag=kind[1])
            # materialize every outcome so the distribution stays normalized
            for lbl in sorted(probs):
                stats = self._aggregate_stats(parent) if parent is not None else (0, np.zeros(2))
                self.tree.add_terminal(nid, lbl, self._provisional_utility(stats))
            return nid
        player = kind[1]
        key = self.adapter.infoset_key(player, prefix)
        existing = self.tree.infosets.get((player, key))
        actions = existing.actions if existing else ()
        return self.tree.add_decision(parent, edge, player, key, actions)

    @staticmethod
    def _provisional_utility(stats: tuple[int, np.ndarray]) -> np.ndarray:
        count, total = stats
        return total / count if count > 0 else np.zeros(2)

    def _aggregate_stats(self, nid: int) -> tuple[int, np.ndarray]:
        count, total = 0, np.zeros(2)
        for sub in self.tree.subtree_nodes(nid):
            node = self.tree.nodes[sub]
            if isinstance(node, TerminalNode):
                count += node.count
                total = total + node.total
        return count, total

    # -- merging simulated paths -------------------------------------------------

    def merge_path(self, path: tuple[str, ...], payoff: np.ndarray,
                   allow_extend: bool) -> None:
        if self.tree.root < 0:
            self._new_node((), None, None, terminal=False)
        cur = self.tree.root
        i = 0
        while i < len(path):
            node = self.tree.nodes[cur]
            if isinstance(node, TerminalNode):
                if not allow_extend:
                    node.add_sample(payoff)
                    return
                cur = self._promote(cur, tuple(path[:i]))
                continue
            token = path[i]
            if isinstance(node, ChanceNode):
                self._count_chance(cur, token)
                if token not in node.children:
                    self._new_node(tuple(path[:i + 1]), cur, token,
                                   terminal=(i == len(path) - 1))
                    if token not in node.probs:
                        node.probs[token] = 0.0
            else:
                iset = self.tree.infoset_of(cur)
                if token not in iset.actions:
                    iset.actions = iset.actions + (token,)
                if token not in node.children:
                    self._new_node(tuple(path[:i + 1]), cur, token,
                                   terminal=(i == len(path) - 1))
            cur = self.tree.children_of(cur)[token]
            i += 1
        end = self.tree.nodes[cur]
        if isinstance(end, TerminalNode):
            end.add_sample(payoff)
            return
        if isinstance(end, DecisionNode):
            # play ended at an interior decision point: file under the default edge
            iset = self.tree.infoset_of(cur)
            if CONTINUE not in iset.actions:
                iset.actions = iset.actions + (CONTINUE,)
            if CONTINUE not in end.children:
                self.tree.add_terminal(cur, CONTINUE, np.zeros(2))
            leaf = self.tree.nodes[end.children[CONTINUE]]
            leaf.add_sample(payoff)
            return
        raise AssertionError("a recorded path ended at a chance node")

    def _promote(self, nid: int, prefix: tuple) -> int:
        """Leaf -> interior node; old samples move below the default edge."""
        kind = self.adapter.position_kind(prefix)
        if kind[0] == "chance":
            old = self.tree.nodes[nid]
            probs = self._chance_probs_at(prefix)
            self.tree.nodes[nid] = ChanceNode(tag=kind[1])
            self.tree.nodes[nid].probs = dict(sorted(probs.items()))
            for lbl in sorted(probs):
                self.tree.add_terminal(nid, lbl, np.zeros(2))
            # the old samples carry no realized outcome, so they cannot be refiled
            return nid
        player, key = kind[1], self.adapter.infoset_key(kind[1], prefix)
        old = self.tree.promote_terminal(nid, player, key)
        iset = self.tree.infosets[(player, key)]
        if CONTINUE not in iset.actions:
            iset.actions = iset.actions + (CONTINUE,)
        leaf_id = self.tree.add_terminal(nid, CONTINUE, old.utility.copy(),
                                         old.count, old.total.copy())
        return nid

    def fixup_infosets(self) -> None:
        """Give every member of every infoset the full action set (count-0 leaves)."""
        for (player, key), iset in list(self.tree.infosets.items()):
            for action in iset.actions:
                have = [m for m in iset.members
                        if action in self.tree.nodes[m].children]
                missing = [m for m in iset.members
                           if action not in self.tree.nodes[m].children]
                if not missing:
                    continue
                count, total = 0, np.zeros(2)
                for m in have:
                    c, t = self._aggregate_stats(self.tree.nodes[m].children[action])
                    count += c
                    total = total + t
                fill = self._provisional_utility((count, total))
                for m in missing:
                    self.tree.add_terminal(m, action, fill.copy())

    # -- serialization -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "kind": self.adapter.kind,
            "epoch": self.epoch,
            "tree": self.tree.to_json(),
            "registry": self.registry.to_json(),
            "reveal_bits": [[k, lbl, v] for (k, lbl), v in sorted(self.reveal_bits.items())],
            "chance_counts": {str(k): v for k, v in sorted(self.chance_counts.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict, adapter: EmpiricalAdapter) -> "EmpiricalGame":
        emp = cls(adapter)
        emp.epoch = data["epoch"]
        emp.tree = GameTree.from_json(data["tree"])
        emp.reveal_bits = {(k, lbl): v for k, lbl, v in data["reveal_bits"]}
        emp.chance_counts = {int(k): dict(v) for k, v in data["chance_counts"].items()}
        enc = adapter.encoder()
        acts = adapter.concrete_actions()
        for rec in data["registry"]:
            if rec["kind"] == "tabular":
                emp.registry.register(rec["player"], TabularPolicy.from_json(rec))
            else:
                params = PolicyParameters.from_json(rec)
                emp.registry.register(rec["player"], MlpPolicy(params, enc, acts))
        return emp


def fresh_policy(adapter: EmpiricalAdapter, player: int, label: str,
                 rng: np.random.Generator, hidden: int = 100) -> MlpPolicy:
    """Random-weight network policy (the initial abstract policies)."""
    enc = adapter.encoder()
    actions = adapter.concrete_actions()
    probe = adapter.game.initial_state()
    while probe.is_chance:
        probe = probe.apply(probe.chance_outcomes()[0][0])
    d = enc(probe.infostate(probe.current_player)).shape[0]
    net = Mlp(d, hidden, len(actions), rng)
    params = PolicyParameters(label, player, net.sizes, net.flat_weights())
    return MlpPolicy(params, enc, actions)


def initialize_empirical_game(adapter: EmpiricalAdapter, budget: int,
                              rng: np.random.Generator) -> EmpiricalGame:
    """Initial model: leading chance layers, one policy edge per player's first
    turn, leaves seeded by simulating the initial profile."""
    from tepsro.psro.play import play_episode

    emp = EmpiricalGame(adapter)
    for j in (1, 2):
        emp.registry.register(j, fresh_policy(adapter, j, INITIAL_LABEL, rng))

    def build(prefix: tuple, parent: int | None, edge: str | None, decisions: int):
        if decisions == 2:
            emp.tree.add_terminal(parent, edge, np.zeros(2))
            return
        kind = adapter.position_kind(prefix)
        if kind[0] == "chance":
            probs = emp._chance_probs_at(prefix)
            nid = emp.tree.add_chance(parent, edge, sorted(probs.items()), tag=kind[1])
            for lbl in sorted(probs):
                build(prefix + (lbl,), nid, lbl, decisions)
            return
        player = kind[1]
        key = adapter.infoset_key(player, prefix)
        if adapter.uses_reveal and (key, INITIAL_LABEL) not in emp.reveal_bits:
            emp.reveal_bits[(key, INITIAL_LABEL)] = bool(rng.integers(2))
        token = emp.edge_token(key, INITIAL_LABEL)
        existing = emp.tree.infosets.get((player, key))
        nid = emp.tree.add_decision(parent, edge, player, key,
                                    existing.actions if existing else (token,))
        build(prefix + (token,), nid, token, decisions + 1)

    build((), None, None, 0)

    profile = BehavioralProfile()
    for (p, k), iset in emp.tree.infosets.items():
        profile.set(p, k, {a: 1.0 for a in iset.actions})

    for _ in range(budget):
        res = play_episode(emp, profile, seed=int(rng.integers(2 ** 31)), rng=rng)
        emp.merge_path(res.path, res.payoffs, allow_extend=False)
    emp.refresh_chance_probs()
    return emp
