"""Executing empirical-game strategy profiles in the underlying simulator.

At each decision the acting player's empirical infoset is derived from the
path of tokens so far. Inside the tree, a policy label is drawn from the
profile and its network plays the concrete move; once play walks off the
explicit tree, the policy last put in force keeps playing (the default
continuation), and during augmentation a single ``<continue>`` token extends
the recorded path by one decision before recording stops.

The runner can also absorb externally chosen concrete actions (a learning
best-responder). It then infers which edge token, if any, explains the move,
so the profile-driven side keeps conditioning on the path it would have seen.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from tepsro.efg import DecisionNode, TerminalNode, make_key
from tepsro.games.base import Simulator
from tepsro.psro.adapters import CONTINUE, edge_label, edge_reveal
from tepsro.psro.empirical import INITIAL_LABEL, EmpiricalGame


@dataclass
class EpisodeResult:
    path: tuple[str, ...]
    payoffs: np.ndarray
    visited: list[tuple[int, str]] = field(default_factory=list)
    forced_actions: dict = field(default_factory=dict)


class ProfileRunner:
    """Tracks the empirical path over one live simulator episode."""

    def __init__(self, emp: EmpiricalGame, profile, rng: np.random.Generator,
                 forced: dict | None = None, extend: bool = False):
        self.emp = emp
        self.profile = profile
        self.rng = rng
        self.forced = forced or {}
        self.extend = extend
        self.path: list[str] = []
        self.visited: list[tuple[int, str]] = []
        self.forced_actions: dict = {}
        self.active: dict[int, object] = {1: None, 2: None}
        self.cur: int | None = emp.tree.root if emp.tree.root >= 0 else None
        self.recording = True
        self.extended = False
        self._consumed = 0

    # -- path bookkeeping ---------------------------------------------------

    def observe_chance(self, sim: Simulator) -> None:
        while self._consumed < len(sim.chance_log):
            tag, label = sim.chance_log[self._consumed]
            self._consumed += 1
            token = self.emp.adapter.chance_token(tag, label)
            if token is None:
                continue
            if self.recording:
                self.path.append(token)
                self._descend(token)

    def _descend(self, token: str) -> None:
        if self.cur is None:
            return
        node = self.emp.tree.nodes[self.cur]
        if isinstance(node, TerminalNode):
            self.cur = None
            return
        self.cur = node.children.get(token)

    def _stop_recording(self) -> None:
        if self.recording and self.extend and not self.extended:
            self.path.append(CONTINUE)
            self.extended = True
        self.recording = False

    def _in_tree_infoset(self, player: int):
        if self.cur is None:
            return None
        node = self.emp.tree.nodes[self.cur]
        if not isinstance(node, DecisionNode):
            return None
        if node.player != player:
            return None
        return node.infoset

    def _policy_for(self, player: int, token: str):
        if token == CONTINUE:
            pol = self.active[player]
            return pol if pol is not None else self.emp.registry.get(player, INITIAL_LABEL)
        return self.emp.registry.get(player, edge_label(token))

    # -- acting ---------------------------------------------------------------

    def act(self, sim: Simulator) -> str:
        """Choose the current player's concrete action (does not step the sim)."""
        j = sim.current_player
        infostate = sim.infostate(j)
        legal = sim.legal_actions()
        key = self._in_tree_infoset(j)

        if key is not None and self.recording:
            self.visited.append((j, key))
            self.emp.phi[(j, make_key(j, infostate))] = key
            if (j, key) in self.forced:
                pol = self.forced[(j, key)]
                self.active[j] = pol
                action = pol.act(infostate, legal)
                self.forced_actions.setdefault((j, key), action)
                self.path.append("*" + getattr(pol, "label", "forced") + "*")
                self.cur = None
                return action
            dist = self.profile.get(j, key) if (j, key) in self.profile else None
            if dist is not None:
                iset = self.emp.tree.infosets[(j, key)]
                probs = np.array([dist.get(a, 0.0) for a in iset.actions])
                total = probs.sum()
                if total <= 0:
                    probs = np.full(len(probs), 1.0 / len(probs))
                else:
                    probs = probs / total
                token = iset.actions[int(self.rng.choice(len(probs), p=probs))]
                pol = self._policy_for(j, token)
                self.active[j] = pol
                self.path.append(token)
                self._descend(token)
                reveal = edge_reveal(token) if self.emp.adapter.uses_reveal else None
                return pol.act(infostate, legal, reveal)

        # off the explicit tree: the policy in force continues
        self._stop_recording()
        pol = self.active[j]
        if pol is None:
            pol = self.emp.registry.get(j, INITIAL_LABEL)
            self.active[j] = pol
        return pol.act(infostate, legal)

    def absorb(self, sim: Simulator, player: int, action: str) -> None:
        """Fold an externally chosen concrete action into the path (by inference)."""
        j = player
        key = self._in_tree_infoset(j)
        if key is None or not self.recording:
            self._stop_recording()
            return
        infostate = sim.infostate(j)
        legal = sim.legal_actions()
        iset = self.emp.tree.infosets[(j, key)]
        for token in iset.actions:
            pol = self._policy_for(j, token)
            reveal = edge_reveal(token) if self.emp.adapter.uses_reveal else None
            if pol.act(infostate, legal, reveal) == action:
                self.active[j] = pol
                self.path.append(token)
                self._descend(token)
                return
        self._stop_recording()


def play_episode(emp: EmpiricalGame, profile, *, seed: int, rng: np.random.Generator,
                 forced: dict | None = None, extend: bool = False,
                 controllers: dict | None = None) -> EpisodeResult:
    """One full playout of ``profile``; returns the recorded path and payoffs.

    ``controllers`` maps a player to a concrete policy that bypasses the
    profile (the runner absorbs its moves by inference).
    """
    sim = Simulator(emp.adapter.game)
    sim.reset(seed)
    runner = ProfileRunner(emp, profile, rng, forced=forced, extend=extend)
    controllers = controllers or {}
    while not sim.terminal:
        runner.observe_chance(sim)
        j = sim.current_player
        if j in controllers:
            action = controllers[j].act(sim.infostate(j), sim.legal_actions())
            runner.absorb(sim, j, action)
        else:
            action = runner.act(sim)
        sim.step(action)
    runner.observe_chance(sim)
    return EpisodeResult(tuple(runner.path), sim.utilities(),
                         runner.visited, runner.forced_actions)


def play_profile(emp: EmpiricalGame, profile, rng: np.random.Generator,
                 seed: int | None = None) -> tuple[tuple[str, ...], np.ndarray]:
    """Trace one playout of a profile: (empirical path labels, payoff vector)."""
    s = int(rng.integers(2 ** 31)) if seed is None else seed
    res = play_episode(emp, profile, seed=s, rng=rng)
    return res.path, res.payoffs
