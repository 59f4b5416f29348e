"""World-state game interface: pure state objects plus a sampling simulator.

Games are defined by immutable state objects (``apply`` returns a new state),
which gives two views for free: a seeded black-box :class:`Simulator` for
rollouts and RL, and :func:`expand_game`, which enumerates chance outcomes and
legal actions into an explicit :class:`~tepsro.efg.GameTree` for exact oracles
at reduced scale.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from tepsro.efg import GameTree, make_key
from tepsro.errors import TooLarge

DEFAULT_NODE_CAP = 1_000_000


class GameState(ABC):
    """One game position. Implementations are immutable."""

    @property
    @abstractmethod
    def is_terminal(self) -> bool: ...

    @property
    @abstractmethod
    def is_chance(self) -> bool: ...

    @property
    @abstractmethod
    def current_player(self) -> int:
        """Acting player (1 or 2); valid only at decision states."""

    @abstractmethod
    def chance_outcomes(self) -> list[tuple[str, float]]:
        """(label, probability) pairs; valid only at chance states."""

    @property
    @abstractmethod
    def chance_tag(self) -> str:
        """Which stochastic event this chance state realizes (e.g. ``"s1"``)."""

    @abstractmethod
    def legal_actions(self) -> list[str]: ...

    @abstractmethod
    def apply(self, label: str) -> "GameState": ...

    @property
    @abstractmethod
    def last_rewards(self) -> np.ndarray:
        """Reward vector produced by the transition into this state."""

    @abstractmethod
    def utilities(self) -> np.ndarray:
        """Total utilities; valid only at terminal states."""

    @abstractmethod
    def infostate(self, player: int) -> tuple:
        """The player's observation/action sequence up to this state."""


class Game(ABC):
    """Factory for initial states."""

    n_players = 2

    @abstractmethod
    def initial_state(self) -> GameState: ...


@dataclass
class StepResult:
    observations: tuple[tuple, tuple]
    rewards: np.ndarray
    terminal: bool


class Simulator:
    """Seeded sampling wrapper: resolves chance internally, exposes turns.

    Deterministic given (seed, action sequence). One instance per playout;
    construction is cheap.
    """

    def __init__(self, game: Game):
        self.game = game
        self.state: GameState | None = None
        self._rng: np.random.Generator | None = None
        self._obs_len = [0, 0]
        self.chance_log: list[tuple[str, str]] = []

    def reset(self, seed) -> tuple[tuple, tuple]:
        self._rng = np.random.default_rng(seed)
        self.state = self.game.initial_state()
        self._obs_len = [0, 0]
        self.chance_log = []
        self._resolve_chance()
        return self._new_observations()

    def _resolve_chance(self) -> np.ndarray:
        rewards = np.zeros(self.game.n_players)
        while (not self.state.is_terminal) and self.state.is_chance:
            outcomes = self.state.chance_outcomes()
            labels = [o[0] for o in outcomes]
            probs = np.asarray([o[1] for o in outcomes])
            idx = int(self._rng.choice(len(labels), p=probs / probs.sum()))
            self.chance_log.append((self.state.chance_tag, labels[idx]))
            self.state = self.state.apply(labels[idx])
            rewards = rewards + self.state.last_rewards
        return rewards

    def _new_observations(self) -> tuple[tuple, tuple]:
        obs = []
        for j in (1, 2):
            seq = self.state.infostate(j)
            obs.append(tuple(seq[self._obs_len[j - 1]:]))
            self._obs_len[j - 1] = len(seq)
        return tuple(obs)

    @property
    def terminal(self) -> bool:
        return self.state.is_terminal

    @property
    def current_player(self) -> int:
        return self.state.current_player

    def legal_actions(self, player: int | None = None) -> list[str]:
        return self.state.legal_actions()

    def infostate(self, player: int) -> tuple:
        return self.state.infostate(player)

    def utilities(self) -> np.ndarray:
        return self.state.utilities()

    def step(self, action: str) -> StepResult:
        self.state = self.state.apply(action)
        rewards = self.state.last_rewards.copy()
        rewards = rewards + self._resolve_chance()
        return StepResult(self._new_observations(), rewards, self.state.is_terminal)


def infostate_key(player: int, state: GameState) -> str:
    return make_key(player, state.infostate(player))


def expand_game(game: Game, node_cap: int = DEFAULT_NODE_CAP) -> GameTree:
    """Explicit extensive-form tree of the full game (exact chance and actions)."""
    tree = GameTree(game.n_players)
    count = 0

    def build(state: GameState, parent: int | None, edge: str | None) -> None:
        nonlocal count
        count += 1
        if count > node_cap:
            raise TooLarge(f"expansion exceeds {node_cap} nodes")
        if state.is_terminal:
            tree.add_terminal(parent, edge, state.utilities())
            return
        if state.is_chance:
            outcomes = state.chance_outcomes()
            nid = tree.add_chance(parent, edge, outcomes, tag=state.chance_tag)
            for lbl, _ in outcomes:
                build(state.apply(lbl), nid, lbl)
            return
        player = state.current_player
        actions = state.legal_actions()
        nid = tree.add_decision(parent, edge, player, infostate_key(player, state),
                                actions)
        for a in actions:
            build(state.apply(a), nid, a)

    build(game.initial_state(), None, None)
    return tree
