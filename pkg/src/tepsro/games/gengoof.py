"""A general-sum multi-round game with a shrinking stochastic event support.

Parametrized by K: the game runs K-1 rounds. Each round opens with a public
stochastic event whose support is the initial K outcomes minus everything
already realized (probabilities renormalized from the round-1 distribution),
then player 1 picks one of K actions, then player 2 picks one of K actions
without seeing player 1's in-round choice (earlier rounds' actions are
public). Per-round rewards come from instance-seeded tables; leaf utility is
the sum over rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from tepsro.errors import DegenerateDistribution, IllegalAction, InfeasibleConfig
from tepsro.games.base import Game, GameState


@dataclass(frozen=True)
class GenGoofConfig:
    k: int = 4
    u_max: float = 10.0
    instance_seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise InfeasibleConfig("need at least two outcomes/actions")
        if self.u_max <= 0:
            raise InfeasibleConfig("u_max must be positive")

    @property
    def rounds(self) -> int:
        return self.k - 1


def outcome_label(i: int) -> str:
    return f"e{i}"


def action_label(i: int) -> str:
    return f"a{i}"


@dataclass(frozen=True)
class GenGoofTables:
    """Instance parameters hidden from the analyst: event distribution and rewards."""

    initial_dist: tuple[float, ...]
    rewards: np.ndarray  # [round, outcome, a1, a2, player]

    @classmethod
    def generate(cls, cfg: GenGoofConfig) -> "GenGoofTables":
        rng = np.random.default_rng(cfg.instance_seed)
        dist = rng.dirichlet(np.ones(cfg.k))
        rewards = rng.uniform(0.0, cfg.u_max,
                              size=(cfg.rounds, cfg.k, cfg.k, cfg.k, 2))
        return cls(tuple(dist.tolist()), rewards)


def renormalize(dist: dict[str, float], realized: str) -> dict[str, float]:
    """Condition a categorical distribution on the realized outcome not recurring."""
    if realized not in dist or dist[realized] <= 0.0:
        raise IllegalAction(f"outcome {realized!r} has no probability mass")
    if len(dist) < 2:
        raise DegenerateDistribution("support too small to renormalize")
    rest = 1.0 - dist[realized]
    if rest <= 0.0:
        raise DegenerateDistribution(f"outcome {realized!r} carries all the mass")
    return {e: p / rest for e, p in dist.items() if e != realized}


@dataclass
class GenGoofState(GameState):
    cfg: GenGoofConfig
    tables: GenGoofTables
    realized: tuple = ()            # outcome labels, one per opened round
    acts1: tuple = ()
    acts2: tuple = ()
    rewards_in: np.ndarray = field(default_factory=lambda: np.zeros(2))
    totals: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def round(self) -> int:
        return len(self.acts2)

    @property
    def is_terminal(self) -> bool:
        return self.round >= self.cfg.rounds

    @property
    def is_chance(self) -> bool:
        return not self.is_terminal and len(self.realized) == self.round

    @property
    def chance_tag(self) -> str:
        return f"r{self.round}"

    @property
    def current_player(self) -> int:
        return 1 if len(self.acts1) == self.round else 2

    @property
    def last_rewards(self) -> np.ndarray:
        return self.rewards_in

    def _current_dist(self) -> dict[str, float]:
        dist = {outcome_label(i): p for i, p in enumerate(self.tables.initial_dist)}
        for e in self.realized:
            dist = renormalize(dist, e)
        return dist

    def chance_outcomes(self) -> list[tuple[str, float]]:
        return sorted(self._current_dist().items())

    def legal_actions(self) -> list[str]:
        return [action_label(i) for i in range(self.cfg.k)]

    def apply(self, label: str) -> "GenGoofState":
        if self.is_chance:
            if label not in self._current_dist():
                raise IllegalAction(f"outcome {label!r} not in the residual support")
            return replace(self, realized=self.realized + (label,),
                           rewards_in=np.zeros(2))
        if label not in self.legal_actions():
            raise IllegalAction(f"unknown action {label!r}")
        if self.current_player == 1:
            return replace(self, acts1=self.acts1 + (label,), rewards_in=np.zeros(2))
        r = self.round
        e = int(self.realized[r][1:])
        a1 = int(self.acts1[r][1:])
        a2 = int(label[1:])
        rew = self.tables.rewards[r, e, a1, a2].copy()
        return replace(self, acts2=self.acts2 + (label,), rewards_in=rew,
                       totals=self.totals + rew)

    def utilities(self) -> np.ndarray:
        assert self.is_terminal
        return self.totals

    def infostate(self, player: int) -> tuple:
        out = []
        rounds_opened = len(self.realized)
        for r in range(rounds_opened):
            if player == 2 and r > 0:
                # player 1's previous-round action becomes visible at round start
                out.append("x" + self.acts1[r - 1])
            out.append(self.realized[r])
            if player == 1:
                if r < len(self.acts1):
                    out.append(self.acts1[r])
                if r < len(self.acts2):
                    out.append("x" + self.acts2[r])
            else:
                if r < len(self.acts2):
                    out.append(self.acts2[r])
        if player == 2 and self.is_terminal:
            out.append("x" + self.acts1[-1])
        return tuple(out)


class GenGoofGame(Game):
    def __init__(self, config: GenGoofConfig | None = None,
                 tables: GenGoofTables | None = None):
        self.config = config or GenGoofConfig()
        self.tables = tables or GenGoofTables.generate(self.config)

    def initial_state(self) -> GenGoofState:
        return GenGoofState(self.config, self.tables)
