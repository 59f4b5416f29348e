"""Game-specific mapping between true-game events and empirical-tree tokens.

An adapter decides which stochastic events appear explicitly in the empirical
tree, how decision edges are written as tokens, what kind of node sits at each
path position, and which part of the path each player's empirical infoset key
may condition on.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

from tepsro.efg import make_key
from tepsro.errors import InfeasibleConfig
from tepsro.games.bargain import BargainConfig, BargainGame, action_labels
from tepsro.games.gengoof import (
    GenGoofConfig, GenGoofGame, action_label, outcome_label, renormalize,
)
from tepsro.oracle import encoding

CONTINUE = "<continue>"


def edge_label(token: str) -> str:
    """Policy label carried by an edge token."""
    return token.split(":")[0]


def edge_reveal(token: str) -> bool | None:
    if ":" not in token:
        return None
    return token.endswith(":R")


class EmpiricalAdapter(ABC):
    kind: str
    game = None

    @abstractmethod
    def chance_token(self, tag: str, label: str) -> str | None:
        """Path token for a realized event, or None when coarsened away."""

    @abstractmethod
    def position_kind(self, prefix: tuple) -> tuple:
        """("chance", tag) or ("decision", player) for the node at this path position."""

    @abstractmethod
    def infoset_key(self, player: int, prefix: tuple) -> str:
        """Observable projection of the path for the player acting at this position."""

    @abstractmethod
    def analytic_chance_probs(self, prefix: tuple) -> dict[str, float] | None:
        """Known outcome distribution at a chance position; None = estimate from counts."""

    @abstractmethod
    def chance_outcome_labels(self, prefix: tuple) -> list[str]:
        """All possible tokens at a chance position."""

    def edge_token(self, label: str, reveal: bool | None) -> str:
        if reveal is None:
            return label
        return f"{label}:{'R' if reveal else 'N'}"

    @property
    @abstractmethod
    def uses_reveal(self) -> bool: ...

    @abstractmethod
    def encoder(self):
        """infostate tuple -> network input vector."""

    @abstractmethod
    def concrete_actions(self) -> tuple[str, ...]:
        """Canonical flattened action list for Q-networks."""


class BargainAdapter(EmpiricalAdapter):
    """Signal draws are explicit chance layers; valuations and outside offers
    stay implicit. Edge tokens carry the policy label plus the reveal bit; a
    reveal makes the revealer's signal observable to the opponent from then on.
    """

    kind = "bargain"
    uses_reveal = True

    def __init__(self, config: BargainConfig | None = None):
        self.config = config or BargainConfig()
        self.game = BargainGame(self.config)

    def chance_token(self, tag: str, label: str) -> str | None:
        return label if tag in ("s1", "s2") else None

    def position_kind(self, prefix: tuple) -> tuple:
        if len(prefix) == 0:
            return ("chance", "s1")
        if len(prefix) == 1:
            return ("chance", "s2")
        return ("decision", 1 if (len(prefix) - 2) % 2 == 0 else 2)

    def infoset_key(self, player: int, prefix: tuple) -> str:
        own = prefix[0] if player == 1 else prefix[1]
        tokens = ["s" + own]
        revealed = False
        for i, tok in enumerate(prefix[2:]):
            actor = 1 if i % 2 == 0 else 2
            if actor != player and edge_reveal(tok):
                revealed = True
        if revealed:
            tokens.append("os" + (prefix[1] if player == 1 else prefix[0]))
        tokens.extend(prefix[2:])
        return make_key(player, tokens)

    def analytic_chance_probs(self, prefix: tuple) -> dict[str, float] | None:
        return None

    def chance_outcome_labels(self, prefix: tuple) -> list[str]:
        return ["H", "L"]

    def encoder(self):
        cfg = self.config
        return lambda infostate: encoding.encode_bargain(infostate, cfg)

    def concrete_actions(self) -> tuple[str, ...]:
        return action_labels(self.config.pool)


class GenGoofAdapter(EmpiricalAdapter):
    """Included rounds' events are explicit chance layers with analytically
    known residual-support distributions; the opponent's in-round action is
    hidden from player 2's infoset key (its last path token is dropped).
    """

    kind = "gengoof"
    uses_reveal = False

    def __init__(self, config: GenGoofConfig | None = None,
                 included_rounds: tuple[int, ...] = (0,), tables=None):
        self.config = config or GenGoofConfig()
        self.ir = tuple(included_rounds)
        if list(self.ir) != list(range(len(self.ir))) or not self.ir:
            raise InfeasibleConfig("included rounds must be a prefix range like (0,) or (0, 1)")
        if len(self.ir) > self.config.rounds:
            raise InfeasibleConfig("more included rounds than the game has")
        self.game = GenGoofGame(self.config, tables)

    def chance_token(self, tag: str, label: str) -> str | None:
        rnd = int(tag[1:])
        return label if rnd in self.ir else None

    def _schedule(self):
        """Position slots in order: ("chance", tag) and ("decision", player)."""
        for r in range(self.config.rounds):
            if r in self.ir:
                yield ("chance", f"r{r}")
            yield ("decision", 1)
            yield ("decision", 2)

    def position_kind(self, prefix: tuple) -> tuple:
        for i, slot in enumerate(self._schedule()):
            if i == len(prefix):
                return slot
        return ("decision", 1 if len(prefix) % 2 == 0 else 2)

    def infoset_key(self, player: int, prefix: tuple) -> str:
        if player == 2 and prefix:
            return make_key(player, prefix[:-1])
        return make_key(player, prefix)

    def analytic_chance_probs(self, prefix: tuple) -> dict[str, float] | None:
        dist = {outcome_label(i): p
                for i, p in enumerate(self.game.tables.initial_dist)}
        for tok in prefix:
            if tok.startswith("e"):
                dist = renormalize(dist, tok)
        return dist

    def chance_outcome_labels(self, prefix: tuple) -> list[str]:
        return sorted(self.analytic_chance_probs(prefix))

    def encoder(self):
        cfg = self.config
        return lambda infostate: encoding.encode_gengoof(infostate, cfg)

    def concrete_actions(self) -> tuple[str, ...]:
        return tuple(action_label(i) for i in range(self.config.k))
