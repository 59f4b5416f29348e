"""Executable policies and the label registry backing the empirical game."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tepsro.errors import NoLegalAction, UnknownPolicy
from tepsro.oracle.nets import Mlp


@dataclass
class PolicyParameters:
    """Feed-forward policy weights registered under an abstract label."""

    label: str
    player: int
    sizes: tuple[int, int, int]
    weights: np.ndarray  # flat

    def build(self) -> Mlp:
        net = Mlp(*self.sizes)
        net.load_flat(self.weights)
        return net

    def to_json(self) -> dict:
        return {"label": self.label, "player": self.player, "kind": "mlp",
                "dims": list(self.sizes), "weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "PolicyParameters":
        return cls(data["label"], data["player"], tuple(data["dims"]),
                   np.asarray(data["weights"], dtype=float))


def masked_argmax(q: np.ndarray, legal_mask: np.ndarray) -> int:
    """Highest-Q legal action; ties resolve to the lowest index."""
    if not legal_mask.any():
        raise NoLegalAction("every action is masked")
    masked = np.where(legal_mask, q, -np.inf)
    return int(np.argmax(masked))


class MlpPolicy:
    """Greedy network policy over a fixed, canonically ordered action list."""

    def __init__(self, params: PolicyParameters, encoder, actions: tuple[str, ...]):
        self.params = params
        self.encoder = encoder
        self.actions = tuple(actions)
        self.net = params.build()
        self._index = {a: i for i, a in enumerate(self.actions)}

    @property
    def label(self) -> str:
        return self.params.label

    def q_values(self, infostate: tuple) -> np.ndarray:
        return self.net.forward(self.encoder(infostate))

    def act(self, infostate: tuple, legal: list[str], reveal: bool | None = None) -> str:
        q = self.q_values(infostate)
        mask = np.zeros(len(self.actions), dtype=bool)
        for a in legal:
            mask[self._index[a]] = True
        if reveal is not None:
            for a in legal:
                if a.startswith("o") and a.endswith(":R") != reveal:
                    mask[self._index[a]] = False
            if not mask.any():  # only deal/walk masked out by the reveal filter
                for a in legal:
                    mask[self._index[a]] = True
        return self.actions[masked_argmax(q, mask)]


class TabularPolicy:
    """Pure-strategy lookup policy (exact best responses at reduced scale)."""

    def __init__(self, label: str, player: int, table: dict[tuple, str]):
        self.label = label
        self.player = player
        self.table = dict(table)

    def act(self, infostate: tuple, legal: list[str], reveal: bool | None = None) -> str:
        choice = self.table.get(tuple(infostate))
        if choice is not None and choice in legal:
            return choice
        if not legal:
            raise NoLegalAction("no legal action at this infostate")
        return legal[0]

    def to_json(self) -> dict:
        return {"label": self.label, "player": self.player, "kind": "tabular",
                "table": [[list(k), v] for k, v in sorted(self.table.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "TabularPolicy":
        return cls(data["label"], data["player"],
                   {tuple(k): v for k, v in data["table"]})


def policy_action(policy, infostate: tuple, legal: list[str],
                  reveal: bool | None = None) -> str:
    """Uniform entry point: greedy action of any policy kind, legality-masked."""
    return policy.act(infostate, legal, reveal)


class PolicyRegistry:
    """Label -> executable policy, per player."""

    def __init__(self):
        self._policies: dict[tuple[int, str], object] = {}

    def register(self, player: int, policy) -> None:
        self._policies[(player, policy.label)] = policy

    def get(self, player: int, label: str):
        try:
            return self._policies[(player, label)]
        except KeyError:
            raise UnknownPolicy(f"player {player} has no policy {label!r}") from None

    def __contains__(self, key: tuple[int, str]) -> bool:
        return key in self._policies

    def labels(self, player: int) -> list[str]:
        return [lbl for (p, lbl) in self._policies if p == player]

    def items(self):
        return self._policies.items()

    def to_json(self) -> list[dict]:
        return [pol.to_json() if hasattr(pol, "to_json") else pol.params.to_json()
                for _, pol in sorted(self._policies.items())]
