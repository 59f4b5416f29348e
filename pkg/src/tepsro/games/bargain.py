"""Alternating-offer bargaining over indivisible items with outside-offer signals.

Two players split a pool of items over at most ``rounds`` rounds (player 1
moves first each round). A turn is accept-latest-offer (``deal``), quit
(``walk``), or an offer-revelation pair: a proposed partition of the pool plus
the choice to disclose a private binary signal about the player's outside
option. Valuations, signals, and outside offers are drawn by chance at the
start of an instance; players observe their own valuation and signal but not
their own outside offer vector, and see the opponent's signal only after a
reveal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from tepsro.errors import IllegalAction, InfeasibleConfig
from tepsro.games.base import Game, GameState

DEAL = "deal"
WALK = "walk"


@dataclass(frozen=True)
class BargainConfig:
    pool: tuple[int, ...] = (2, 2, 2)
    total_value: int = 10            # every valuation satisfies v . pool == total_value
    threshold: int = 5               # signal boundary on the outside offer's value
    discount: float = 0.99
    rounds: int = 5
    p_high: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        if not (1 < self.threshold < self.total_value):
            raise InfeasibleConfig("threshold must lie strictly between 1 and total_value")
        if any(p < 0 for p in self.pool) or sum(self.pool) == 0:
            raise InfeasibleConfig("pool must be nonnegative with at least one item")
        if not (0.0 < self.discount <= 1.0):
            raise InfeasibleConfig("discount must be in (0, 1]")
        if self.rounds < 1:
            raise InfeasibleConfig("need at least one round")

    @property
    def n_types(self) -> int:
        return len(self.pool)

    @property
    def n_items(self) -> int:
        return sum(self.pool)


@lru_cache(maxsize=None)
def value_vectors(pool: tuple[int, ...], total: int) -> tuple[tuple[int, ...], ...]:
    """All nonnegative integer valuations v with v . pool == total (v_i = 0 on empty types)."""
    out: list[tuple[int, ...]] = []

    def rec(i: int, rem: int, acc: tuple[int, ...]):
        if i == len(pool):
            if rem == 0:
                out.append(acc)
            return
        if pool[i] == 0:
            rec(i + 1, rem, acc + (0,))
            return
        for val in range(rem // pool[i] + 1):
            rec(i + 1, rem - val * pool[i], acc + (val,))

    rec(0, total, ())
    return tuple(out)


@lru_cache(maxsize=None)
def valuation_pairs(pool: tuple[int, ...], total: int) -> tuple:
    """The constrained collection of valuation pairs, in deterministic order."""
    singles = value_vectors(pool, total)
    live = [i for i, p in enumerate(pool) if p > 0]
    pairs = []
    for v1 in singles:
        for v2 in singles:
            if any(v1[i] + v2[i] == 0 for i in live):
                continue
            if not any(v1[i] * v2[i] > 0 for i in live):
                continue
            pairs.append((v1, v2))
    if not pairs:
        raise InfeasibleConfig(f"no valuation pair satisfies the constraints for "
                               f"pool={pool}, total={total}")
    return tuple(pairs)


@lru_cache(maxsize=None)
def offer_space(pool: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """All partitions of the pool, as player 1's share, in mixed-radix order."""
    return tuple(itertools.product(*[range(p + 1) for p in pool]))


def offer_label(share: tuple[int, ...], reveal: bool) -> str:
    return "o" + ",".join(map(str, share)) + (":R" if reveal else ":N")


def parse_offer(label: str) -> tuple[tuple[int, ...], bool]:
    body, flag = label[1:].split(":")
    return tuple(int(x) for x in body.split(",")), flag == "R"


@lru_cache(maxsize=None)
def action_labels(pool: tuple[int, ...]) -> tuple[str, ...]:
    """Canonical flattened action list: deal, walk, then offers x {no-reveal, reveal}."""
    out = [DEAL, WALK]
    for share in offer_space(pool):
        out.append(offer_label(share, False))
        out.append(offer_label(share, True))
    return tuple(out)


def outside_offer_band(pool, v, threshold, total, signal) -> tuple[tuple[int, ...], ...]:
    """Baskets whose value under v falls in the signal's band."""
    lo, hi = (0, threshold) if signal == "L" else (threshold, total)
    return tuple(b for b in offer_space(pool)
                 if lo < sum(x * y for x, y in zip(b, v)) <= hi)


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


_PHASES = ("v", "s1", "o1", "s2", "o2", "play")


@dataclass
class BargainState(GameState):
    cfg: BargainConfig
    phase: str = "v"
    v1: tuple | None = None
    v2: tuple | None = None
    s1: str | None = None
    s2: str | None = None
    o1: tuple | None = None
    o2: tuple | None = None
    taken: tuple = ()                       # action labels in turn order
    latest_offer: tuple | None = None       # player 1's share in the standing offer
    revealed: tuple = (False, False)
    outcome: str | None = None              # "deal" | "walk" | "timeout"
    ended_turn: int = -1
    rewards_in: np.ndarray = field(default_factory=lambda: np.zeros(2))

    # -- structure ---------------------------------------------------------

    @property
    def is_terminal(self) -> bool:
        return self.outcome is not None

    @property
    def is_chance(self) -> bool:
        return self.phase != "play" and self.outcome is None

    @property
    def chance_tag(self) -> str:
        return self.phase

    @property
    def turn(self) -> int:
        return len(self.taken)

    @property
    def current_player(self) -> int:
        return 1 if self.turn % 2 == 0 else 2

    @property
    def last_rewards(self) -> np.ndarray:
        return self.rewards_in

    # -- chance --------------------------------------------------------------

    def chance_outcomes(self) -> list[tuple[str, float]]:
        cfg = self.cfg
        if self.phase == "v":
            pairs = valuation_pairs(cfg.pool, cfg.total_value)
            p = 1.0 / len(pairs)
            return [(f"v{i}", p) for i in range(len(pairs))]
        if self.phase in ("s1", "s2"):
            j = 1 if self.phase == "s1" else 2
            v = self.v1 if j == 1 else self.v2
            ph = cfg.p_high[j - 1]
            # a signal whose offer band is empty cannot be drawn
            if not outside_offer_band(cfg.pool, v, cfg.threshold, cfg.total_value, "L"):
                ph = 1.0
            elif not outside_offer_band(cfg.pool, v, cfg.threshold, cfg.total_value, "H"):
                ph = 0.0
            out = []
            if ph > 0.0:
                out.append(("H", ph))
            if ph < 1.0:
                out.append(("L", 1.0 - ph))
            return out
        if self.phase in ("o1", "o2"):
            j = 1 if self.phase == "o1" else 2
            v = self.v1 if j == 1 else self.v2
            sig = self.s1 if j == 1 else self.s2
            band = outside_offer_band(cfg.pool, v, cfg.threshold, cfg.total_value, sig)
            p = 1.0 / len(band)
            return [("b" + ",".join(map(str, b)), p) for b in band]
        raise AssertionError(f"not a chance phase: {self.phase}")

    # -- decisions -----------------------------------------------------------

    def legal_actions(self) -> list[str]:
        labels = action_labels(self.cfg.pool)
        if self.turn == 0:
            return [a for a in labels if a not in (DEAL, WALK)]
        return list(labels)

    def apply(self, label: str) -> "BargainState":
        if self.is_chance:
            return self._apply_chance(label)
        if label not in self.legal_actions():
            raise IllegalAction(f"{label!r} is not legal at turn {self.turn}")
        cfg = self.cfg
        turn = self.turn
        rho = turn // 2 + 1
        taken = self.taken + (label,)
        if label == DEAL:
            share1 = self.latest_offer
            u = np.array([cfg.discount ** (rho - 1) * _dot(share1, self.v1),
                          cfg.discount ** (rho - 1) *
                          _dot(tuple(p - s for p, s in zip(cfg.pool, share1)), self.v2)])
            return replace(self, taken=taken, outcome="deal", ended_turn=turn,
                           rewards_in=u)
        if label == WALK:
            u = np.array([cfg.discount ** rho * _dot(self.o1, self.v1),
                          cfg.discount ** rho * _dot(self.o2, self.v2)])
            return replace(self, taken=taken, outcome="walk", ended_turn=turn,
                           rewards_in=u)
        share, reveal = parse_offer(label)
        revealed = self.revealed
        if reveal:
            revealed = (True, revealed[1]) if self.current_player == 1 else (revealed[0], True)
        nxt = replace(self, taken=taken, latest_offer=share, revealed=revealed,
                      rewards_in=np.zeros(2))
        if len(taken) >= 2 * cfg.rounds:
            u = np.array([cfg.discount ** cfg.rounds * _dot(self.o1, self.v1),
                          cfg.discount ** cfg.rounds * _dot(self.o2, self.v2)])
            return replace(nxt, outcome="timeout", ended_turn=turn, rewards_in=u)
        return nxt

    def _apply_chance(self, label: str) -> "BargainState":
        cfg = self.cfg
        z = np.zeros(2)
        if self.phase == "v":
            pairs = valuation_pairs(cfg.pool, cfg.total_value)
            v1, v2 = pairs[int(label[1:])]
            return replace(self, phase="s1", v1=v1, v2=v2, rewards_in=z)
        if self.phase == "s1":
            return replace(self, phase="o1", s1=label, rewards_in=z)
        if self.phase == "o1":
            basket = tuple(int(x) for x in label[1:].split(","))
            return replace(self, phase="s2", o1=basket, rewards_in=z)
        if self.phase == "s2":
            return replace(self, phase="o2", s2=label, rewards_in=z)
        basket = tuple(int(x) for x in label[1:].split(","))
        return replace(self, phase="play", o2=basket, rewards_in=z)

    def utilities(self) -> np.ndarray:
        assert self.is_terminal
        return self.rewards_in

    # -- information ---------------------------------------------------------

    def infostate(self, player: int) -> tuple:
        v = self.v1 if player == 1 else self.v2
        s = self.s1 if player == 1 else self.s2
        out = []
        if v is not None:
            out.append("v" + ",".join(map(str, v)))
        if s is not None:
            out.append("s" + s)
        opp_sig = self.s2 if player == 1 else self.s1
        for t, label in enumerate(self.taken):
            actor = 1 if t % 2 == 0 else 2
            if actor == player:
                out.append(label)
            else:
                tok = "x" + label
                if label not in (DEAL, WALK) and parse_offer(label)[1]:
                    tok += "+" + opp_sig
                out.append(tok)
        return tuple(out)


class BargainGame(Game):
    def __init__(self, config: BargainConfig | None = None):
        self.config = config or BargainConfig()

    def initial_state(self) -> BargainState:
        return BargainState(self.config)


def sample_instance(cfg: BargainConfig, rng: np.random.Generator):
    """Draw (v1, v2, s1, s2, o1, o2) exactly as the chance phases do."""
    state = BargainGame(cfg).initial_state()
    while state.is_chance:
        outcomes = state.chance_outcomes()
        probs = np.array([p for _, p in outcomes])
        idx = int(rng.choice(len(outcomes), p=probs / probs.sum()))
        state = state.apply(outcomes[idx][0])
    return state.v1, state.v2, state.s1, state.s2, state.o1, state.o2
