"""Exact best responses on a fully expanded true game.

Desk-scale stand-in for the learned oracle: expand the simulator's game to an
explicit tree (chance outcomes and legal actions enumerated), then run the
exact backward-pass best response from the core module. The resulting pure
strategy doubles as an executable lookup policy because expansion infoset
keys are canonical infostate strings.
"""

from __future__ import annotations

from tepsro.efg import BehavioralProfile, GameTree, best_response_value
from tepsro.games.base import DEFAULT_NODE_CAP, Game, expand_game
from tepsro.oracle.policies import TabularPolicy


def exact_best_response(tree: GameTree, player: int,
                        opponent: BehavioralProfile) -> tuple[float, BehavioralProfile]:
    """Best-response value and argmax pure strategy on an expanded true game."""
    return best_response_value(tree, player, opponent)


def expand(game: Game, node_cap: int = DEFAULT_NODE_CAP) -> GameTree:
    return expand_game(game, node_cap)


def pure_profile_to_policy(profile: BehavioralProfile, player: int,
                           label: str) -> TabularPolicy:
    """Turn a pure best-response profile into an executable lookup policy."""
    table: dict[tuple, str] = {}
    for (p, key), dist in profile.items():
        if p != player:
            continue
        action = max(dist.items(), key=lambda kv: kv[1])[0]
        prefix = f"{player}|"
        if key == str(player):
            tokens: tuple = ()
        else:
            assert key.startswith(prefix)
            tokens = tuple(key[len(prefix):].split("|"))
        table[tokens] = action
    return TabularPolicy(label, player, table)
