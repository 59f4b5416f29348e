"""Fixed-length infostate encodings for the Q-network input.

Bargaining layout (documented contract, stable across the package):

  [valuation]  n_types blocks of ceil(log2(total_value)) bits, value of one
               item of each type, little-endian bits
  [own signal] 1 bit, set when the signal is H
  [turns]      2*rounds blocks, one per player turn in order; each block is a
               one-hot partition (pool[i]+1 slots per item type, player 1's
               share) followed by 1 reveal bit; deal/walk turns stay zero
  [opp signal] 2 bits: 00 nothing revealed yet, 01 L, 10 H
  [complete]   1 bit, set once negotiations have ended

The multi-round event game uses: one-hot realized outcome per round, one-hot
own action per round, then a one-hot round counter.
"""

from __future__ import annotations

import math

import numpy as np

from tepsro.errors import EncodingError
from tepsro.games.bargain import BargainConfig, DEAL, WALK, parse_offer
from tepsro.games.gengoof import GenGoofConfig


def bargain_encoding_size(cfg: BargainConfig) -> int:
    bits = math.ceil(math.log2(cfg.total_value))
    block = sum(p + 1 for p in cfg.pool) + 1
    return cfg.n_types * bits + 1 + 2 * cfg.rounds * block + 2 + 1


def encode_bargain(infostate: tuple, cfg: BargainConfig) -> np.ndarray:
    bits = math.ceil(math.log2(cfg.total_value))
    block = sum(p + 1 for p in cfg.pool) + 1
    vec = np.zeros(bargain_encoding_size(cfg))

    tokens = list(infostate)
    if not tokens or not tokens[0].startswith("v"):
        raise EncodingError(f"expected a valuation token, got {tokens[:1]}")
    values = [int(x) for x in tokens[0][1:].split(",")]
    if len(values) != cfg.n_types:
        raise EncodingError("valuation arity does not match the pool")
    for i, val in enumerate(values):
        for b in range(bits):
            vec[i * bits + b] = (val >> b) & 1
    pos = cfg.n_types * bits

    if len(tokens) < 2 or not tokens[1].startswith("s"):
        raise EncodingError("expected a signal token")
    vec[pos] = 1.0 if tokens[1][1:] == "H" else 0.0
    pos += 1

    turn_base = pos
    opp_signal = None
    complete = False
    turn = 0
    for tok in tokens[2:]:
        raw = tok[1:] if tok.startswith("x") else tok
        revealed_sig = None
        if "+" in raw:
            raw, revealed_sig = raw.split("+")
        if raw in (DEAL, WALK):
            complete = True
        elif raw.startswith("o"):
            share, reveal = parse_offer(raw)
            if len(share) != cfg.n_types:
                raise EncodingError(f"offer arity mismatch in {tok!r}")
            if turn >= 2 * cfg.rounds:
                raise EncodingError("more turns than the horizon allows")
            off = turn_base + turn * block
            for i, s in enumerate(share):
                off_i = off + sum(p + 1 for p in cfg.pool[:i])
                if not (0 <= s <= cfg.pool[i]):
                    raise EncodingError(f"share {share} outside the pool")
                vec[off_i + s] = 1.0
            if reveal:
                vec[off + block - 1] = 1.0
        else:
            raise EncodingError(f"unrecognized token {tok!r}")
        if tok.startswith("x") and revealed_sig is not None:
            opp_signal = revealed_sig
        turn += 1
    if turn >= 2 * cfg.rounds:
        complete = True

    pos = turn_base + 2 * cfg.rounds * block
    if opp_signal == "L":
        vec[pos + 1] = 1.0
    elif opp_signal == "H":
        vec[pos] = 1.0
    vec[pos + 2] = 1.0 if complete else 0.0
    return vec


def gengoof_encoding_size(cfg: GenGoofConfig) -> int:
    return cfg.rounds * cfg.k + cfg.rounds * cfg.k + cfg.rounds


def encode_gengoof(infostate: tuple, cfg: GenGoofConfig) -> np.ndarray:
    vec = np.zeros(gengoof_encoding_size(cfg))
    outcomes = []
    own = []
    for tok in infostate:
        if tok.startswith("e"):
            outcomes.append(int(tok[1:]))
        elif tok.startswith("a"):
            own.append(int(tok[1:]))
        elif tok.startswith("x"):
            continue
        else:
            raise EncodingError(f"unrecognized token {tok!r}")
    if len(outcomes) > cfg.rounds or len(own) > cfg.rounds:
        raise EncodingError("more rounds than the game allows")
    for r, e in enumerate(outcomes):
        if not 0 <= e < cfg.k:
            raise EncodingError(f"outcome index {e} out of range")
        vec[r * cfg.k + e] = 1.0
    base = cfg.rounds * cfg.k
    for r, a in enumerate(own):
        if not 0 <= a < cfg.k:
            raise EncodingError(f"action index {a} out of range")
        vec[base + r * cfg.k + a] = 1.0
    base = 2 * cfg.rounds * cfg.k
    current = min(len(own), cfg.rounds - 1)
    if len(own) < cfg.rounds:
        vec[base + current] = 1.0
    return vec


def encode_infostate(game_kind: str, infostate: tuple, config) -> np.ndarray:
    if game_kind == "bargain":
        return encode_bargain(infostate, config)
    if game_kind == "gengoof":
        return encode_gengoof(infostate, config)
    raise EncodingError(f"no encoding for game kind {game_kind!r}")


def encoding_size(game_kind: str, config) -> int:
    if game_kind == "bargain":
        return bargain_encoding_size(config)
    if game_kind == "gengoof":
        return gengoof_encoding_size(config)
    raise EncodingError(f"no encoding for game kind {game_kind!r}")
