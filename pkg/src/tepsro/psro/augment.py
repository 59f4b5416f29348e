"""Adding best-response edges and re-estimating payoffs for new profiles.

Each selected infoset gains one new action edge. The simulation batch covers
every strategy profile containing at least one new edge: by default all
2^k - 1 subsets of the k new edges (new edge forced on the subset, uniform
over old actions elsewhere), with the total budget split equally. The
``linear`` scheme (singletons + per-player blocks + all) exists for ablations
whose powerset would be astronomically large.
"""

from __future__ import annotations

import itertools

import numpy as np

from tepsro.efg import BehavioralProfile
from tepsro.errors import InsufficientBudget
from tepsro.psro.empirical import EmpiricalGame
from tepsro.psro.play import play_episode


def _base_profile(emp: EmpiricalGame, new_tokens: dict) -> BehavioralProfile:
    """Uniform over pre-existing actions everywhere."""
    prof = BehavioralProfile()
    for (p, k), iset in emp.tree.infosets.items():
        old = [a for a in iset.actions if a != new_tokens.get((p, k))]
        prof.set(p, k, {a: 1.0 / len(old) for a in old})
    return prof


def enumerate_profiles(emp: EmpiricalGame, new_edges: list[tuple[int, str, str]],
                       scheme: str) -> list[BehavioralProfile]:
    new_tokens = {(p, k): tok for p, k, tok in new_edges}
    base = _base_profile(emp, new_tokens)
    k = len(new_edges)

    if scheme == "powerset":
        subsets = [s for r in range(1, k + 1)
                   for s in itertools.combinations(range(k), r)]
    elif scheme == "linear":
        subsets = [(i,) for i in range(k)]
        for player in (1, 2):
            block = tuple(i for i, (p, _, _) in enumerate(new_edges) if p == player)
            if len(block) > 1:
                subsets.append(block)
        full = tuple(range(k))
        if k > 1 and full not in subsets:
            subsets.append(full)
    else:
        raise ValueError(f"unknown profile scheme {scheme!r}")

    profiles = []
    for subset in subsets:
        prof = base.copy()
        for i in subset:
            p, key, tok = new_edges[i]
            prof.set(p, key, {tok: 1.0})
        profiles.append(prof)
    return profiles


def augment_tree(emp: EmpiricalGame, additions: dict[int, tuple[str, list[str]]],
                 budget: int, rng: np.random.Generator,
                 reveal_choices: dict | None = None,
                 scheme: str = "powerset") -> dict:
    """Add one labeled edge per selected infoset, then simulate the new profiles.

    ``additions`` maps player -> (new policy label, selected infoset keys); the
    policy must already be registered. ``reveal_choices`` carries the reveal
    bit observed for each (player, infoset) during gain estimation.
    """
    reveal_choices = reveal_choices or {}
    new_edges: list[tuple[int, str, str]] = []
    for player in sorted(additions):
        label, keys = additions[player]
        for key in sorted(keys):
            if emp.adapter.uses_reveal:
                bit = reveal_choices.get((player, key))
                emp.reveal_bits[(key, label)] = bool(bit) if bit is not None else False
            token = emp.edge_token(key, label)
            iset = emp.tree.infosets[(player, key)]
            if token not in iset.actions:
                iset.actions = iset.actions + (token,)
            new_edges.append((player, key, token))

    profiles = enumerate_profiles(emp, new_edges, scheme)
    if budget < len(profiles):
        raise InsufficientBudget(
            f"budget {budget} cannot cover {len(profiles)} new strategy profiles")
    per_profile = budget // len(profiles)

    batch = []
    for prof in profiles:
        for _ in range(per_profile):
            res = play_episode(emp, prof, seed=int(rng.integers(2 ** 31)), rng=rng,
                               extend=True)
            batch.append((res.path, res.payoffs))
    for path, payoff in batch:
        emp.merge_path(path, payoff, allow_extend=True)
    emp.fixup_infosets()
    emp.refresh_chance_probs()
    return {"profiles": len(profiles), "samples_per_profile": per_profile,
            "new_edges": new_edges}
