"""Subgame-perfect equilibrium via bottom-up CFR over the subgame-root tree.

Subgames are solved from the leaf-most height group upward. Each solve holds
every previously assigned infoset fixed (its nodes return exact continuation
values, recomputed from the tree rather than taken from CFR estimates), so no
infoset is ever reassigned and each part of the tree is traversed by at most
one solve's iterations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from tepsro.efg import (
    BehavioralProfile, GameTree, extract_subgame, profile_regret,
)
from tepsro.solvers.cfr import continuation_values, subgame_cfr
from tepsro.solvers.subgames import get_subgame_groups, get_subgame_roots

log = logging.getLogger(__name__)

DEFAULT_SUBGAME_ITERATIONS = 10_000
DEFAULT_TOL = 1e-3
RETRY_FACTOR = 4


@dataclass
class SpeReport:
    """Per-subgame achieved regret, for diagnostics."""

    subgame_regret: dict[int, float] = field(default_factory=dict)
    retried: list[int] = field(default_factory=list)

    @property
    def achieved_tol(self) -> float:
        return max(self.subgame_regret.values(), default=0.0)


def _subgame_regret(tree: GameTree, theta: int, profile: BehavioralProfile) -> float:
    sub, _ = extract_subgame(tree, theta)
    _, total = profile_regret(sub, profile.restrict(sub.infosets.keys()))
    return total


def compute_spe(tree: GameTree, iterations_per_subgame: int = DEFAULT_SUBGAME_ITERATIONS,
                *, tol: float = DEFAULT_TOL, report: SpeReport | None = None
                ) -> BehavioralProfile:
    """Approximate SPE: a behavioral profile covering every infoset of ``tree``."""
    psi = get_subgame_roots(tree)
    groups = get_subgame_groups(tree, psi)
    partial = BehavioralProfile()

    for k in range(1, psi.ell + 1):
        for theta in groups[k]:
            before = set(partial.keys())
            solved = subgame_cfr(tree, theta, partial, iterations_per_subgame)
            new_keys = [pk for pk in solved.keys() if pk not in before]
            if not new_keys:
                continue
            candidate = partial.copy()
            candidate.update(solved.restrict(new_keys))
            achieved = _subgame_regret(tree, theta, candidate)
            if achieved > tol:
                retry = subgame_cfr(tree, theta, partial,
                                    RETRY_FACTOR * iterations_per_subgame)
                retry_candidate = partial.copy()
                retry_candidate.update(retry.restrict(new_keys))
                retry_achieved = _subgame_regret(tree, theta, retry_candidate)
                if report is not None:
                    report.retried.append(theta)
                if retry_achieved < achieved:
                    candidate, achieved = retry_candidate, retry_achieved
                if achieved > tol:
                    log.info("subgame at node %d converged to regret %.3g (> %.3g)",
                             theta, achieved, tol)
            if report is not None:
                report.subgame_regret[theta] = achieved
            for pk in new_keys:
                assert pk not in partial, "partial solution would be overwritten"
            partial = candidate

    partial.require_cover(tree)
    return partial


def subgame_values(tree: GameTree, profile: BehavioralProfile) -> dict[int, np.ndarray]:
    """Exact value vector at every subgame root under ``profile``."""
    psi = get_subgame_roots(tree)
    values = continuation_values(tree, tree.root, profile)
    return {theta: values[theta] for theta in psi.roots}
