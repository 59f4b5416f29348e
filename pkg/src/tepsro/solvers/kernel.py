"""CFR kernel selection: compiled extension when available, pure Python otherwise.

Set ``TEPSRO_PURE_PYTHON=1`` to force the fallback (used by the parity tests
and the benchmark).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("TEPSRO_PURE_PYTHON"):
    from tepsro.solvers import _cfr_py as _impl
else:
    try:
        from tepsro.solvers import _cfr_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from tepsro.solvers import _cfr_py as _impl

COMPILED: bool = _impl.COMPILED


def run_iterations(flat, iterations: int, regret: np.ndarray, strat_sum: np.ndarray,
                   current: np.ndarray, impl=None) -> np.ndarray:
    """Run CFR iterations in place; returns the per-iteration root value pairs."""
    root_values = np.zeros((iterations, 2))
    mod = impl if impl is not None else _impl
    mod.run(flat.kind, flat.player, flat.iset, flat.child_off, flat.child,
            flat.cprob, flat.util, flat.iset_off, iterations,
            regret, strat_sum, current, root_values,
            flat.max_depth, flat.max_actions)
    return root_values
