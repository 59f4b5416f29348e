from tepsro.solvers.subgames import SubgameRootTree, get_subgame_roots, get_subgame_groups
from tepsro.solvers.cfr import CfrState, cfr_solve, subgame_cfr
from tepsro.solvers.spe import compute_spe
from tepsro.solvers.gbi import gbi_enumerate

__all__ = [
    "SubgameRootTree", "get_subgame_roots", "get_subgame_groups",
    "CfrState", "cfr_solve", "subgame_cfr", "compute_spe", "gbi_enumerate",
]
