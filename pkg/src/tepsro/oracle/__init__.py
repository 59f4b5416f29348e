from tepsro.oracle.policies import (
    MlpPolicy, PolicyParameters, PolicyRegistry, TabularPolicy, policy_action,
)
from tepsro.oracle.dqn import DqnHyperparams, dqn_train
from tepsro.oracle.exact import exact_best_response

__all__ = [
    "MlpPolicy", "PolicyParameters", "PolicyRegistry", "TabularPolicy",
    "policy_action", "DqnHyperparams", "dqn_train", "exact_best_response",
]
