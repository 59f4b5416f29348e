"""Q-learning best-response oracle against a fixed opponent.

Standard DQN: epsilon-greedy episodes against sampled opponent behavior,
TD(0) targets from a periodically synced target network, Huber loss, Adam
updates, with illegal actions masked both at selection and inside the target
max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tepsro.errors import TrainingDiverged
from tepsro.games.base import Game, Simulator
from tepsro.oracle.nets import Adam, Mlp, huber
from tepsro.oracle.policies import PolicyParameters, masked_argmax
from tepsro.oracle.replay import ReplayBuffer


@dataclass
class DqnHyperparams:
    training_steps: int = 150_000
    hidden_neurons: int = 100
    epsilon_start: float = 1.0
    epsilon_min: float = 0.02
    learning_rate: float = 1e-4
    target_update_freq: int = 2
    batch_size: int = 64
    warmup_steps: int = 10_000
    buffer_capacity: int = 200_000
    decay_horizon: int | None = None  # defaults to half the training steps

    def __post_init__(self):
        if not (0.0 < self.epsilon_min < 1.0):
            raise ValueError("epsilon_min must be in (0, 1)")
        if self.training_steps <= self.warmup_steps:
            raise ValueError("training_steps must exceed warmup_steps")

    def epsilon(self, step: int) -> float:
        horizon = self.decay_horizon or self.training_steps // 2
        return max(self.epsilon_min,
                   self.epsilon_start - step * (self.epsilon_start - self.epsilon_min) / horizon)


def dqn_train(game: Game, opponent_actor, player: int, encoder,
              actions: tuple[str, ...], hp: DqnHyperparams,
              rng: np.random.Generator, label: str) -> PolicyParameters:
    """Train a best-response Q-network; returns weights under ``label``.

    ``opponent_actor(sim)`` must advance the simulator through exactly one
    opponent turn (it is called whenever it is not the learner's move).
    """
    probe = Simulator(game)
    probe.reset(int(rng.integers(2 ** 31)))
    obs_dim = encoder(probe.infostate(player)).shape[0]
    n_actions = len(actions)
    index = {a: i for i, a in enumerate(actions)}

    online = Mlp(obs_dim, hp.hidden_neurons, n_actions, rng)
    target = online.clone()
    opt = Adam(online.params(), hp.learning_rate)
    buffer = ReplayBuffer(hp.buffer_capacity, obs_dim, n_actions)

    sim: Simulator | None = None
    grad_steps = 0

    def legal_mask() -> np.ndarray:
        mask = np.zeros(n_actions, dtype=bool)
        for a in sim.legal_actions():
            mask[index[a]] = True
        return mask

    def advance_to_learner() -> float:
        """Play opponent turns until the learner moves or the game ends."""
        acc = 0.0
        while not sim.terminal and sim.current_player != player:
            res = opponent_actor(sim)
            acc += float(res.rewards[player - 1])
        return acc

    for step in range(hp.training_steps):
        if sim is None:
            sim = Simulator(game)
            sim.reset(int(rng.integers(2 ** 31)))
            advance_to_learner()
            if sim.terminal:
                sim = None
                continue

        obs = encoder(sim.infostate(player))
        mask = legal_mask()
        if rng.random() < hp.epsilon(step):
            choices = np.flatnonzero(mask)
            act_idx = int(choices[rng.integers(len(choices))])
        else:
            act_idx = masked_argmax(online.forward(obs), mask)

        res = sim.step(actions[act_idx])
        reward = float(res.rewards[player - 1])
        reward += advance_to_learner()

        if sim.terminal:
            buffer.push(obs, act_idx, reward, np.zeros(obs_dim),
                        np.zeros(n_actions, dtype=bool), True)
            sim = None
        else:
            buffer.push(obs, act_idx, reward, encoder(sim.infostate(player)),
                        legal_mask(), False)

        if buffer.inserted < hp.warmup_steps:
            continue

        b_obs, b_act, b_rew, b_next, b_legal, b_done = buffer.sample(hp.batch_size, rng)
        q_next = target.forward(b_next)
        q_next = np.where(b_legal, q_next, -np.inf)
        best_next = np.max(q_next, axis=1)
        best_next = np.where(b_done, 0.0, best_next)
        targets = b_rew + best_next

        q, pre, hid = online.forward_cached(b_obs)
        picked = q[np.arange(len(b_act)), b_act]
        loss, dgrad = huber(picked - targets)
        if not np.isfinite(loss.mean()):
            raise TrainingDiverged(step)
        grad_out = np.zeros_like(q)
        grad_out[np.arange(len(b_act)), b_act] = dgrad / len(b_act)
        grads = online.backward(b_obs, pre, hid, grad_out)
        opt.step(online.params(), grads)
        grad_steps += 1
        if grad_steps % hp.target_update_freq == 0:
            target.copy_from(online)

    return PolicyParameters(label, player, online.sizes, online.flat_weights())
