"""Shared learning machinery: returns, exploration, and hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LearnerConfig:
    gamma: float = 0.9
    actor_rate: float = 0.1
    critic_rate: float = 0.1
    q_rate: float = 0.1
    epsilon_decay: float = 0.995
    epsilon_floor: float = 0.01
    hidden: int = 64
    workers: int = 1
    share_policy: bool = False

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        for name in ("actor_rate", "critic_rate", "q_rate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise ValueError(f"epsilon_decay must be in (0, 1], got {self.epsilon_decay}")
        if not 0.0 <= self.epsilon_floor <= 1.0:
            raise ValueError(f"epsilon_floor must be in [0, 1], got {self.epsilon_floor}")
        if self.hidden < 1:
            raise ValueError("hidden width must be at least 1")
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")


def discounted_gain(rewards, gamma: float) -> list[float]:
    """Gains G_t = R_t + gamma * G_{t+1}, computed backward over one episode."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    gains = [0.0] * len(rewards)
    g = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        g = rewards[t] + gamma * g
        gains[t] = g
    return gains


def epsilon_schedule(episode: int, decay: float = 0.995, floor: float = 0.01) -> float:
    """Exponentially decaying exploration rate, starting at 1 and leveling at ``floor``."""
    if episode < 0:
        raise ValueError(f"episode must be nonnegative, got {episode}")
    return max(floor, decay**episode)


def epsilon_greedy(qrow, epsilon: float, rng: np.random.Generator) -> int:
    """Greedy action with probability 1 - epsilon, uniform otherwise.

    The greedy action therefore lands with probability 1 - epsilon + epsilon/N
    and every other action with epsilon/N. Argmax ties pick the lowest index.
    """
    n = len(qrow)
    if n == 0:
        raise ValueError("empty action-value row")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        return int(rng.integers(n))
    return int(np.argmax(qrow))
