"""Tabular Q-learning over the rollout MDP, plus the joint-action baseline."""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass

import numpy as np

from ..env import BeamformingEnv, state_key
from .core import LearnerConfig, epsilon_greedy, epsilon_schedule


class QTable:
    """Dict-backed action-value table; unseen states read as all-zero rows."""

    def __init__(self, n_actions: int):
        if n_actions < 1:
            raise ValueError("need at least one action")
        self.n_actions = n_actions
        self._table: dict[tuple, np.ndarray] = {}
        self._zero = np.zeros(n_actions)
        self._zero.flags.writeable = False

    def row(self, key) -> np.ndarray:
        """Read-only view of the values at ``key`` (zeros if never updated)."""
        return self._table.get(key, self._zero)

    def max_value(self, key) -> float:
        row = self._table.get(key)
        return 0.0 if row is None else float(row.max())

    def mutable_row(self, key) -> np.ndarray:
        row = self._table.get(key)
        if row is None:
            row = np.zeros(self.n_actions)
            self._table[key] = row
        return row

    def __len__(self) -> int:
        return len(self._table)

    def keys(self):
        return self._table.keys()

    def save(self, path) -> None:
        entries = [
            [[list(codes), list(partial)], row.tolist()]
            for (codes, partial), row in sorted(self._table.items())
        ]
        blob = {"format": "wptbeam-qtable", "version": 1, "n_actions": self.n_actions, "entries": entries}
        with open(path, "w") as f:
            json.dump(blob, f)

    @classmethod
    def load(cls, path) -> "QTable":
        with open(path) as f:
            blob = json.load(f)
        if blob.get("format") != "wptbeam-qtable" or blob.get("version") != 1:
            raise ValueError(f"unrecognized checkpoint format in {path}")
        table = cls(blob["n_actions"])
        for (codes, partial), values in blob["entries"]:
            table._table[(tuple(codes), tuple(partial))] = np.array(values)
        return table


def q_update(table: QTable, key, action: int, reward: float, next_key, q_rate: float, gamma: float) -> None:
    """One temporal-difference backup: q += rate * (r + gamma * max q' - q)."""
    row = table.mutable_row(key)
    target = reward + gamma * table.max_value(next_key)
    row[action] += q_rate * (target - row[action])


@dataclass
class EpisodeRow:
    """Per-episode training metrics, wall time in seconds (harness converts)."""

    episode: int
    total_energy: float
    reward: float
    feasible: int
    epsilon: float
    wall_s: float


def train_tabular_rollout(
    env: BeamformingEnv, lcfg: LearnerConfig, episodes: int, seed
) -> tuple[QTable, list[EpisodeRow]]:
    """Q-learning on the rollout MDP: one shared table, agents act in order.

    State keys carry committed codes plus the partial-action tuple, so the
    table naturally distinguishes which agent moves next.
    """
    rng = np.random.default_rng(seed)
    table = QTable(env.n_codes)
    n_agents = env.n_agents
    rows = []
    for ep in range(episodes):
        t0 = time.perf_counter()
        eps = epsilon_schedule(ep, lcfg.epsilon_decay, lcfg.epsilon_floor)
        state = env.reset()
        ep_reward = 0.0
        for _ in range(env.cfg.max_steps):
            for agent in range(1, n_agents + 1):
                key = state_key(state)
                action = epsilon_greedy(table.row(key), eps, rng)
                res = env.step_rollout(agent, action)
                q_update(table, key, action, res.reward, state_key(res.next), lcfg.q_rate, lcfg.gamma)
                state = res.next
                ep_reward += res.reward
        rows.append(
            EpisodeRow(ep, state.prev_total, ep_reward, env.feasible_count(state), eps, time.perf_counter() - t0)
        )
    return table, rows


def greedy_rollout_episode(env: BeamformingEnv, table: QTable) -> tuple[tuple[int, ...], float]:
    """Run one exploitation-only episode; returns the final committed codes and total."""
    rng = np.random.default_rng(0)  # never consulted at epsilon 0
    state = env.reset()
    for _ in range(env.cfg.max_steps):
        for agent in range(1, env.n_agents + 1):
            action = epsilon_greedy(table.row(state_key(state)), 0.0, rng)
            state = env.step_rollout(agent, action).next
    return state.codes, state.prev_total


def train_joint_tabular(
    env: BeamformingEnv, lcfg: LearnerConfig, episodes: int, seed
) -> tuple[QTable, list[EpisodeRow]]:
    """Baseline without rollout: one Q row per state over all N^L joint actions."""
    actions = list(itertools.product(range(env.n_codes), repeat=env.n_agents))
    rng = np.random.default_rng(seed)
    table = QTable(len(actions))
    rows = []
    for ep in range(episodes):
        t0 = time.perf_counter()
        eps = epsilon_schedule(ep, lcfg.epsilon_decay, lcfg.epsilon_floor)
        state = env.reset()
        ep_reward = 0.0
        for _ in range(env.cfg.max_steps):
            key = state_key(state)
            idx = epsilon_greedy(table.row(key), eps, rng)
            res = env.step_joint(actions[idx])
            q_update(table, key, idx, res.reward, state_key(res.next), lcfg.q_rate, lcfg.gamma)
            state = res.next
            ep_reward += res.reward
        rows.append(
            EpisodeRow(ep, state.prev_total, ep_reward, env.feasible_count(state), eps, time.perf_counter() - t0)
        )
    return table, rows


def greedy_joint_episode(env: BeamformingEnv, table: QTable) -> tuple[tuple[int, ...], float]:
    actions = list(itertools.product(range(env.n_codes), repeat=env.n_agents))
    rng = np.random.default_rng(0)
    state = env.reset()
    for _ in range(env.cfg.max_steps):
        idx = epsilon_greedy(table.row(state_key(state)), 0.0, rng)
        state = env.step_joint(actions[idx]).next
    return state.codes, state.prev_total
