"""Advantage actor-critic over the rollout MDP.

Each transmitter holds its own actor and critic by default (a shared pair is
optional). Actors are trained by advantage-weighted score ascent where the
advantage is the episode gain minus the critic's value; critics descend the
squared error against one-step bootstrapped targets. With one worker training
is bit-deterministic; with several, workers apply gradient batches to a shared
parameter store under a lock.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

import numpy as np

from ..env import BeamformingEnv, observation
from ..errors import DivergenceError
from .core import LearnerConfig, discounted_gain
from .nets import (
    MlpParams,
    actor_probs,
    actor_score_and_grads,
    apply_gradients,
    critic_loss_and_grads,
    critic_values_batch,
    init_mlp,
)


REWARD_SCALE = 100.0
"""Rewards are multiples of 100 points; gains and targets are learned at unit scale."""


@dataclass
class ACAgent:
    actor: MlpParams
    critic: MlpParams


def observation_scale(env: BeamformingEnv) -> np.ndarray:
    """Per-feature scaling that maps observations to roughly unit range.

    Energies are divided by the largest per-receiver energy any assignment can
    produce, code indices by the codebook size. Deterministic per instance, so
    training and greedy evaluation see identical inputs.
    """
    best = env.links.gains.max(axis=2).sum(axis=1)  # per receiver, every tx at its best code
    e_ref = env.cfg.transfer_time * float(best.max())
    if e_ref <= 0.0:
        e_ref = 1.0
    scale = [1.0 / e_ref] * env.cfg.n_receivers + [1.0 / env.n_codes] * env.n_agents
    return np.array(scale)


def init_agents(
    n_agents: int, obs_dim: int, n_actions: int, lcfg: LearnerConfig, rng: np.random.Generator
) -> list[ACAgent]:
    """One actor/critic pair per agent, or a single shared pair if configured."""
    dims_actor = (obs_dim, lcfg.hidden, lcfg.hidden, n_actions)
    dims_critic = (obs_dim, lcfg.hidden, lcfg.hidden, 1)
    if lcfg.share_policy:
        shared = ACAgent(init_mlp(dims_actor, rng), init_mlp(dims_critic, rng))
        return [shared] * n_agents
    return [ACAgent(init_mlp(dims_actor, rng), init_mlp(dims_critic, rng)) for _ in range(n_agents)]


def sample_action(probs: np.ndarray, rng: np.random.Generator) -> int:
    if not np.all(np.isfinite(probs)):
        raise DivergenceError("actor produced a non-finite action distribution")
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    return min(idx, len(probs) - 1)


def _check_finite(value: float, grads, what: str) -> None:
    if not np.isfinite(value) or any(
        not (np.isfinite(dw).all() and np.isfinite(db).all()) for dw, db in grads
    ):
        raise DivergenceError(f"non-finite {what}; lower the learning rates")


def critic_step(params: MlpParams, transitions, gamma: float, rate: float) -> float:
    """One descent step on the squared error against r + gamma * v(s') targets.

    transitions is (observations, rewards, next_observations); the target uses
    the current parameters and is held constant during differentiation.
    Returns the pre-step loss.
    """
    X, rewards, X_next = transitions
    targets = np.asarray(rewards, dtype=float) + gamma * critic_values_batch(params, X_next)
    loss, grads = critic_loss_and_grads(params, X, targets)
    _check_finite(loss, grads, "critic loss")
    apply_gradients(params, grads, rate, sign=-1.0)
    return loss


def actor_step(params: MlpParams, observations, actions, advantages, rate: float) -> float:
    """One ascent step on the advantage-weighted log-likelihood; returns the score."""
    score, grads = actor_score_and_grads(params, observations, actions, advantages)
    _check_finite(score, grads, "actor score")
    apply_gradients(params, grads, rate, sign=+1.0)
    return score


def _run_episode(env: BeamformingEnv, agents: list[ACAgent], rng: np.random.Generator, scale: np.ndarray):
    """Sample one episode; returns per-agent buffers, the final state, and the reward sum.

    Buffered observations are pre-scaled; buffered rewards are at learning
    scale (true points divided by REWARD_SCALE).
    """
    n_agents = env.n_agents
    xs = [[] for _ in range(n_agents)]
    acts = [[] for _ in range(n_agents)]
    rews = [[] for _ in range(n_agents)]
    state = env.reset()
    ep_reward = 0.0
    for _ in range(env.cfg.max_steps):
        for agent in range(1, n_agents + 1):
            x = observation(state) * scale
            probs = actor_probs(agents[agent - 1].actor, x)
            a = sample_action(probs, rng)
            res = env.step_rollout(agent, a)
            xs[agent - 1].append(x)
            acts[agent - 1].append(a)
            rews[agent - 1].append(res.reward / REWARD_SCALE)
            state = res.next
            ep_reward += res.reward
    return xs, acts, rews, state, ep_reward


def _episode_grads(agents: list[ACAgent], lcfg: LearnerConfig, xs, acts, rews, final_obs):
    """Per-network gradient batches for one episode (pure; nothing applied)."""
    updates = []  # (agent index, actor grads, actor score, critic grads, critic loss)
    seen: set[int] = set()
    for k in range(len(agents)):
        if id(agents[k]) in seen:
            continue
        seen.add(id(agents[k]))
        if lcfg.share_policy:
            X = np.array([x for buf in xs for x in buf])
            actions = [a for buf in acts for a in buf]
            gains = [g for buf in rews for g in discounted_gain(buf, lcfg.gamma)]
            X_next_parts = [np.vstack([np.array(buf[1:]).reshape(-1, len(final_obs)), final_obs[None, :]]) for buf in xs]
            X_next = np.vstack(X_next_parts)
            rewards = [r for buf in rews for r in buf]
        else:
            X = np.array(xs[k])
            actions = acts[k]
            gains = discounted_gain(rews[k], lcfg.gamma)
            X_next = np.vstack([X[1:], final_obs[None, :]])
            rewards = rews[k]
        values = critic_values_batch(agents[k].critic, X)
        advantages = np.asarray(gains) - values
        targets = np.asarray(rewards, dtype=float) + lcfg.gamma * critic_values_batch(agents[k].critic, X_next)
        closs, cgrads = critic_loss_and_grads(agents[k].critic, X, targets)
        ascore, agrads = actor_score_and_grads(agents[k].actor, X, actions, advantages)
        _check_finite(closs, cgrads, "critic loss")
        _check_finite(ascore, agrads, "actor score")
        updates.append((k, agrads, cgrads))
    return updates


@dataclass
class ACEpisodeRow:
    episode: int
    total_energy: float
    reward: float
    feasible: int
    epsilon: float
    wall_s: float


def train_actor_critic_rollout(
    env: BeamformingEnv, lcfg: LearnerConfig, episodes: int, seed
) -> tuple[list[ACAgent], list[ACEpisodeRow]]:
    """Single-worker advantage actor-critic; bit-deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    obs_dim = env.cfg.n_receivers + env.n_agents
    agents = init_agents(env.n_agents, obs_dim, env.n_codes, lcfg, rng)
    scale = observation_scale(env)
    rows = []
    for ep in range(episodes):
        t0 = time.perf_counter()
        xs, acts, rews, state, ep_reward = _run_episode(env, agents, rng, scale)
        updates = _episode_grads(agents, lcfg, xs, acts, rews, observation(state) * scale)
        for k, agrads, cgrads in updates:
            apply_gradients(agents[k].critic, cgrads, lcfg.critic_rate, sign=-1.0)
            apply_gradients(agents[k].actor, agrads, lcfg.actor_rate, sign=+1.0)
        rows.append(
            ACEpisodeRow(ep, state.prev_total, ep_reward, env.feasible_count(state), 0.0, time.perf_counter() - t0)
        )
    return agents, rows


def evaluate_greedy(env: BeamformingEnv, agents: list[ACAgent]) -> tuple[tuple[int, ...], float]:
    """One episode taking each actor's argmax action; returns final codes and total."""
    scale = observation_scale(env)
    state = env.reset()
    for _ in range(env.cfg.max_steps):
        for agent in range(1, env.n_agents + 1):
            probs = actor_probs(agents[agent - 1].actor, observation(state) * scale)
            state = env.step_rollout(agent, int(np.argmax(probs))).next
    return state.codes, state.prev_total


def a3c_train(
    env_factory, lcfg: LearnerConfig, episodes: int, seed
) -> tuple[list[ACAgent], list[ACEpisodeRow]]:
    """Actor-critic training with lcfg.workers concurrent environment workers.

    Workers copy the shared parameters, run one episode each, and apply their
    gradient batches back under a lock. Ordering across workers is unspecified;
    run with one worker for reproducibility.
    """
    if lcfg.workers == 1:
        env = env_factory()
        return train_actor_critic_rollout(env, lcfg, episodes, seed)

    boot_rng = np.random.default_rng(seed)
    probe = env_factory()
    obs_dim = probe.cfg.n_receivers + probe.n_agents
    shared = init_agents(probe.n_agents, obs_dim, probe.n_codes, lcfg, boot_rng)
    lock = threading.Lock()
    counter = {"next": 0}
    rows: list[ACEpisodeRow] = []
    failures: list[Exception] = []

    def worker(widx: int) -> None:
        env = env_factory()
        scale = observation_scale(env)
        rng = np.random.default_rng([seed, widx])
        try:
            while True:
                with lock:
                    ep = counter["next"]
                    if ep >= episodes:
                        return
                    counter["next"] = ep + 1
                    local = [ACAgent(a.actor.copy(), a.critic.copy()) for a in _distinct(shared)]
                    local_map = _expand(shared, local)
                t0 = time.perf_counter()
                xs, acts, rews, state, ep_reward = _run_episode(env, local_map, rng, scale)
                updates = _episode_grads(local_map, lcfg, xs, acts, rews, observation(state) * scale)
                with lock:
                    for k, agrads, cgrads in updates:
                        apply_gradients(shared[k].critic, cgrads, lcfg.critic_rate, sign=-1.0)
                        apply_gradients(shared[k].actor, agrads, lcfg.actor_rate, sign=+1.0)
                    rows.append(
                        ACEpisodeRow(
                            ep, state.prev_total, ep_reward, env.feasible_count(state), 0.0,
                            time.perf_counter() - t0,
                        )
                    )
        except Exception as exc:  # surface worker failures to the caller
            with lock:
                failures.append(exc)

    threads = [threading.Thread(target=worker, args=(w,)) for w in range(lcfg.workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if failures:
        raise failures[0]
    rows.sort(key=lambda r: r.episode)
    return shared, rows


def _distinct(agents: list[ACAgent]) -> list[ACAgent]:
    out, seen = [], set()
    for a in agents:
        if id(a) not in seen:
            seen.add(id(a))
            out.append(a)
    return out


def _expand(template: list[ACAgent], distinct: list[ACAgent]) -> list[ACAgent]:
    """Mirror the sharing structure of ``template`` onto the copied agents."""
    mapping: dict[int, ACAgent] = {}
    it = iter(distinct)
    out = []
    for a in template:
        if id(a) not in mapping:
            mapping[id(a)] = next(it)
        out.append(mapping[id(a)])
    return out
