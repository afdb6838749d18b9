"""Generic episode runner for per-agent policies."""

from __future__ import annotations

from ..env import BeamformingEnv, observation, state_key


def rollout_episode(env: BeamformingEnv, policies, record: str = "obs") -> list[tuple]:
    """Drive the current episode to its end with one policy per agent.

    Each full step issues the agents' moves in order; every move is recorded as
    a (state, agent, action, reward) entry where state is the observation
    vector (record="obs") or the tabular state key (record="key") the acting
    agent saw. The env must be freshly reset or mid-episode.
    """
    if record not in ("obs", "key"):
        raise ValueError(f"record must be 'obs' or 'key', got {record}")
    trace = []
    state = env.state
    while state.step_count < env.cfg.max_steps:
        for agent in range(1, env.n_agents + 1):
            seen = observation(state) if record == "obs" else state_key(state)
            action = policies[agent - 1](seen)
            res = env.step_rollout(agent, action)
            trace.append((seen, agent, action, res.reward))
            state = res.next
    return trace
