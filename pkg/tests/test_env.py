import math

import numpy as np
import pytest

from wptbeam.arrays import SPEED_OF_LIGHT, ArrayConfig, Geometry
from wptbeam.codebook import build_codebook
from wptbeam.env import (
    UNSET,
    BeamformingEnv,
    EnvConfig,
    build_link_table,
    expected_energy,
    observation,
    reward,
    sample_energy_monte_carlo,
    state_key,
)
from wptbeam.errors import ProtocolError
from wptbeam.oracle import exhaustive_search


def small_cfg(**overrides):
    defaults = dict(
        tx_positions=((0.0, 0.0), (30.0, 0.0)),
        n_receivers=3,
        array=ArrayConfig(elements=8),
        n_codes=4,
        max_steps=5,
        rx_seed=11,
    )
    defaults.update(overrides)
    return EnvConfig(**defaults)


def test_env_config_validation():
    with pytest.raises(ValueError):
        small_cfg(transfer_time=0.0)
    with pytest.raises(ValueError):
        small_cfg(e_min=-1.0)
    with pytest.raises(ValueError):
        small_cfg(max_steps=0)
    with pytest.raises(ValueError):
        small_cfg(codebook_centers=(0.1,))  # one center for two transmitters


# --- energies -------------------------------------------------------------


def unit_gain_link_table(elements=4):
    """Single tx/rx at 1 m with lambda = 4 pi, so the path amplitude is exactly 1."""
    cfg = ArrayConfig(elements=elements, carrier_hz=SPEED_OF_LIGHT / (4 * math.pi))
    geo = Geometry(tx_positions=((14.0, 14.0),), rx_positions=((14.0, 15.0),))
    book = build_codebook(1, 1e-9, math.pi / 2, cfg)  # single code aimed at the receiver
    return build_link_table(geo, cfg, (book,))


def test_expected_energy_matched_single_tx():
    links = unit_gain_link_table(elements=4)
    assert expected_energy(0, (0,), links, 0.5) == pytest.approx(8.0, rel=1e-9)


def test_expected_energy_adds_across_transmitters():
    env = BeamformingEnv(small_cfg())
    links = env.links
    codes = (2, 1)
    total = expected_energy(0, codes, links, 0.5)
    part0 = 0.5 * links.gains[0, 0, 2]
    part1 = 0.5 * links.gains[0, 1, 1]
    assert total == pytest.approx(part0 + part1, rel=1e-12)


def test_expected_energy_requires_full_assignment():
    env = BeamformingEnv(small_cfg())
    with pytest.raises(ValueError):
        expected_energy(0, (UNSET, 1), env.links, 0.5)
    with pytest.raises(ValueError):
        expected_energy(0, (1,), env.links, 0.5)


def test_monte_carlo_constant_signal_is_exact():
    links = unit_gain_link_table(elements=4)
    ones = np.ones((64, 1), dtype=complex)
    e = sample_energy_monte_carlo(0, (0,), links, 0.5, 64, seed=0, signals=ones)
    assert e == pytest.approx(0.5 * links.gains[0, 0, 0], rel=1e-12)


def test_monte_carlo_matches_expectation():
    cfg = EnvConfig(n_receivers=5, rx_seed=3)
    env = BeamformingEnv(cfg)
    codes = (1, 4, 6, 2)
    for j in range(5):
        exp = expected_energy(j, codes, env.links, cfg.transfer_time)
        mc = sample_energy_monte_carlo(j, codes, env.links, cfg.transfer_time, 100_000, seed=j)
        assert mc == pytest.approx(exp, rel=0.01)


def test_monte_carlo_variance_shrinks_with_samples():
    cfg = EnvConfig(n_receivers=2, rx_seed=3)
    env = BeamformingEnv(cfg)
    codes = (0, 3, 5, 7)

    def spread(n):
        vals = [
            sample_energy_monte_carlo(0, codes, env.links, 0.5, n, seed=s) for s in range(24)
        ]
        return np.std(vals)

    ratio = spread(2_000) / spread(8_000)
    assert 1.3 < ratio < 3.2  # ~2 for a 4x sample increase


def test_monte_carlo_validation():
    links = unit_gain_link_table()
    with pytest.raises(ValueError):
        sample_energy_monte_carlo(0, (0,), links, 0.5, 0, seed=0)
    with pytest.raises(ValueError):
        sample_energy_monte_carlo(0, (0,), links, 0.5, 8, seed=0, signals=np.ones((4, 1)))


# --- reward ----------------------------------------------------------------


def test_reward_branches():
    feasible = (2.0, 3.0)
    starved = (0.1, 0.2)
    e_min = 1.0
    assert reward(10.0, 11.0, feasible, e_min) == 100.0
    assert reward(10.0, 10.0, feasible, e_min) == 0.0
    assert reward(10.0, 9.0, feasible, e_min) == -300.0
    assert reward(10.0, 11.0, starved, e_min) == 0.0
    assert reward(10.0, 10.0, starved, e_min) == -100.0
    assert reward(10.0, 9.0, starved, e_min) == -400.0


def test_reward_counts_each_starved_receiver():
    assert reward(0.0, 1.0, (0.0, 0.5, 2.0), 1.0) == 100.0 - 100.0


# --- reset -----------------------------------------------------------------


def test_reset_initial_state():
    env = BeamformingEnv(small_cfg())
    s = env.reset()
    assert s.energies == (0.0, 0.0, 0.0)
    assert s.codes == (UNSET, UNSET)
    assert s.step_count == 0
    assert s.partial == ()
    assert s.prev_total == 0.0


def test_reset_same_seed_same_placement():
    env1 = BeamformingEnv(small_cfg())
    env2 = BeamformingEnv(small_cfg())
    env1.reset(seed=99)
    env2.reset(seed=99)
    assert env1.geometry.rx_positions == env2.geometry.rx_positions


def test_receivers_respect_margin():
    env = BeamformingEnv(EnvConfig(n_receivers=64, rx_seed=0))
    for x, y in env.geometry.rx_positions:
        assert 1.0 <= x <= 29.0
        assert 1.0 <= y <= 29.0


def test_resample_flag_redraws_each_episode():
    env = BeamformingEnv(small_cfg(resample_rx_per_episode=True))
    env.reset()
    first = env.geometry.rx_positions
    env.reset()
    assert env.geometry.rx_positions != first
    # and the stream itself is reproducible
    env2 = BeamformingEnv(small_cfg(resample_rx_per_episode=True))
    env2.reset()
    assert env2.geometry.rx_positions == first


# --- joint stepping ---------------------------------------------------------


def test_step_joint_updates_state():
    env = BeamformingEnv(small_cfg())
    env.reset()
    res = env.step_joint((3, 1))
    assert res.next.codes == (3, 1)
    assert res.next.step_count == 1
    assert res.reward == 100.0  # any energy beats the empty start
    assert res.next.prev_total == pytest.approx(sum(res.next.energies))
    assert not res.done


def test_step_joint_equality_branch():
    env = BeamformingEnv(small_cfg())
    env.reset()
    env.step_joint((2, 2))
    res = env.step_joint((2, 2))
    assert res.reward == 0.0


def test_step_joint_reaching_oracle_optimum_rewards_100():
    env = BeamformingEnv(small_cfg())
    best = exhaustive_search(env.links, env.cfg.transfer_time).codes
    suboptimal = next(
        (i, j)
        for i in range(env.n_codes)
        for j in range(env.n_codes)
        if (i, j) != best
    )
    env.reset()
    env.step_joint(suboptimal)
    res = env.step_joint(best)
    assert res.reward == 100.0


def test_episode_finishes_at_max_steps():
    env = BeamformingEnv(small_cfg(max_steps=3))
    env.reset()
    for expected_done in (False, False, True):
        res = env.step_joint((0, 0))
        assert res.done == expected_done
    with pytest.raises(ProtocolError):
        env.step_joint((0, 0))


def test_step_joint_validation():
    env = BeamformingEnv(small_cfg())
    env.reset()
    with pytest.raises(ValueError):
        env.step_joint((0,))
    with pytest.raises(IndexError):
        env.step_joint((0, 9))
    env.step_rollout(1, 0)
    with pytest.raises(ProtocolError):
        env.step_joint((0, 0))  # intermediate state


# --- rollout stepping -------------------------------------------------------


def test_rollout_matches_joint_bitwise():
    rng = np.random.default_rng(0)
    env_a = BeamformingEnv(small_cfg(max_steps=20))
    env_b = BeamformingEnv(small_cfg(max_steps=20))
    env_a.reset()
    env_b.reset()
    for _ in range(10):
        action = tuple(int(a) for a in rng.integers(0, 4, 2))
        last = None
        for agent, a in enumerate(action, start=1):
            last = env_a.step_rollout(agent, a)
        joint = env_b.step_joint(action)
        assert last.next == joint.next
        assert last.reward == joint.reward
        assert last.done == joint.done


def test_rollout_intermediate_shape():
    env = BeamformingEnv(EnvConfig(n_receivers=2, rx_seed=1, max_steps=4))
    env.reset()
    res = env.step_rollout(1, 2)
    assert len(res.next.partial) == 1
    assert res.next.is_intermediate
    assert not res.done
    assert res.next.step_count == 0
    assert res.next.codes == (UNSET,) * 4


def test_rollout_first_step_uses_default_codes():
    env = BeamformingEnv(small_cfg())
    env.reset()
    res = env.step_rollout(1, 3)
    filled = (3, env.default_codes[1])
    expected = tuple(
        expected_energy(j, filled, env.links, env.cfg.transfer_time) for j in range(3)
    )
    assert res.next.energies == expected


def test_rollout_holds_committed_codes_for_waiting_agents():
    env = BeamformingEnv(small_cfg())
    env.reset()
    env.step_joint((1, 2))
    res = env.step_rollout(1, 3)
    filled = (3, 2)  # agent 2 still holds its committed code
    expected = tuple(
        expected_energy(j, filled, env.links, env.cfg.transfer_time) for j in range(3)
    )
    assert res.next.energies == expected


def test_rollout_out_of_order_agent():
    env = BeamformingEnv(small_cfg())
    env.reset()
    with pytest.raises(ProtocolError):
        env.step_rollout(2, 0)
    env.step_rollout(1, 0)
    with pytest.raises(ProtocolError):
        env.step_rollout(1, 0)


def test_rollout_action_space_reduction():
    cfg = EnvConfig()
    assert cfg.n_tx * 8 == 32  # choices examined per full rollout step
    assert 8**cfg.n_tx == 4096  # joint assignments without rollout


# --- observation and keys ----------------------------------------------------


def test_observation_fresh_reset():
    env = BeamformingEnv(EnvConfig(n_receivers=2, rx_seed=1))
    s = env.reset()
    assert np.array_equal(observation(s), np.array([0.0, 0.0, -1.0, -1.0, -1.0, -1.0]))


def test_observation_echoes_joint_action():
    env = BeamformingEnv(EnvConfig(n_receivers=2, rx_seed=1))
    env.reset()
    res = env.step_joint((3, 1, 2, 0))
    obs = observation(res.next)
    assert len(obs) == 2 + 4
    assert list(obs[2:]) == [3.0, 1.0, 2.0, 0.0]


def test_observation_partial_overwrites():
    env = BeamformingEnv(EnvConfig(n_receivers=2, rx_seed=1))
    env.reset()
    env.step_joint((3, 1, 2, 0))
    res = env.step_rollout(1, 7)
    obs = observation(res.next)
    assert list(obs[2:]) == [7.0, 1.0, 2.0, 0.0]


def test_state_key_distinguishes_partial():
    env = BeamformingEnv(small_cfg())
    s0 = env.reset()
    k0 = state_key(s0)
    s1 = env.step_rollout(1, 2).next
    k1 = state_key(s1)
    assert k0 == ((UNSET, UNSET), ())
    assert k1 == ((UNSET, UNSET), (2,))


# --- invariants ---------------------------------------------------------------


def test_total_energy_separable_across_transmitters():
    env = BeamformingEnv(small_cfg())
    links = env.links
    base = (1, 2)
    changed = (3, 2)
    for j in range(3):
        delta = expected_energy(j, changed, links, 0.5) - expected_energy(j, base, links, 0.5)
        expected = 0.5 * (links.gains[j, 0, 3] - links.gains[j, 0, 1])
        assert delta == pytest.approx(expected, rel=1e-9, abs=1e-15)


def test_energies_nonnegative():
    env = BeamformingEnv(small_cfg())
    env.reset()
    rng = np.random.default_rng(2)
    for _ in range(5):
        res = env.step_joint(tuple(int(a) for a in rng.integers(0, 4, 2)))
        assert all(e >= 0.0 for e in res.next.energies)


def test_single_receiver_matched_assignment_is_optimal():
    cfg = small_cfg(n_receivers=1)
    env = BeamformingEnv(cfg)
    matched = tuple(int(np.argmax(env.links.gains[0, p])) for p in range(env.n_agents))
    best = exhaustive_search(env.links, cfg.transfer_time)
    assert best.codes == matched


def test_link_table_argmax_is_nearest_in_cos():
    # resolved regime: codebook spacing under the beam main lobe
    cfg = small_cfg(array=ArrayConfig(elements=8), n_codes=8)
    env = BeamformingEnv(cfg)
    for j in range(env.links.n_rx):
        for p in range(env.links.n_tx):
            am = int(np.argmax(env.links.gains[j, p]))
            assert am == env.codebooks[p].nearest_in_cos(env.links.aods[j, p])
