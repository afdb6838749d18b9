"""Command-line harness: flat-file configs, training runs, oracle reports, plot data.

Subcommands: ``train <config>``, ``oracle <config>``, ``plotdata <metrics.csv>``.
Exit codes: 0 success, 2 divergence abort, 3 I/O or config error, 4 enumeration
cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import zlib
from dataclasses import dataclass, fields, replace

from .arrays import ArrayConfig
from .env import BeamformingEnv, EnvConfig
from .errors import ConfigError, DivergenceError, EnumerationCapError
from .learners import (
    LearnerConfig,
    QTable,
    a3c_train,
    save_params,
    train_joint_tabular,
    train_tabular_rollout,
)
from .oracle import exhaustive_search, greedy_sequential_search

AGENT_KINDS = ("tabular-rollout", "actor-critic-rollout", "joint-tabular")

METRICS_COLUMNS = "episode,total_energy_j,reward,feasible_count,epsilon,wall_ms"

SMOOTHING_WINDOW = 50

_JOINT_TABLE_LIMIT = 65536  # materialized joint-action rows get unwieldy past this


@dataclass
class RunConfig:
    """Effective experiment configuration; field defaults mirror the reference tables."""

    agent: str = "tabular-rollout"
    episodes: int = 1000
    seed: int = 0
    out: str = "metrics.csv"
    record_timing: bool = False
    enumeration_cap: int = 10_000_000
    field_size: float = 30.0
    tx_positions: tuple[tuple[float, float], ...] | None = None  # None: field corners
    n_receivers: int = 5
    elements: int = 64
    carrier_hz: float = 8e6
    spacing_phase_deg: float = 180.0
    boresight_deg: float = 0.0
    n_codes: int = 8
    codebook_span_deg: float = 90.0
    transfer_time_s: float = 0.5
    e_min_j: float = 0.0
    max_steps: int = 100
    resample_rx: bool = False
    gamma: float = 0.9
    actor_rate: float = 0.1
    critic_rate: float = 0.1
    q_rate: float = 0.1
    epsilon_decay: float = 0.995
    epsilon_floor: float = 0.01
    hidden: int = 64
    workers: int = 1
    share_policy: bool = False


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "yes", "1", "on"):
        return True
    if text.lower() in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _parse_positions(text: str) -> tuple[tuple[float, float], ...]:
    points = []
    for token in text.split(";"):
        token = token.strip()
        if not token:
            continue
        x, y = token.split(",")
        points.append((float(x), float(y)))
    if not points:
        raise ValueError("no positions given")
    return tuple(points)


def _format_positions(points) -> str:
    return "; ".join(f"{x!r},{y!r}" for x, y in points)


_PARSERS = {
    "agent": str,
    "episodes": int,
    "seed": int,
    "out": str,
    "record_timing": _parse_bool,
    "enumeration_cap": int,
    "field_size": float,
    "tx_positions": _parse_positions,
    "n_receivers": int,
    "elements": int,
    "carrier_hz": float,
    "spacing_phase_deg": float,
    "boresight_deg": float,
    "n_codes": int,
    "codebook_span_deg": float,
    "transfer_time_s": float,
    "e_min_j": float,
    "max_steps": int,
    "resample_rx": _parse_bool,
    "gamma": float,
    "actor_rate": float,
    "critic_rate": float,
    "q_rate": float,
    "epsilon_decay": float,
    "epsilon_floor": float,
    "hidden": int,
    "workers": int,
    "share_policy": _parse_bool,
}


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.agent not in AGENT_KINDS:
        raise ConfigError(f"agent must be one of {', '.join(AGENT_KINDS)}; got {cfg.agent!r}")
    if cfg.episodes < 1:
        raise ConfigError(f"episodes must be at least 1, got {cfg.episodes}")
    if cfg.tx_positions is None:
        s = cfg.field_size
        cfg = replace(cfg, tx_positions=((0.0, 0.0), (s, 0.0), (s, s), (0.0, s)))
    try:
        build_env_config(cfg)
        build_learner_config(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.agent == "joint-tabular" and cfg.n_codes ** len(cfg.tx_positions) > _JOINT_TABLE_LIMIT:
        raise ConfigError(
            f"joint-tabular needs n_codes^L <= {_JOINT_TABLE_LIMIT}; "
            f"got {cfg.n_codes}^{len(cfg.tx_positions)}"
        )
    return cfg


def load_config(path: str) -> RunConfig:
    """Parse a flat ``key = value`` file; unknown keys are hard errors."""
    cfg = RunConfig()
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, parser(value))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return _validate(cfg)


def serialize_config(cfg: RunConfig) -> str:
    """Emit the effective config; reloading the text reproduces it exactly."""
    out = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "tx_positions":
            text = _format_positions(value)
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        out.append(f"{f.name} = {text}")
    return "\n".join(out) + "\n"


def derive_seed(master: int, label: str) -> list[int]:
    """Named sub-seed: components stay independently reproducible from one seed."""
    return [master, zlib.crc32(label.encode())]


def build_env_config(cfg: RunConfig) -> EnvConfig:
    array = ArrayConfig(
        elements=cfg.elements,
        spacing_phase=math.radians(cfg.spacing_phase_deg),
        carrier_hz=cfg.carrier_hz,
        boresight=math.radians(cfg.boresight_deg),
    )
    return EnvConfig(
        tx_positions=cfg.tx_positions,
        field_bounds=(cfg.field_size, cfg.field_size),
        n_receivers=cfg.n_receivers,
        array=array,
        n_codes=cfg.n_codes,
        codebook_span=math.radians(cfg.codebook_span_deg),
        transfer_time=cfg.transfer_time_s,
        e_min=cfg.e_min_j,
        max_steps=cfg.max_steps,
        rx_seed=derive_seed(cfg.seed, "placement"),
        resample_rx_per_episode=cfg.resample_rx,
    )


def build_learner_config(cfg: RunConfig) -> LearnerConfig:
    return LearnerConfig(
        gamma=cfg.gamma,
        actor_rate=cfg.actor_rate,
        critic_rate=cfg.critic_rate,
        q_rate=cfg.q_rate,
        epsilon_decay=cfg.epsilon_decay,
        epsilon_floor=cfg.epsilon_floor,
        hidden=cfg.hidden,
        workers=cfg.workers,
        share_policy=cfg.share_policy,
    )


def _checkpoint_path(out: str, suffix: str) -> str:
    stem, _ = os.path.splitext(out)
    return stem + suffix


def _write_metrics(path: str, rows, record_timing: bool) -> None:
    with open(path, "w", newline="") as f:
        f.write(METRICS_COLUMNS + "\n")
        for r in rows:
            wall_ms = int(round(r.wall_s * 1000)) if record_timing else 0
            f.write(f"{r.episode},{r.total_energy!r},{r.reward!r},{r.feasible},{r.epsilon!r},{wall_ms}\n")


def run_training(cfg: RunConfig) -> int:
    """Train the configured agent; writes the metrics CSV and a final checkpoint."""
    env_cfg = build_env_config(cfg)
    lcfg = build_learner_config(cfg)
    policy_seed = derive_seed(cfg.seed, "policy")
    if cfg.agent == "tabular-rollout":
        table, rows = train_tabular_rollout(BeamformingEnv(env_cfg), lcfg, cfg.episodes, policy_seed)
        checkpoint = _checkpoint_path(cfg.out, ".qtable.json")
        _write_metrics(cfg.out, rows, cfg.record_timing)
        table.save(checkpoint)
    elif cfg.agent == "joint-tabular":
        table, rows = train_joint_tabular(BeamformingEnv(env_cfg), lcfg, cfg.episodes, policy_seed)
        checkpoint = _checkpoint_path(cfg.out, ".qtable.json")
        _write_metrics(cfg.out, rows, cfg.record_timing)
        table.save(checkpoint)
    else:
        agents, rows = a3c_train(lambda: BeamformingEnv(env_cfg), lcfg, cfg.episodes, policy_seed)
        checkpoint = _checkpoint_path(cfg.out, ".params.npz")
        _write_metrics(cfg.out, rows, cfg.record_timing)
        named = {}
        for i, agent in enumerate(agents):
            named[f"agent{i}_actor"] = agent.actor
            named[f"agent{i}_critic"] = agent.critic
        save_params(checkpoint, named)
    print(f"wrote {cfg.episodes} episodes to {cfg.out}; checkpoint in {checkpoint}")
    return 0


def run_oracle(cfg: RunConfig, stream=None) -> int:
    """Report exhaustive and greedy-sequential searches on the configured instance."""
    stream = stream or sys.stdout
    env = BeamformingEnv(build_env_config(cfg))
    ex = exhaustive_search(env.links, cfg.transfer_time_s, cfg.e_min_j, cap=cfg.enumeration_cap)
    gr = greedy_sequential_search(env.links, cfg.transfer_time_s)
    report = {
        "joint_evaluations": ex.evaluations,
        "sequential_evaluations": gr.evaluations,
        "exhaustive_codes": list(ex.codes),
        "exhaustive_total_j": ex.total,
        "exhaustive_feasible": ex.feasible,
        "greedy_codes": list(gr.codes),
        "greedy_total_j": gr.total,
    }
    print(json.dumps(report, separators=(",", ":")), file=stream)
    print(
        f"exhaustive: codes {list(ex.codes)}, total {ex.total:.6g} J, "
        f"feasible {ex.feasible}, {ex.evaluations} evaluations",
        file=stream,
    )
    print(
        f"greedy    : codes {list(gr.codes)}, total {gr.total:.6g} J, {gr.evaluations} evaluations",
        file=stream,
    )
    return 0


def emit_plot_data(metrics_path: str, out_path: str) -> int:
    """Smooth the per-episode reward and energy series for external plotting."""
    try:
        with open(metrics_path) as f:
            lines = [line.rstrip("\n") for line in f if line.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read metrics {metrics_path}: {exc}") from exc
    if not lines or lines[0] != METRICS_COLUMNS:
        raise ConfigError(f"{metrics_path}: not a metrics file (bad header)")
    episodes, rewards, energies = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 6:
            raise ConfigError(f"{metrics_path}:{lineno}: expected 6 columns, got {len(parts)}")
        try:
            episodes.append(int(parts[0]))
            energies.append(float(parts[1]))
            rewards.append(float(parts[2]))
        except ValueError as exc:
            raise ConfigError(f"{metrics_path}:{lineno}: {exc}") from exc
    if not episodes:
        raise ConfigError(f"{metrics_path}: no data rows")
    window = min(SMOOTHING_WINDOW, len(episodes))
    with open(out_path, "w", newline="") as f:
        f.write("episode,total_energy_j_smooth,reward_smooth\n")
        for i in range(len(episodes) - window + 1):
            e = sum(energies[i : i + window]) / window
            r = sum(rewards[i : i + window]) / window
            f.write(f"{episodes[i + window - 1]},{e!r},{r!r}\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wptbeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train an agent and write metrics + checkpoint")
    p_train.add_argument("config")
    p_oracle = sub.add_parser("oracle", help="run the exhaustive and greedy searches")
    p_oracle.add_argument("config")
    for p in (p_train, p_oracle):
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--episodes", type=int, default=None, help="override the episode count")
        p.add_argument("--out", default=None, help="override the output path")
    p_plot = sub.add_parser("plotdata", help="emit smoothed series from a metrics CSV")
    p_plot.add_argument("metrics")
    p_plot.add_argument("--out", default=None, help="output path (default <metrics>.plot.csv)")

    args = parser.parse_args(argv)
    try:
        if args.command == "plotdata":
            out = args.out or _checkpoint_path(args.metrics, ".plot.csv")
            return emit_plot_data(args.metrics, out)
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = _validate(replace(cfg, seed=args.seed))
        if args.episodes is not None:
            cfg = _validate(replace(cfg, episodes=args.episodes))
        if args.out is not None:
            cfg = _validate(replace(cfg, out=args.out))
        if args.command == "train":
            return run_training(cfg)
        return run_oracle(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DivergenceError as exc:
        print(f"divergence abort: {exc}", file=sys.stderr)
        return 2
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
