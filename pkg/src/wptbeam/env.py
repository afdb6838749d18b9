"""Wireless-power-transfer MDP: energies, observations, reward, and stepping.

One episode is a sequence of full steps. A full step either commits a joint
code assignment for all transmitters at once (``step_joint``) or is built up
one agent at a time through intermediate states (``step_rollout``); both paths
commit bit-identical states. Receiver energies are the closed-form expectation
of the transfer interval, so the environment is deterministic given actions;
Monte-Carlo signal sampling is provided as a verification oracle only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .arrays import TWO_PI, ArrayConfig, Geometry, angle_of_departure, los_link_response
from .codebook import Codebook, build_codebook
from .errors import ProtocolError

UNSET = -1
"""Code index marking a transmitter that has not chosen a beam this episode."""


@dataclass(frozen=True)
class EnvConfig:
    """Instance description: field layout, array, codebook, and episode limits."""

    tx_positions: tuple[tuple[float, float], ...] = ((0.0, 0.0), (30.0, 0.0), (30.0, 30.0), (0.0, 30.0))
    field_bounds: tuple[float, float] = (30.0, 30.0)
    n_receivers: int = 5
    array: ArrayConfig = ArrayConfig(elements=64)
    n_codes: int = 8
    codebook_span: float = math.pi / 2.0
    codebook_centers: tuple[float, ...] | None = None  # default: bearing to field center
    transfer_time: float = 0.5
    e_min: float = 0.0
    max_steps: int = 100
    rx_seed: int = 0
    resample_rx_per_episode: bool = False

    def __post_init__(self):
        if self.transfer_time <= 0:
            raise ValueError(f"transfer_time must be positive, got {self.transfer_time}")
        if self.e_min < 0:
            raise ValueError(f"e_min must be nonnegative, got {self.e_min}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be at least 1, got {self.max_steps}")
        if self.n_receivers < 1:
            raise ValueError(f"need at least one receiver, got {self.n_receivers}")
        if self.n_codes < 1:
            raise ValueError(f"need at least one code, got {self.n_codes}")
        if self.codebook_centers is not None and len(self.codebook_centers) != len(self.tx_positions):
            raise ValueError("codebook_centers must give one center per transmitter")

    @property
    def n_tx(self) -> int:
        return len(self.tx_positions)

    @property
    def field_center(self) -> tuple[float, float]:
        return (self.field_bounds[0] / 2.0, self.field_bounds[1] / 2.0)


@dataclass(frozen=True)
class LinkTable:
    """Precomputed link data for a fixed geometry and codebook set.

    gains[j, p, i] is the power gain at receiver j when transmitter p uses
    code i; rows and codes keep the underlying complex quantities for signal
    sampling.
    """

    gains: np.ndarray = field(repr=False)  # (K, L, N) float64
    rows: np.ndarray = field(repr=False)  # (K, L, M) complex128
    codes: np.ndarray = field(repr=False)  # (L, N, M) complex128
    aods: np.ndarray = field(repr=False)  # (K, L) float64

    @property
    def n_rx(self) -> int:
        return self.gains.shape[0]

    @property
    def n_tx(self) -> int:
        return self.gains.shape[1]

    @property
    def n_codes(self) -> int:
        return self.gains.shape[2]


@dataclass(frozen=True)
class EnvState:
    """Episode state; ``partial`` is nonempty exactly on rollout intermediate states."""

    energies: tuple[float, ...]
    codes: tuple[int, ...]
    step_count: int
    partial: tuple[tuple[int, int], ...]  # (agent, action), agents 1-based, in acting order
    prev_total: float

    @property
    def is_intermediate(self) -> bool:
        return len(self.partial) > 0


@dataclass(frozen=True)
class StepResult:
    next: EnvState
    reward: float
    done: bool


def place_receivers(n: int, field_bounds: tuple[float, float], seed) -> tuple[tuple[float, float], ...]:
    """Scatter n receivers uniformly, keeping a 1 m margin from the field edge."""
    rng = np.random.default_rng(seed)
    bx, by = field_bounds
    xs = rng.uniform(1.0, bx - 1.0, n)
    ys = rng.uniform(1.0, by - 1.0, n)
    return tuple((float(x), float(y)) for x, y in zip(xs, ys))


def default_codebook_centers(cfg: EnvConfig) -> tuple[float, ...]:
    """Per-transmitter codebook centers: local-frame bearing to the field center."""
    cx, cy = cfg.field_center
    centers = []
    for tx, ty in cfg.tx_positions:
        bearing = math.atan2(cy - ty, cx - tx)
        centers.append((bearing - cfg.array.boresight) % TWO_PI)
    return tuple(centers)


def build_codebooks(cfg: EnvConfig) -> tuple[Codebook, ...]:
    centers = cfg.codebook_centers if cfg.codebook_centers is not None else default_codebook_centers(cfg)
    return tuple(build_codebook(cfg.n_codes, cfg.codebook_span, c, cfg.array) for c in centers)


def build_link_table(geo: Geometry, cfg: ArrayConfig, codebooks: tuple[Codebook, ...]) -> LinkTable:
    """Evaluate every (receiver, transmitter, code) power gain once."""
    n_rx, n_tx = geo.n_rx, geo.n_tx
    if len(codebooks) != n_tx:
        raise ValueError("need one codebook per transmitter")
    n_codes = codebooks[0].n_codes
    elements = cfg.elements
    rows = np.empty((n_rx, n_tx, elements), dtype=np.complex128)
    aods = np.empty((n_rx, n_tx))
    for j in range(n_rx):
        for p in range(n_tx):
            rows[j, p] = los_link_response(p, j, geo, cfg)
            aods[j, p] = angle_of_departure(p, geo.rx_positions[j], geo, cfg)
    codes = np.stack([book.codes for book in codebooks])
    amp = np.einsum("jpm,pnm->jpn", rows, codes)
    gains = np.ascontiguousarray(np.abs(amp) ** 2)
    for arr in (gains, rows, codes, aods):
        arr.flags.writeable = False
    return LinkTable(gains=gains, rows=rows, codes=codes, aods=aods)


def expected_energy(j: int, codes, links: LinkTable, transfer_time: float) -> float:
    """Expected energy at receiver j over one transfer interval.

    Transmit signals are independent with zero mean and unit variance, so
    cross-transmitter terms vanish and the expectation is the sum of the
    per-transmitter gains scaled by the interval length.
    """
    if len(codes) != links.n_tx:
        raise ValueError(f"need {links.n_tx} codes, got {len(codes)}")
    acc = 0.0
    for p in range(links.n_tx):
        c = codes[p]
        if not 0 <= c < links.n_codes:
            raise ValueError(f"transmitter {p} has no valid code assigned (got {c})")
        acc += links.gains[j, p, c]
    return transfer_time * float(acc)


def sample_energy_monte_carlo(
    j: int,
    codes,
    links: LinkTable,
    transfer_time: float,
    n_samples: int,
    seed,
    signals: np.ndarray | None = None,
) -> float:
    """Energy at receiver j estimated from sampled transmit signals.

    Discretizes the transfer interval into n_samples slots with i.i.d. standard
    complex normal signals per transmitter (pass ``signals`` to override,
    shape (n_samples, L)). Converges to expected_energy as n_samples grows.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be at least 1, got {n_samples}")
    amps = np.array([links.rows[j, p] @ links.codes[p, codes[p]] for p in range(links.n_tx)])
    if signals is None:
        rng = np.random.default_rng(seed)
        shape = (n_samples, links.n_tx)
        signals = math.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    elif signals.shape != (n_samples, links.n_tx):
        raise ValueError(f"signals must have shape {(n_samples, links.n_tx)}, got {signals.shape}")
    received = signals @ amps
    return transfer_time * float(np.mean(np.abs(received) ** 2))


def reward(prev_total: float, new_total: float, energies, e_min: float) -> float:
    """Points for one step: +100 if the total grew, -300 if it shrank, -50 per starved receiver."""
    r = 0.0
    if new_total > prev_total:
        r += 100.0
    elif new_total < prev_total:
        r -= 300.0
    for e in energies:
        if e < e_min:
            r -= 50.0
    return r


def initial_state(n_rx: int, n_tx: int) -> EnvState:
    return EnvState(
        energies=(0.0,) * n_rx,
        codes=(UNSET,) * n_tx,
        step_count=0,
        partial=(),
        prev_total=0.0,
    )


def observation(state: EnvState) -> np.ndarray:
    """Flat observation [e_1..e_K, c_1..c_L]; unset codes read -1, partial actions overwrite."""
    codes = list(state.codes)
    for agent, action in state.partial:
        codes[agent - 1] = action
    return np.array(list(state.energies) + [float(c) for c in codes])


def state_key(state: EnvState) -> tuple:
    """Hashable key for tabular learners: committed codes plus partial actions.

    Energies are excluded: they are a deterministic function of the codes.
    """
    return (state.codes, tuple(a for _, a in state.partial))


def _total(energies) -> float:
    total = 0.0
    for e in energies:
        total += e
    return total


def _validate_action(action: int, n_codes: int) -> None:
    if not 0 <= action < n_codes:
        raise IndexError(f"code index {action} out of range for {n_codes} codes")


def step_joint(
    state: EnvState,
    action,
    links: LinkTable,
    transfer_time: float,
    e_min: float,
    max_steps: int,
) -> StepResult:
    """Commit one joint assignment: recompute all energies, score, advance the clock."""
    if state.is_intermediate:
        raise ProtocolError("cannot take a joint step from an intermediate rollout state")
    if state.step_count >= max_steps:
        raise ProtocolError("episode already finished")
    if len(action) != links.n_tx:
        raise ValueError(f"need {links.n_tx} actions, got {len(action)}")
    for a in action:
        _validate_action(a, links.n_codes)
    energies = _kernels.assignment_energies(links.gains, action, transfer_time)
    new_total = _total(energies)
    r = reward(state.prev_total, new_total, energies, e_min)
    nxt = EnvState(
        energies=tuple(energies),
        codes=tuple(action),
        step_count=state.step_count + 1,
        partial=(),
        prev_total=new_total,
    )
    return StepResult(next=nxt, reward=r, done=nxt.step_count >= max_steps)


def step_rollout(
    state: EnvState,
    agent: int,
    action: int,
    links: LinkTable,
    transfer_time: float,
    e_min: float,
    max_steps: int,
    default_codes,
) -> StepResult:
    """One agent's move within a full step.

    Agents act in fixed ascending order. Until the last agent has moved, the
    result is an intermediate state whose energies are provisional: agents that
    have not acted yet hold their previously committed codes (or the
    field-center default at the start of an episode). The last agent's move
    commits exactly as step_joint would.
    """
    if state.step_count >= max_steps:
        raise ProtocolError("episode already finished")
    expected_agent = len(state.partial) + 1
    if agent != expected_agent:
        raise ProtocolError(f"agent {agent} acting out of turn (expected agent {expected_agent})")
    _validate_action(action, links.n_codes)
    partial = state.partial + ((agent, action),)
    n_tx = links.n_tx
    if len(partial) == n_tx:
        base = replace(state, partial=())
        return step_joint(base, tuple(a for _, a in partial), links, transfer_time, e_min, max_steps)
    filled = []
    for p in range(n_tx):
        if p < len(partial):
            filled.append(partial[p][1])
        elif state.codes[p] != UNSET:
            filled.append(state.codes[p])
        else:
            filled.append(default_codes[p])
    energies = _kernels.assignment_energies(links.gains, filled, transfer_time)
    r = reward(state.prev_total, _total(energies), energies, e_min)
    nxt = EnvState(
        energies=tuple(energies),
        codes=state.codes,
        step_count=state.step_count,
        partial=partial,
        prev_total=state.prev_total,
    )
    return StepResult(next=nxt, reward=r, done=False)


class BeamformingEnv:
    """Stateful wrapper tying geometry, codebooks, and the stepping functions together.

    Each instance is single-writer; the link table and config are immutable and
    may be shared. Receiver placement is fixed per instance unless
    resample_rx_per_episode is set, in which case each reset redraws positions
    from a deterministic stream.
    """

    def __init__(self, cfg: EnvConfig):
        self.cfg = cfg
        self.codebooks = build_codebooks(cfg)
        self._resample_rng = np.random.default_rng(cfg.rx_seed)
        self._place_and_build(cfg.rx_seed)
        self._state = initial_state(cfg.n_receivers, cfg.n_tx)

    def _place_and_build(self, seed) -> None:
        rx = place_receivers(self.cfg.n_receivers, self.cfg.field_bounds, seed)
        self.geometry = Geometry(
            tx_positions=self.cfg.tx_positions,
            rx_positions=rx,
            field_bounds=self.cfg.field_bounds,
        )
        self.links = build_link_table(self.geometry, self.cfg.array, self.codebooks)
        centers = (
            self.cfg.codebook_centers
            if self.cfg.codebook_centers is not None
            else default_codebook_centers(self.cfg)
        )
        self.default_codes = tuple(
            book.nearest_to_angle(center) for book, center in zip(self.codebooks, centers)
        )

    @property
    def n_agents(self) -> int:
        return self.cfg.n_tx

    @property
    def n_codes(self) -> int:
        return self.cfg.n_codes

    @property
    def state(self) -> EnvState:
        return self._state

    def reset(self, seed=None) -> EnvState:
        """Start a fresh episode: zero energies, no codes chosen, step count zero."""
        if seed is not None:
            self._place_and_build(seed)
        elif self.cfg.resample_rx_per_episode:
            self._place_and_build(int(self._resample_rng.integers(2**63)))
        self._state = initial_state(self.cfg.n_receivers, self.cfg.n_tx)
        return self._state

    def step_joint(self, action) -> StepResult:
        res = step_joint(
            self._state, action, self.links, self.cfg.transfer_time, self.cfg.e_min, self.cfg.max_steps
        )
        self._state = res.next
        return res

    def step_rollout(self, agent: int, action: int) -> StepResult:
        res = step_rollout(
            self._state,
            agent,
            action,
            self.links,
            self.cfg.transfer_time,
            self.cfg.e_min,
            self.cfg.max_steps,
            self.default_codes,
        )
        self._state = res.next
        return res

    def observation(self, state: EnvState | None = None) -> np.ndarray:
        return observation(self._state if state is None else state)

    def feasible_count(self, state: EnvState | None = None) -> int:
        """Number of receivers at or above the minimum energy requirement."""
        s = self._state if state is None else state
        return sum(1 for e in s.energies if e >= self.cfg.e_min)
