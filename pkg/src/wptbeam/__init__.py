"""Multiagent reinforcement learning testbed for codebook-based energy beamforming.

Transmitting nodes with uniform linear arrays pick beams from discrete
codebooks to power receivers scattered on a field; agents learn the joint
assignment by tabular Q-learning or advantage actor-critic over a multiagent
rollout scheme, with exhaustive search as the verification oracle.
"""

from ._kernels import backend as kernel_backend
from .arrays import (
    SPEED_OF_LIGHT,
    ArrayConfig,
    Geometry,
    angle_of_departure,
    beam_power_gain,
    los_link_response,
    path_gain,
    steering_vector,
)
from .codebook import Codebook, build_codebook
from .env import (
    UNSET,
    BeamformingEnv,
    EnvConfig,
    EnvState,
    LinkTable,
    StepResult,
    build_codebooks,
    build_link_table,
    expected_energy,
    observation,
    place_receivers,
    reward,
    sample_energy_monte_carlo,
    state_key,
    step_joint,
    step_rollout,
)
from .errors import (
    ConfigError,
    DegenerateGeometryError,
    DivergenceError,
    EnumerationCapError,
    ProtocolError,
)
from .oracle import ExhaustiveResult, GreedyResult, exhaustive_search, greedy_sequential_search

__version__ = "0.1.0"
