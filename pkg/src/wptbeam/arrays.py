"""Uniform linear array geometry, steering vectors, and line-of-sight links.

A transmitter is an M-element ULA described by a per-element phase constant
``d``: steering a beam toward angle ``phi`` applies the phase ``d * m * cos(phi)``
to element m. The physical element pitch is never modeled separately; ``d``
absorbs it. Link amplitudes follow the free-space 1/r law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError

SPEED_OF_LIGHT = 2.99792458e8
"""Propagation speed used for wavelengths and path gains, m/s."""

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArrayConfig:
    """A transmitting ULA: element count, phase spacing, carrier, orientation.

    ``spacing_phase`` is the phase advance between adjacent elements per unit
    cos(angle), in radians. ``boresight`` rotates the array's local angular
    frame relative to the global one.
    """

    elements: int
    spacing_phase: float = math.pi
    carrier_hz: float = 8e6
    boresight: float = 0.0

    def __post_init__(self):
        if self.elements < 1:
            raise ValueError(f"need at least one element, got {self.elements}")
        if not (math.isfinite(self.spacing_phase) and self.spacing_phase > 0):
            raise ValueError(f"spacing_phase must be positive and finite, got {self.spacing_phase}")
        if not (math.isfinite(self.carrier_hz) and self.carrier_hz > 0):
            raise ValueError(f"carrier_hz must be positive and finite, got {self.carrier_hz}")
        if not math.isfinite(self.boresight):
            raise ValueError("boresight must be finite")

    @property
    def wavelength(self) -> float:
        """Carrier wavelength in meters."""
        return SPEED_OF_LIGHT / self.carrier_hz


@dataclass(frozen=True)
class Geometry:
    """Transmitter and receiver positions on a rectangular field, meters.

    Receivers must keep a 1 m margin from the field edge; transmitters may sit
    anywhere (the reference layout puts them on the corners) but never on top
    of a receiver.
    """

    tx_positions: tuple[tuple[float, float], ...]
    rx_positions: tuple[tuple[float, float], ...]
    field_bounds: tuple[float, float] = (30.0, 30.0)

    def __post_init__(self):
        if len(self.tx_positions) < 1:
            raise ValueError("need at least one transmitter")
        if len(self.rx_positions) < 1:
            raise ValueError("need at least one receiver")
        bx, by = self.field_bounds
        for rx in self.rx_positions:
            if not (1.0 <= rx[0] <= bx - 1.0 and 1.0 <= rx[1] <= by - 1.0):
                raise ValueError(f"receiver {rx} outside [1, {bx - 1}] x [1, {by - 1}]")
        for tx in self.tx_positions:
            for rx in self.rx_positions:
                if tx == rx:
                    raise DegenerateGeometryError(f"transmitter and receiver coincide at {tx}")

    @property
    def n_tx(self) -> int:
        return len(self.tx_positions)

    @property
    def n_rx(self) -> int:
        return len(self.rx_positions)

    def distance(self, tx_index: int, rx_index: int) -> float:
        tx = self.tx_positions[tx_index]
        rx = self.rx_positions[rx_index]
        return math.hypot(rx[0] - tx[0], rx[1] - tx[1])


def steering_vector(phi: float, cfg: ArrayConfig) -> np.ndarray:
    """Per-element phasing for departure angle ``phi``: entry m is exp(j*d*m*cos(phi))."""
    if not math.isfinite(phi):
        raise ValueError(f"departure angle must be finite, got {phi}")
    m = np.arange(cfg.elements)
    return np.exp(1j * cfg.spacing_phase * math.cos(phi) * m)


def angle_of_departure(
    tx_index: int, rx: tuple[float, float], geo: Geometry, cfg: ArrayConfig
) -> float:
    """Angle of the tx->rx ray in the array's local frame, wrapped to [0, 2*pi)."""
    tx = geo.tx_positions[tx_index]
    dx = rx[0] - tx[0]
    dy = rx[1] - tx[1]
    if dx == 0.0 and dy == 0.0:
        raise DegenerateGeometryError(f"receiver {rx} coincides with transmitter {tx_index}")
    return (math.atan2(dy, dx) - cfg.boresight) % TWO_PI


def path_gain(distance: float, cfg: ArrayConfig) -> float:
    """Free-space amplitude attenuation lambda / (4*pi*r)."""
    if not (math.isfinite(distance) and distance > 0):
        raise ValueError(f"distance must be positive and finite, got {distance}")
    return cfg.wavelength / (4.0 * math.pi * distance)


def los_link_response(tx_index: int, rx_index: int, geo: Geometry, cfg: ArrayConfig) -> np.ndarray:
    """Line-of-sight link row: path gain times the conjugated steering vector at the AoD.

    Dotting this row with a beamforming code gives the complex channel-output
    amplitude for unit transmit signal.
    """
    rx = geo.rx_positions[rx_index]
    phi = angle_of_departure(tx_index, rx, geo, cfg)
    alpha = path_gain(geo.distance(tx_index, rx_index), cfg)
    return alpha * np.conj(steering_vector(phi, cfg))


def beam_power_gain(link: np.ndarray, code: np.ndarray) -> float:
    """Power gain |link . code|^2 of a beamforming code over a link row."""
    if link.shape != code.shape:
        raise ValueError(f"length mismatch: link {link.shape} vs code {code.shape}")
    return float(abs(np.dot(link, code)) ** 2)
