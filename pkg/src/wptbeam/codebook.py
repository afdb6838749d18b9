"""Discrete beamforming codebooks: a fixed angular span split into N beams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arrays import TWO_PI, ArrayConfig, steering_vector


def _wrapped_distance(a: float, b: float) -> float:
    """Absolute angular distance between a and b, wrapped to [0, pi]."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class Codebook:
    """N steering-vector codes on a midpoint grid over [center - span/2, center + span/2]."""

    angles: tuple[float, ...]
    codes: np.ndarray = field(repr=False)  # (N, M) complex, read-only
    span: float
    center: float

    @property
    def n_codes(self) -> int:
        return len(self.angles)

    def code(self, i: int) -> np.ndarray:
        """The i-th beamforming vector (read-only view)."""
        if not 0 <= i < self.n_codes:
            raise IndexError(f"code index {i} out of range for {self.n_codes} codes")
        return self.codes[i]

    def nearest_to_angle(self, target: float) -> int:
        """Index of the code whose angle is closest to ``target``; ties pick the lowest index."""
        best, best_d = 0, math.inf
        for i, ang in enumerate(self.angles):
            d = _wrapped_distance(ang, target)
            if d < best_d:
                best, best_d = i, d
        return best

    def nearest_in_cos(self, phi: float) -> int:
        """Index of the code closest to ``phi`` in cos space; ties pick the lowest index."""
        c = math.cos(phi)
        best, best_d = 0, math.inf
        for i, ang in enumerate(self.angles):
            d = abs(math.cos(ang) - c)
            if d < best_d:
                best, best_d = i, d
        return best


def build_codebook(n_codes: int, span: float, center: float, cfg: ArrayConfig) -> Codebook:
    """Split ``span`` radians around ``center`` into ``n_codes`` beams at slice midpoints."""
    if n_codes < 1:
        raise ValueError(f"need at least one code, got {n_codes}")
    if not (0.0 < span <= TWO_PI):
        raise ValueError(f"span must be in (0, 2*pi], got {span}")
    step = span / n_codes
    angles = tuple(center - span / 2.0 + (i + 0.5) * step for i in range(n_codes))
    codes = np.stack([steering_vector(a, cfg) for a in angles])
    codes.flags.writeable = False
    return Codebook(angles=angles, codes=codes, span=span, center=center)
