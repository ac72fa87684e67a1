"""Observation wrappers mapping raw observations onto rotation angles.

Pauli rotations are 2*pi-periodic, so raw observations must land in a
non-aliasing range before becoming gate angles: bounded dimensions map
linearly onto [-pi, pi], unbounded ones squash through arctan.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np


def wrap_continuous(
    observation: np.ndarray, bounded_dims: Mapping[int, tuple[float, float]]
) -> np.ndarray:
    """Angles safe against rotation-gate aliasing; output lies in [-pi, pi]."""
    observation = np.asarray(observation, dtype=np.float64)
    out = np.arctan(observation)
    for dim, (lo, hi) in bounded_dims.items():
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise ValueError(f"bad range for dimension {dim}: ({lo}, {hi})")
        x = min(max(observation[dim], lo), hi)
        out[dim] = (2.0 * (x - lo) / (hi - lo) - 1.0) * math.pi
    return out


def wrap_discrete_index(state_index: int, n_states: int) -> np.ndarray:
    """Basis-state encoding: each binary digit of the index becomes 0 or pi.

    Uses ceil(log2(n_states)) bits, most significant first, matching the
    qubit-0-is-MSB register convention; injective over [0, n_states).
    """
    if n_states < 1:
        raise ValueError(f"n_states must be positive, got {n_states}")
    if not 0 <= state_index < n_states:
        raise IndexError(f"state index {state_index} out of range [0, {n_states})")
    n_bits = max(1, math.ceil(math.log2(n_states)))
    bits = [(state_index >> (n_bits - 1 - b)) & 1 for b in range(n_bits)]
    return np.array(bits, dtype=np.float64) * math.pi
