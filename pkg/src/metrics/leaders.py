# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable

import numpy as np

logger = logging.getLogger('leaders')

# Exhaustive enumeration is n! permutations.
MAX_EXACT_N = 9


@dataclass(frozen=True)
class LeaderRunEstimate:
    """
    Result of sampling the number of leaders enlisted after the last honest
    view at GST.

    Attributes:
        n (int): Number of nodes.
        f (int): Corrupt nodes (ids 1..f, fixed before the rotation is drawn).
        trials (int): Number of random rotations drawn.
        mean_enlisted (float): Sample mean of X, the leaders tried up to and
            including the first honest one.
        mean_byzantine_run (float): Sample mean of X - 1, the consecutive
            Byzantine leaders.
    """
    n: int
    f: int
    trials: int
    mean_enlisted: float
    mean_byzantine_run: float

    @property
    def geometric_mean(self) -> float:
        """Mean of X for independently drawn leaders, n / (n - f)."""
        return self.n / (self.n - self.f)


def enlisted_leaders(rotations: np.ndarray, f: int) -> np.ndarray:
    """
    Counts, per rotation, the leaders of views 1, 2, ... up to and including
    the first honest one.

    Args:
        rotations (np.ndarray): trials x n array; row[v mod n] leads view v.
        f (int): Nodes 1..f are corrupt.

    Returns:
        np.ndarray: X for every row.
    """
    from_view_one = np.roll(rotations, -1, axis=1)
    honest = from_view_one > f
    return np.argmax(honest, axis=1) + 1


def estimate_consecutive_byzantine_leaders(n: int, f: int, trials: int, seed: int = 0) -> LeaderRunEstimate:
    """
    Samples ``trials`` random leader rotations and averages X.

    The corrupt set is fixed first; by symmetry of the random rotation the
    last honest view at GST can be taken as view 0.

    Raises:
        ValueError: If f >= n or trials < 1.
    """
    if not 0 <= f < n:
        raise ValueError(f"need 0 <= f < n, got n={n}, f={f}")
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    rotations = rng.permuted(np.tile(np.arange(1, n + 1), (trials, 1)), axis=1)
    counts = enlisted_leaders(rotations, f)
    estimate = LeaderRunEstimate(n, f, trials, float(counts.mean()), float((counts - 1).mean()))
    logger.info(f"E(X) for n={n}, f={f} over {trials} rotations: {estimate.mean_enlisted:.4f} "
                f"(n/(n-f) = {estimate.geometric_mean:.4f})")
    return estimate


def estimate_for_configs(configs: Iterable, trials: int, seed: int = 0) -> list:
    """Runs the estimate for every (n, f) pair."""
    return [estimate_consecutive_byzantine_leaders(n, f, trials, seed) for n, f in configs]


def exact_enlisted_leaders_mean(n: int, f: int) -> Fraction:
    """
    Mean of X over every rotation, by enumeration.

    Raises:
        ValueError: If n is too large to enumerate.
    """
    if n > MAX_EXACT_N:
        raise ValueError(f"enumeration over {n}! rotations is too large")
    total = count = 0
    for rotation in permutations(range(1, n + 1)):
        ordered = rotation[1:] + rotation[:1]
        total += next(i for i, node in enumerate(ordered, start=1) if node > f)
        count += 1
    return Fraction(total, count)
