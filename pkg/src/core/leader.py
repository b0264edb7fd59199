# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.types import NodeId, ViewNumber


@dataclass(frozen=True)
class LeaderMap:
    """
    Rotating leader assignment: leader(v) = permutation[v mod n].

    The permutation is a bijection on [1, n], so every window of n
    consecutive views is led by every node exactly once.

    Attributes:
        permutation (tuple): Node ids, indexed by view modulo n.
    """
    permutation: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        if sorted(perm) != list(range(1, len(perm) + 1)):
            raise ValueError(f"leader permutation {perm} is not a bijection on [1, {len(perm)}]")
        object.__setattr__(self, 'permutation', perm)

    @property
    def n(self) -> int:
        return len(self.permutation)

    @classmethod
    def round_robin(cls, n: int) -> LeaderMap:
        """leader(v) = (v mod n) + 1."""
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> LeaderMap:
        """
        Draws a uniformly random rotation from a seeded generator.

        Args:
            n (int): Number of nodes.
            rng (np.random.Generator): Generator dedicated to the leader map.

        Returns:
            LeaderMap: The drawn map.
        """
        return cls(tuple(int(p) + 1 for p in rng.permutation(n)))

    def leader_of(self, view: ViewNumber) -> NodeId:
        """Leader of ``view``: the rotation entry at view mod n."""
        return self.permutation[view % self.n]

    def leads_window(self, node: NodeId, view: ViewNumber, f: int) -> bool:
        """
        Tells whether ``node`` leads some view r with view <= r <= view + f + 1.
        """
        span = min(f + 2, self.n)
        return any(self.leader_of(view + i) == node for i in range(span))

    def leaders_of(self, views) -> list:
        return [self.leader_of(v) for v in views]


def leader_of(view: ViewNumber, leader_map: LeaderMap) -> NodeId:
    """Module level shorthand for ``leader_map.leader_of(view)``."""
    return leader_map.leader_of(view)
