# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable

import numpy as np

from src.core.types import Duration, Message, NodeId, TimePoint

# Resolution of randomly drawn delays, as a fraction of the allowed window.
UNIFORM_STEPS = 1000


class DelayPolicy(ABC):
    """
    Chooses delivery times under partial synchrony: a message sent at s is
    delivered at d with s < d <= max(s, GST) + delta.

    Attributes:
        delta (Fraction): Post-GST delivery bound.
        gst (Fraction): Global stabilization time.
    """
    mode = "abstract"

    def __init__(self, delta: Duration, gst: TimePoint):
        self.delta = Fraction(delta)
        self.gst = Fraction(gst)

    def bound(self, sent_at: TimePoint) -> TimePoint:
        return max(sent_at, self.gst) + self.delta

    @abstractmethod
    def deliver_at(self, sent_at: TimePoint, sender: NodeId, recipient: NodeId, message: Message) -> TimePoint:
        ...


class WorstCaseDelay(DelayPolicy):
    """Holds every message for as long as allowed."""
    mode = "worst"

    def deliver_at(self, sent_at, sender, recipient, message):
        return self.bound(sent_at)


class UniformRandomDelay(DelayPolicy):
    """
    Draws the delivery time uniformly from a grid over (s, max(s, GST) + delta],
    using a seeded numpy generator.
    """
    mode = "uniform"

    def __init__(self, delta, gst, rng: np.random.Generator):
        super().__init__(delta, gst)
        self.rng = rng

    def deliver_at(self, sent_at, sender, recipient, message):
        step = int(self.rng.integers(1, UNIFORM_STEPS + 1))
        return sent_at + (self.bound(sent_at) - sent_at) * Fraction(step, UNIFORM_STEPS)


class AdversaryChosenDelay(DelayPolicy):
    """
    Lets a callable pick delivery times. Choices past the bound are clamped
    to it; choices at or before the send time fall back to the bound.
    """
    mode = "adversary"

    def __init__(self, delta, gst, chooser: Callable[[TimePoint, NodeId, NodeId, Message], TimePoint]):
        super().__init__(delta, gst)
        self.chooser = chooser

    def deliver_at(self, sent_at, sender, recipient, message):
        bound = self.bound(sent_at)
        chosen = Fraction(self.chooser(sent_at, sender, recipient, message))
        if chosen <= sent_at or chosen > bound:
            return bound
        return chosen
