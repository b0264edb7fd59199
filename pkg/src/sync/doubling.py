# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction

from src.core.errors import InvariantViolation
from src.core.synchronizer import Synchronizer
from src.core.types import Duration, Message, SetTimer, TimePoint, ViewNumber

logger = logging.getLogger('doubling')

DURATION_TIMER = 'duration'


@dataclass(frozen=True)
class DoublingState:
    """
    State of a view doubling node. Sends no messages; view_duration is
    always beta * 2**curr.

    Attributes:
        wish (int): Number of wishToAdvance calls, preloaded with the start view.
        curr (int): Current view counter.
        view_duration (Fraction): Duration of the current view.
        duration_anchor (Fraction): Time of the last duration change.
        beta (Fraction): Duration of view 0.
    """
    wish: int
    curr: ViewNumber
    view_duration: Duration
    duration_anchor: TimePoint
    beta: Duration

    @classmethod
    def initial(cls, beta: Duration, start_view: ViewNumber = 0, now: TimePoint = Fraction(0)) -> DoublingState:
        return cls(wish=start_view, curr=start_view, view_duration=beta * 2 ** start_view,
                   duration_anchor=now, beta=beta)


def on_wish_to_advance(state: DoublingState) -> DoublingState:
    """
    Records one more wish. The view only changes when the current duration
    expires, so this never emits anything.
    """
    return replace(state, wish=state.wish + 1)


def on_duration_expired(state: DoublingState, now: TimePoint) -> tuple:
    """
    Moves to the next view and doubles the view duration.

    Args:
        state (DoublingState): The state whose view just ran out.
        now (Fraction): Current time, exactly one view duration after the anchor.

    Returns:
        tuple: (new state, view to propose or None). The view is proposed only
        when wish has caught up with it.

    Raises:
        InvariantViolation: If called at the wrong time.
    """
    if now - state.duration_anchor != state.view_duration:
        raise InvariantViolation(
            f"view {state.curr} expired at {now}, expected {state.duration_anchor + state.view_duration}")
    curr = state.curr + 1
    new_state = replace(state, curr=curr, view_duration=2 * state.view_duration, duration_anchor=now)
    return new_state, (curr if state.wish >= curr else None)


def predicted_entry_time(view: ViewNumber, start_view: ViewNumber, beta: Duration) -> TimePoint:
    """
    Time at which a node that starts in ``start_view`` at t=0 enters ``view``:
    beta * (2**view - 2**start_view).

    Raises:
        ValueError: If view < start_view.
    """
    if view < start_view:
        raise ValueError(f"view {view} precedes start view {start_view}")
    return Fraction(beta) * (2 ** view - 2 ** start_view)


def min_sync_view(c: Duration, v0_min: ViewNumber, v0_max: ViewNumber, beta: Duration) -> ViewNumber:
    """
    Smallest view in which nodes started at v0_min and v0_max overlap for at
    least c, i.e. the smallest v >= v0_max with
    beta * (2**v + 2**v0_min - 2**v0_max) >= c.

    Raises:
        ValueError: If v0_min > v0_max.
    """
    if v0_min > v0_max:
        raise ValueError(f"v0_min {v0_min} exceeds v0_max {v0_max}")
    view = v0_max
    while Fraction(beta) * (2 ** view + 2 ** v0_min - 2 ** v0_max) < c:
        view += 1
    return view


class DoublingSynchronizer(Synchronizer):
    """
    Message-free synchronizer: each view lasts twice as long as the one
    before, and a view is proposed only once wish has reached it.
    """
    name = "doubling"

    def __init__(self, node_id, n, f, leader_map, delta=Fraction(1), certificate_check=None,
                 start_view=0, beta=Fraction(10)):
        super().__init__(node_id, n, f, leader_map, delta, certificate_check, start_view)
        self.beta = Fraction(beta)
        self.start_view = start_view
        self.state = DoublingState.initial(self.beta, start_view)

    def start(self, now):
        self.state = DoublingState.initial(self.beta, self.start_view, now)
        return [SetTimer(DURATION_TIMER, now + self.state.view_duration)]

    def wish_to_advance(self, now):
        """Bumps the wish counter; doubling sends no messages."""
        self.state = on_wish_to_advance(self.state)
        return []

    def deliver(self, message: Message, now):
        logger.debug(f"Node {self.node_id} ignoring {message.kind.value}({message.view})")
        return []

    def timer_fired(self, timer_id, now):
        if timer_id != DURATION_TIMER:
            return []
        self.state, view = on_duration_expired(self.state, now)
        actions = [SetTimer(DURATION_TIMER, now + self.state.view_duration)]
        if view is not None:
            actions.append(self.propose(view))
        return actions
