# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from src.core.synchronizer import Synchronizer
from src.core.types import Message, MessageKind, Multicast, NodeId, ProposeView, ViewNumber

logger = logging.getLogger('broadcast')


@dataclass
class BroadcastState:
    """
    Attributes:
        curr (int): Current view.
        sent (set): Views for which NEWROUND was already multicast.
        tallies (dict): view -> set of distinct NEWROUND senders.
    """
    curr: ViewNumber = 0
    sent: set = field(default_factory=set)
    tallies: dict = field(default_factory=dict)


def on_wish_to_advance(state: BroadcastState, node_id: NodeId) -> list:
    """
    Multicasts NEWROUND(curr+1) to every node, self included. Each call
    multicasts again, even if the view was already announced.
    """
    view = state.curr + 1
    state.sent.add(view)
    return [Multicast(Message(MessageKind.NEWROUND, view, node_id))]


def on_receive_new_round(state: BroadcastState, view: ViewNumber, sender: NodeId, node_id: NodeId, f: int) -> list:
    """
    Counts a NEWROUND(view) from ``sender`` and applies the two thresholds.

    With f+1 distinct senders the node joins in (at most once per view);
    with 2f+1 it enters the view, unless it is already there or beyond.

    Returns:
        list: Multicast and/or ProposeView actions. ProposeView actions are
        plain here; the synchronizer checks monotonicity.
    """
    if view < state.curr - 1:
        return []
    tally = state.tallies.setdefault(view, set())
    if sender in tally:
        return []
    tally.add(sender)

    actions = []
    if len(tally) >= f + 1 and view not in state.sent:
        state.sent.add(view)
        actions.append(Multicast(Message(MessageKind.NEWROUND, view, node_id)))
    if len(tally) >= 2 * f + 1 and view > state.curr:
        state.curr = view
        actions.append(ProposeView(view))
        _collect_garbage(state)
    return actions


def _collect_garbage(state: BroadcastState):
    # Views below curr - 1 are ignored from now on, so their marks can go.
    for view in [v for v in state.tallies if v < state.curr - 1]:
        del state.tallies[view]
    state.sent = {v for v in state.sent if v >= state.curr - 1}


class BroadcastSynchronizer(Synchronizer):
    """
    Broadcast based synchronizer: every wish is multicast, f+1 matching
    announcements are amplified and 2f+1 move the node forward.
    """
    name = "broadcast"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.state = BroadcastState()

    def wish_to_advance(self, now):
        return on_wish_to_advance(self.state, self.node_id)

    def deliver(self, message, now):
        if message.kind is not MessageKind.NEWROUND:
            logger.debug(f"Node {self.node_id} dropping unexpected {message.kind.value}({message.view})")
            return []
        actions = on_receive_new_round(self.state, message.view, message.sender, self.node_id, self.f)
        return [self.propose(a.view) if isinstance(a, ProposeView) else a for a in actions]
