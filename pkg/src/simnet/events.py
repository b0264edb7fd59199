# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Optional

from src.core.types import Message, NodeId, TimePoint


class EventKind(IntEnum):
    """Event kinds; the value is the tie-break rank among events at the same instant."""
    START = 0
    CRASH = 1
    DELIVER = 2
    WISH_TICK = 3
    TIMER_FIRE = 4
    SCRIPT = 5


@dataclass(frozen=True, order=True)
class Event:
    """
    A scheduled simulator event. Events pop in (time, rank, seq) order, seq
    being the insertion counter.
    """
    time: TimePoint
    rank: int
    seq: int
    kind: EventKind = field(compare=False)
    node: NodeId = field(compare=False)
    message: Optional[Message] = field(default=None, compare=False)
    msg_id: Optional[int] = field(default=None, compare=False)
    timer_id: Any = field(default=None, compare=False)
    generation: int = field(default=0, compare=False)
    payload: Any = field(default=None, compare=False)


class EventQueue:
    def __init__(self):
        self._heap = []
        self._seq = 0

    def push(self, time: TimePoint, kind: EventKind, node: NodeId, **fields) -> Event:
        event = Event(time, int(kind), self._seq, kind, node, **fields)
        self._seq += 1
        heapq.heappush(self._heap, event)
        return event

    def pop(self) -> Event:
        return heapq.heappop(self._heap)

    def peek_time(self) -> Optional[TimePoint]:
        return self._heap[0].time if self._heap else None

    def __len__(self):
        return len(self._heap)
