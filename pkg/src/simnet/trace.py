# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional

from src.core.leader import LeaderMap
from src.core.types import MessageKind, NodeId, TimePoint, ViewNumber


class RecordKind(Enum):
    START = "START"
    WISH = "WISH"
    SEND = "SEND"
    DELIVER = "DELIVER"
    TIMER = "TIMER"
    PROPOSE = "PROPOSE"
    CRASH = "CRASH"


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (tuple, list, frozenset, set)):
        items = sorted(value) if isinstance(value, (frozenset, set)) else value
        return [_plain(v) for v in items]
    return value


@dataclass(frozen=True)
class TraceRecord:
    """
    One entry of the run log.

    ``view`` is the view being executed for WISH and START, the proposed
    view for PROPOSE and the message view for SEND and DELIVER. ``peer`` is
    the recipient of a SEND and the sender of a DELIVER.
    """
    seq: int
    time: TimePoint
    kind: RecordKind
    node: NodeId
    view: Optional[ViewNumber] = None
    peer: Optional[NodeId] = None
    message_kind: Optional[MessageKind] = None
    msg_id: Optional[int] = None
    deliver_at: Optional[TimePoint] = None
    signers: Optional[tuple] = None
    for_leader: Optional[bool] = None
    timer: Optional[str] = None

    def to_dict(self) -> dict:
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self) if getattr(self, f.name) is not None}


@dataclass(frozen=True)
class TraceMeta:
    """
    Run parameters every trace consumer needs.

    Attributes:
        origin (Fraction): The latest honest start time, i.e. global t=0.
    """
    synchronizer: str
    n: int
    f: int
    corrupt: tuple
    leader_map: tuple
    gst: TimePoint
    delta: TimePoint
    horizon: TimePoint
    wish_interval: TimePoint
    origin: TimePoint = Fraction(0)
    start_times: tuple = ()
    start_views: tuple = ()

    @property
    def honest(self) -> frozenset:
        return frozenset(range(1, self.n + 1)) - frozenset(self.corrupt)

    @property
    def leaders(self) -> LeaderMap:
        return LeaderMap(self.leader_map)

    def to_dict(self) -> dict:
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self)}


@dataclass
class Trace:
    """
    The totally ordered record of one simulated run.
    """
    meta: TraceMeta
    records: list = field(default_factory=list)

    def of_kind(self, *kinds: RecordKind) -> Iterator[TraceRecord]:
        return (r for r in self.records if r.kind in kinds)

    def honest_sends(self) -> Iterator[TraceRecord]:
        honest = self.meta.honest
        return (r for r in self.records if r.kind is RecordKind.SEND and r.node in honest)

    def to_jsonl(self) -> str:
        lines = [json.dumps({'meta': self.meta.to_dict()}, sort_keys=True)]
        lines.extend(json.dumps(r.to_dict(), sort_keys=True) for r in self.records)
        return "\n".join(lines) + "\n"


class TraceRecorder:
    """Appends records with a global sequence number."""
    def __init__(self):
        self.records = []

    def record(self, time: TimePoint, kind: RecordKind, node: NodeId, **values) -> TraceRecord:
        entry = TraceRecord(len(self.records), time, kind, node, **values)
        self.records.append(entry)
        return entry
