# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from src.core.types import TimePoint, ViewNumber
from src.simnet.trace import RecordKind, Trace


@dataclass(frozen=True)
class ViewSpan:
    """
    One view executed by one node: [start, end), where end is the entry
    time of the next view. The last view of a node stays open (end None).
    Sequence numbers locate the boundaries in trace order. ``initial`` marks
    the start view, which the node never proposed.
    """
    view: ViewNumber
    start: TimePoint
    start_seq: int
    end: Optional[TimePoint] = None
    end_seq: Optional[int] = None
    initial: bool = False

    @property
    def closed(self) -> bool:
        return self.end is not None


def build_timelines(trace: Trace) -> dict:
    """
    Builds per honest node timelines from START and PROPOSE records.

    Returns:
        dict: node id -> list of ViewSpan, views strictly increasing.
    """
    entries = {node: [] for node in sorted(trace.meta.honest)}
    for record in trace.of_kind(RecordKind.START, RecordKind.PROPOSE):
        if record.node in entries:
            entries[record.node].append(record)

    timelines = {}
    for node, records in entries.items():
        spans = []
        for current, following in zip(records, records[1:] + [None]):
            initial = current.kind is RecordKind.START
            if following is None:
                spans.append(ViewSpan(current.view, current.time, current.seq, initial=initial))
            else:
                spans.append(ViewSpan(current.view, current.time, current.seq, following.time, following.seq,
                                      initial))
        timelines[node] = spans
    return timelines


def entries_by_view(timelines: dict) -> dict:
    """
    Returns:
        dict: node id -> {view: ViewSpan}.
    """
    return {node: {span.view: span for span in spans} for node, spans in timelines.items()}


def reach_time(spans: list, view: ViewNumber) -> Optional[TimePoint]:
    """First time a node executes ``view`` or any later view."""
    for span in spans:
        if span.view >= view:
            return span.start
    return None


def first_entry(timelines: dict, view: ViewNumber) -> Optional[tuple]:
    """
    Returns:
        tuple | None: (time, node) of the earliest honest entry into exactly ``view``.
    """
    entries = [(span.start, node) for node, spans in timelines.items() for span in spans if span.view == view]
    return min(entries) if entries else None


def executed_views(timelines: dict) -> list:
    return sorted({span.view for spans in timelines.values() for span in spans})

