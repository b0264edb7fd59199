# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from src.core.types import Duration, TimePoint, ViewNumber
from src.metrics.timeline import build_timelines, entries_by_view
from src.simnet.trace import RecordKind, Trace

logger = logging.getLogger('analysis')


@dataclass(frozen=True)
class SyncInterval:
    """
    A stretch of time in which every honest node executes the same view,
    led by an honest node.

    Attributes:
        k (int): 1-based index in time order.
        view (int): The synchronized view.
        t1 (Fraction): Latest honest entry into the view; also s_k.
        t2 (Fraction): Earliest honest exit from the view.
        leader_honest (bool): Always True for detected intervals.
    """
    k: int
    view: ViewNumber
    t1: TimePoint
    t2: TimePoint
    leader_honest: bool = True

    @property
    def s_k(self) -> TimePoint:
        return self.t1

    @property
    def length(self) -> Duration:
        return self.t2 - self.t1


@dataclass(frozen=True)
class CommunicationBreakdown:
    """
    Honest messages split by synchronization window.

    Attributes:
        per_interval (tuple): Messages counted towards each interval.
        tail (int): Honest messages after the last counted interval.
        total (int): All honest messages in the trace.
    """
    per_interval: tuple
    tail: int
    total: int


def detect_sync_intervals(trace: Trace, c: Duration) -> list:
    """
    Finds every view all honest nodes executed together for at least ``c``
    under an honest leader. Only closed timeline spans are considered, and a
    view every honest node merely started in is not a synchronization.

    Args:
        trace (Trace): A finished run.
        c (Fraction): Minimum overlap length.

    Returns:
        list: SyncInterval entries sorted by t1, indexed from 1.
    """
    c = Fraction(c)
    timelines = entries_by_view(build_timelines(trace))
    honest = trace.meta.honest
    leaders = trace.meta.leaders
    if not timelines:
        return []

    candidates = set.intersection(*(set(spans) for spans in timelines.values()))
    found = []
    for view in sorted(candidates):
        if leaders.leader_of(view) not in honest:
            continue
        spans = [timelines[node][view] for node in timelines]
        if not all(span.closed for span in spans) or all(span.initial for span in spans):
            continue
        t1 = max(span.start for span in spans)
        t2 = min(span.end for span in spans)
        if t2 > t1 and t2 - t1 >= c:
            found.append((t1, view, t2))

    intervals = [SyncInterval(k, view, t1, t2) for k, (t1, view, t2) in enumerate(sorted(found), start=1)]
    logger.debug(f"Detected {len(intervals)} sync intervals with c={c}")
    return intervals


def post_gst(trace: Trace, intervals: list) -> list:
    return [interval for interval in intervals if interval.s_k >= trace.meta.gst]


def measure_latency(trace: Trace, intervals: list) -> Optional[Fraction]:
    """
    Finite horizon latency estimate: the mean of s(T_1) - GST,
    s(T_2) - s(T_1), ..., s(T_m) - s(T_m-1) over intervals starting at or
    after GST.

    Returns:
        Fraction | None: The estimate, or None when nothing synchronized.
    """
    counted = post_gst(trace, intervals)
    if not counted:
        return None
    gaps = []
    previous = trace.meta.gst
    for interval in counted:
        gaps.append(interval.s_k - previous)
        previous = interval.s_k
    return sum(gaps, Fraction(0)) / len(gaps)


def communication_breakdown(trace: Trace, intervals: list) -> CommunicationBreakdown:
    """
    Splits honest sends into per-interval windows.

    The window of interval k at node p runs from p's entry into v_(k-1)
    (exclusive, trace start for k=1) to p's entry into v_k (inclusive), by
    trace sequence. Each single-recipient send counts once, so a multicast
    to n nodes counts n.
    """
    counted = post_gst(trace, intervals)
    timelines = entries_by_view(build_timelines(trace))
    honest = trace.meta.honest

    boundaries = {node: [timelines[node][iv.view].start_seq for iv in counted] for node in timelines}
    per_interval = [0] * len(counted)
    tail = total = 0
    for record in trace.of_kind(RecordKind.SEND):
        if record.node not in honest:
            continue
        total += 1
        index = _window_index(boundaries.get(record.node, []), record.seq)
        if index is None:
            tail += 1
        else:
            per_interval[index] += 1
    return CommunicationBreakdown(tuple(per_interval), tail, total)


def _window_index(bounds: list, seq: int) -> Optional[int]:
    index = bisect_left(bounds, seq)
    return index if index < len(bounds) else None


def measure_communication(trace: Trace, intervals: list) -> Optional[Fraction]:
    """
    Finite horizon communication estimate: honest messages up to the m-th
    post-GST synchronization divided by m.

    Returns:
        Fraction | None: The estimate, or None when nothing synchronized.
    """
    breakdown = communication_breakdown(trace, intervals)
    if not breakdown.per_interval:
        return None
    return Fraction(sum(breakdown.per_interval), len(breakdown.per_interval))


@dataclass(frozen=True)
class Recovery:
    """
    What it took to get past the faulty leaders following GST: the first
    synchronization after the last faulty-led view among the n views that
    follow r_max, the highest view an honest node holds at GST.

    Attributes:
        view (int): The synchronized view.
        latency (Fraction): Its s_k minus GST.
        communication (int): Honest messages up to every node's entry into it.
    """
    view: ViewNumber
    latency: Duration
    communication: int


def highest_view_at(timelines: dict, time: TimePoint) -> ViewNumber:
    held = [max((span.view for span in spans if span.start <= time), default=spans[0].view)
            for spans in timelines.values() if spans]
    return max(held, default=0)


def measure_recovery(trace: Trace, intervals: list) -> Optional[Recovery]:
    """
    Returns:
        Recovery | None: None when no synchronization follows the faulty leaders.
    """
    counted = post_gst(trace, intervals)
    if not counted:
        return None
    meta = trace.meta
    r_max = highest_view_at(build_timelines(trace), meta.gst)
    faulty = [v for v in range(r_max + 1, r_max + meta.n + 1) if meta.leaders.leader_of(v) not in meta.honest]
    last_faulty = max(faulty, default=r_max)
    index = next((i for i, interval in enumerate(counted) if interval.view > last_faulty), None)
    if index is None:
        return None
    interval = counted[index]
    breakdown = communication_breakdown(trace, intervals)
    return Recovery(interval.view, interval.s_k - meta.gst, sum(breakdown.per_interval[:index + 1]))
