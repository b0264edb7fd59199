# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

from src.core.types import Duration
from src.metrics.timeline import build_timelines, entries_by_view, executed_views, first_entry, reach_time
from src.simnet.trace import Trace

logger = logging.getLogger('claims')


@dataclass(frozen=True)
class ClaimReport:
    """
    Attributes:
        name (str): Which bound was checked.
        checked (int): Number of views judged.
        violations (tuple): (view, detail) pairs.
    """
    name: str
    checked: int
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def _judged_views(trace: Trace, timelines: dict, bound: Duration, honest_leader_only: bool):
    """
    Yields (view, first entry time) for every view some honest node entered
    at or after GST, early enough that the bound window ends within the horizon.
    """
    meta = trace.meta
    leaders = meta.leaders
    start_views = {node: spans[0].view for node, spans in timelines.items() if spans}
    for view in executed_views(timelines):
        if honest_leader_only and leaders.leader_of(view) not in meta.honest:
            continue
        if all(view <= v0 for v0 in start_views.values()):
            continue
        entry = first_entry(timelines, view)
        if entry is None:
            continue
        time = entry[0]
        if time < meta.gst or time + bound > meta.horizon:
            continue
        yield view, time


def _check(trace: Trace, name: str, bound: Duration, quorum: int, honest_leader_only: bool) -> ClaimReport:
    timelines = build_timelines(trace)
    checked = 0
    violations = []
    for view, time in _judged_views(trace, timelines, bound, honest_leader_only):
        checked += 1
        reached = [node for node, spans in timelines.items()
                   if (t := reach_time(spans, view)) is not None and t <= time + bound]
        if len(reached) < quorum:
            detail = f"only {len(reached)} of {quorum} honest nodes reached view {view} by {time + bound}"
            logger.warning(f"{name} violated: {detail}")
            violations.append((view, detail))
    return ClaimReport(name, checked, tuple(violations))


def check_honest_leader_bound(trace: Trace) -> ClaimReport:
    """
    After GST, when leader(v) is honest and an honest node enters v at t,
    every honest node reaches v by t + 4 delta.
    """
    return _check(trace, "honest-leader-4d", 4 * trace.meta.delta, len(trace.meta.honest), True)


def check_quorum_bound(trace: Trace) -> ClaimReport:
    """
    After GST, when an honest node enters v at t, at least f+1 honest nodes
    reach v by t + 2 delta (f + 2), whoever leads v.
    """
    meta = trace.meta
    return _check(trace, "quorum-2d(f+2)", 2 * meta.delta * (meta.f + 2), meta.f + 1, False)


def check_agreement_bound(trace: Trace) -> ClaimReport:
    """
    After GST, when an honest node enters v at t, every honest node reaches
    v by t + 2 delta. Holds for the broadcast synchronizer.
    """
    return _check(trace, "agreement-2d", 2 * trace.meta.delta, len(trace.meta.honest), False)


def entry_order_holds(trace: Trace) -> bool:
    """
    For doubling runs with a common start time: a node that starts in a
    later view enters every shared view no later than one that starts in an
    earlier view.
    """
    timelines = entries_by_view(build_timelines(trace))
    start_views = dict(zip(range(1, trace.meta.n + 1), trace.meta.start_views))
    for a, b in combinations(sorted(timelines), 2):
        low, high = (a, b) if start_views[a] <= start_views[b] else (b, a)
        for view in set(timelines[low]) & set(timelines[high]):
            if timelines[high][view].start > timelines[low][view].start:
                return False
    return True
