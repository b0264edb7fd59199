# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

from src.core.certificates import CONTRIBUTION_KIND
from src.core.types import CertificateKind, MessageKind
from src.simnet.trace import RecordKind, Trace

logger = logging.getLogger('audits')


@dataclass(frozen=True)
class ValidityReport:
    """
    Attributes:
        passed (bool): True if every honest proposeView was backed by honest wishes.
        checked (int): Number of honest proposeView signals examined.
        violation (str): The first counterexample, if any.
    """
    passed: bool
    checked: int
    violation: Optional[str] = None


@dataclass(frozen=True)
class IntegrityReport:
    """
    Attributes:
        violations (tuple): Human readable findings, empty when clean.
    """
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def audit_validity(trace: Trace) -> ValidityReport:
    """
    Checks that every honest proposeView(v') follows some honest node
    calling wishToAdvance at least v' - v times while executing a view
    v < v'. Wishes are attributed to the view recorded with them.

    Returns:
        ValidityReport: Pass, or the first counterexample.
    """
    honest = trace.meta.honest
    wish_counts = defaultdict(int)
    best = {}  # view -> highest wish count of any honest node while executing it
    checked = 0
    for record in trace.records:
        if record.node not in honest:
            continue
        if record.kind is RecordKind.WISH:
            key = (record.node, record.view)
            wish_counts[key] += 1
            best[record.view] = max(best.get(record.view, 0), wish_counts[key])
        elif record.kind is RecordKind.PROPOSE:
            checked += 1
            target = record.view
            if not any(view < target and count >= target - view for view, count in best.items()):
                violation = (f"node {record.node} proposed view {target} at t={record.time} "
                             f"without enough honest wishes")
                logger.warning(f"Validity violation: {violation}")
                return ValidityReport(False, checked, violation)
    return ValidityReport(True, checked)


def audit_delivery_bounds(trace: Trace) -> list:
    """Every delivery lands in (send, max(send, GST) + delta]."""
    meta = trace.meta
    sends = {r.msg_id: r for r in trace.of_kind(RecordKind.SEND)}
    problems = []
    for record in trace.of_kind(RecordKind.DELIVER):
        send = sends.get(record.msg_id)
        if send is None:
            continue
        if not send.time < record.time <= max(send.time, meta.gst) + meta.delta:
            problems.append(f"message {record.msg_id} sent at {send.time} delivered at {record.time}")
    return problems


def audit_sender_authenticity(trace: Trace) -> list:
    """Every delivery matches an earlier send by the claimed sender to this recipient."""
    sends = {r.msg_id: r for r in trace.of_kind(RecordKind.SEND)}
    problems = []
    for record in trace.of_kind(RecordKind.DELIVER):
        send = sends.get(record.msg_id)
        if send is None or send.seq > record.seq or send.node != record.peer or send.peer != record.node:
            problems.append(f"delivery {record.seq} to node {record.node} has no matching send from node {record.peer}")
    return problems


def audit_monotone_proposals(trace: Trace) -> list:
    last = {}
    problems = []
    for record in trace.of_kind(RecordKind.START, RecordKind.PROPOSE):
        previous = last.get(record.node)
        if record.kind is RecordKind.PROPOSE and previous is not None and record.view <= previous:
            problems.append(f"node {record.node} proposed {record.view} after {previous}")
        last[record.node] = record.view
    return problems


def audit_unforgeability(trace: Trace) -> list:
    """
    Every certificate an honest node sends names only honest signers that
    sent the matching WISH or VOTE earlier.
    """
    honest = trace.meta.honest
    contributed = set()
    problems = []
    for record in trace.of_kind(RecordKind.SEND):
        if record.node not in honest:
            continue
        if record.message_kind in (MessageKind.WISH, MessageKind.VOTE):
            contributed.add((record.message_kind, record.view, record.node))
        elif record.signers is not None:
            needed = CONTRIBUTION_KIND[CertificateKind(record.message_kind.value)]
            for signer in record.signers:
                if signer in honest and (needed, record.view, signer) not in contributed:
                    problems.append(f"{record.message_kind.value}({record.view}) sent by node {record.node} "
                                    f"names node {signer}, which never sent {needed.value}({record.view})")
    return problems


def run_integrity_audits(trace: Trace) -> IntegrityReport:
    violations = (audit_delivery_bounds(trace) + audit_sender_authenticity(trace)
                  + audit_monotone_proposals(trace) + audit_unforgeability(trace))
    for violation in violations:
        logger.warning(f"Integrity violation: {violation}")
    return IntegrityReport(tuple(violations))
