# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from src.core.certificates import form_certificate
from src.core.errors import InvariantViolation
from src.core.synchronizer import Synchronizer
from src.core.types import (
    CancelTimer, Certificate, CertificateKind, Message, MessageKind, Multicast, Send, SetTimer, TimePoint,
    ViewNumber,
)

logger = logging.getLogger('cogsworth')

TC_TIMER = ('tc',)


def vote_timer(view: ViewNumber) -> tuple:
    """Timer id of the QC escalation for ``view``."""
    return ('vote', view)


@dataclass
class PendingWish:
    """
    A wish waiting for its TC.

    Attributes:
        view (int): The view wished for.
        last_sent (Fraction): When the WISH was last sent.
        attempted (int): Next view whose leader is enlisted on timeout.
    """
    view: ViewNumber
    last_sent: TimePoint
    attempted: ViewNumber


@dataclass
class PendingVote:
    """A VOTE waiting for its QC, escalated the same way as a wish."""
    view: ViewNumber
    last_sent: TimePoint
    attempted: ViewNumber


@dataclass
class CogsworthState:
    """
    Replica side state.

    Attributes:
        curr (int): Current view.
        pending_wish (PendingWish): Outstanding wish, if any.
        pending_votes (dict): view -> PendingVote, one escalation per voted view.
        held_tc (dict): view -> first valid TC received.
        answered (set): (view, leader) pairs whose TC was already answered.
    """
    curr: ViewNumber = 0
    pending_wish: Optional[PendingWish] = None
    pending_votes: dict = field(default_factory=dict)
    held_tc: dict = field(default_factory=dict)
    answered: set = field(default_factory=set)


@dataclass
class CogsworthLeaderState:
    """
    Leader side state, shared by every view this node leads.

    Attributes:
        wish_tallies (dict): view -> distinct WISH senders.
        vote_tallies (dict): view -> distinct VOTE senders.
        tc_sent (set): Views whose TC was multicast.
        qc_sent (set): Views whose QC was multicast.
    """
    wish_tallies: dict = field(default_factory=dict)
    vote_tallies: dict = field(default_factory=dict)
    tc_sent: set = field(default_factory=set)
    qc_sent: set = field(default_factory=set)

    def prune(self, stale):
        """Drops every tally and sent mark of a view for which ``stale(view)`` holds."""
        for tallies in (self.wish_tallies, self.vote_tallies):
            for view in [v for v in tallies if stale(v)]:
                del tallies[view]
        self.tc_sent = {v for v in self.tc_sent if not stale(v)}
        self.qc_sent = {v for v in self.qc_sent if not stale(v)}


class CogsworthSynchronizer(Synchronizer):
    """
    Leader based synchronizer with relayed certificates.

    A node sends WISH(v) to leader(v). A leader that gathers f+1 wishes
    multicasts TC(v); replicas answer with VOTE(v) and the leader multicasts
    QC(v) after 2f+1 votes, which moves nodes into v. A node that hears
    nothing within 2 delta enlists the leaders of v+1 .. v+f+1, one by one.

    Replica and leader roles live in the same object. Messages with
    ``for_leader`` set go to the leader role.
    """
    name = "cogsworth"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.state = CogsworthState()
        self.leader_state = CogsworthLeaderState()

    @property
    def escalation_timeout(self):
        return 2 * self.delta

    def budget(self, view: ViewNumber) -> ViewNumber:
        """Last view whose leader may be enlisted for ``view``."""
        return view + self.f + 1

    def stale(self, view: ViewNumber) -> bool:
        """Views below curr - (f+2) are forgotten and ignored."""
        return view < self.state.curr - (self.f + 2)

    def _send(self, kind, view, to, cert=None) -> Send:
        """Point to point message for the leader role of ``to``."""
        return Send(Message(kind, view, self.node_id, cert, for_leader=True), to)

    # Replica role

    def wish_to_advance(self, now):
        """
        Sends WISH(curr+1) to leader(curr+1) and restarts the TC escalation
        from leader(curr+2), even if a wish for that view is pending.
        """
        view = self.state.curr + 1
        self.state.pending_wish = PendingWish(view, now, attempted=view + 1)
        return [
            self._send(MessageKind.WISH, view, self.leader(view)),
            SetTimer(TC_TIMER, now + self.escalation_timeout),
        ]

    def on_tc_timeout(self, now) -> list:
        pending = self.state.pending_wish
        if pending is None or pending.view <= self.state.curr or pending.view in self.state.held_tc:
            return []
        if pending.attempted > self.budget(pending.view):
            logger.debug(f"Node {self.node_id} exhausted TC escalation for view {pending.view}")
            return []
        target = self.leader(pending.attempted)
        logger.debug(f"Node {self.node_id} enlisting leader({pending.attempted})={target} for TC({pending.view})")
        pending.attempted += 1
        pending.last_sent = now
        return [
            self._send(MessageKind.WISH, pending.view, target),
            SetTimer(TC_TIMER, now + self.escalation_timeout),
        ]

    def on_receive_tc(self, cert: Certificate, sender, now) -> list:
        view = cert.view
        if self.stale(view):
            return []
        if not self.certificate_ok(cert) or not self.leader_map.leads_window(sender, view, self.f):
            logger.debug(f"Node {self.node_id} dropping TC({view}) from node {sender}")
            return []
        if (view, sender) in self.state.answered:
            return []
        self.state.answered.add((view, sender))

        actions = [
            self._send(MessageKind.TC, view, self.leader(view), cert),
            self._send(MessageKind.VOTE, view, sender),
        ]
        if view <= self.state.curr:
            return actions
        self.state.held_tc.setdefault(view, cert)
        if view not in self.state.pending_votes:
            self.state.pending_votes[view] = PendingVote(view, now, attempted=view + 1)
            actions.append(SetTimer(vote_timer(view), now + self.escalation_timeout))
        return actions

    def on_vote_timeout(self, view: ViewNumber, now) -> list:
        pending = self.state.pending_votes.get(view)
        if pending is None or view <= self.state.curr:
            return []
        if pending.attempted > self.budget(view):
            logger.debug(f"Node {self.node_id} exhausted QC escalation for view {view}")
            del self.state.pending_votes[view]
            return []
        cert = self.state.held_tc.get(view)
        if cert is None:
            raise InvariantViolation(f"node {self.node_id} escalating VOTE({view}) without holding TC({view})")
        target = self.leader(pending.attempted)
        logger.debug(f"Node {self.node_id} enlisting leader({pending.attempted})={target} for QC({view})")
        pending.attempted += 1
        pending.last_sent = now
        return [
            self._send(MessageKind.VOTE, view, target),
            self._send(MessageKind.TC, view, target, cert),
            SetTimer(vote_timer(view), now + self.escalation_timeout),
        ]

    def on_receive_qc(self, cert: Certificate, sender, now) -> list:
        view = cert.view
        if view <= self.state.curr:
            return []
        if not self.certificate_ok(cert) or not self.leader_map.leads_window(sender, view, self.f):
            logger.debug(f"Node {self.node_id} dropping QC({view}) from node {sender}")
            return []
        self.state.curr = view
        actions = [self.propose(view)]

        pending = self.state.pending_wish
        if pending is not None and pending.view <= view:
            self.state.pending_wish = None
            actions.append(CancelTimer(TC_TIMER))
        for voted in sorted(v for v in self.state.pending_votes if v <= view):
            del self.state.pending_votes[voted]
            actions.append(CancelTimer(vote_timer(voted)))
        for held in [v for v in self.state.held_tc if v <= view]:
            del self.state.held_tc[held]
        self.state.answered = {(v, s) for v, s in self.state.answered if not self.stale(v)}
        self.leader_state.prune(self.stale)
        return actions

    # Leader role

    def leader_on_wish_or_tc(self, message: Message) -> list:
        view = message.view
        ls = self.leader_state
        if view in ls.tc_sent:
            return []
        if message.kind is MessageKind.TC:
            if not self.certificate_ok(message.cert):
                logger.debug(f"Leader {self.node_id} dropping invalid TC({view}) from node {message.sender}")
                return []
            cert = message.cert
        else:
            tally = ls.wish_tallies.setdefault(view, set())
            tally.add(message.sender)
            cert = form_certificate(CertificateKind.TC, view, ((s, view) for s in tally), self.f)
            if cert is None:
                return []
        ls.tc_sent.add(view)
        ls.wish_tallies.pop(view, None)
        return [Multicast(Message(MessageKind.TC, view, self.node_id, cert))]

    def leader_on_vote(self, message: Message) -> list:
        view = message.view
        ls = self.leader_state
        if view in ls.qc_sent:
            return []
        tally = ls.vote_tallies.setdefault(view, set())
        tally.add(message.sender)
        cert = form_certificate(CertificateKind.QC, view, ((s, view) for s in tally), self.f)
        if cert is None:
            return []
        ls.qc_sent.add(view)
        del ls.vote_tallies[view]
        return [Multicast(Message(MessageKind.QC, view, self.node_id, cert))]

    # Contract

    def deliver(self, message, now):
        if message.for_leader:
            if self.stale(message.view):
                # Pruned views must not certify a second time.
                return []
            if not self.leader_map.leads_window(self.node_id, message.view, self.f):
                logger.debug(f"Node {self.node_id} is outside the leader window of view {message.view}")
                return []
            if message.kind in (MessageKind.WISH, MessageKind.TC):
                return self.leader_on_wish_or_tc(message)
            if message.kind is MessageKind.VOTE:
                return self.leader_on_vote(message)
        elif message.kind is MessageKind.TC:
            return self.on_receive_tc(message.cert, message.sender, now)
        elif message.kind is MessageKind.QC:
            return self.on_receive_qc(message.cert, message.sender, now)
        logger.debug(f"Node {self.node_id} dropping unexpected {message.kind.value}({message.view})")
        return []

    def timer_fired(self, timer_id, now):
        if timer_id == TC_TIMER:
            return self.on_tc_timeout(now)
        if isinstance(timer_id, tuple) and timer_id[0] == 'vote':
            return self.on_vote_timeout(timer_id[1], now)
        return []
