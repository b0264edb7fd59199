# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from src.core.certificates import ContributionLedger, verify_certificate
from src.core.errors import ConfigError, InvariantViolation
from src.core.leader import LeaderMap
from src.core.synchronizer import Synchronizer
from src.core.types import (
    CancelTimer, Message, Multicast, NodeId, ProposeView, Send, SetTimer, TimePoint, check_view,
)
from src.simnet.adversary import AdversarySpec, NodeBehavior, ScriptedSend, behavior_for, parse_adversary
from src.simnet.delays import DelayPolicy, UniformRandomDelay, WorstCaseDelay
from src.simnet.events import Event, EventKind, EventQueue
from src.simnet.trace import RecordKind, Trace, TraceMeta, TraceRecorder
from src.sync import SYNCHRONIZERS

logger = logging.getLogger('simulator')


@dataclass
class NodeHarness:
    """
    A node inside the simulator: its synchronizer (None for silent nodes),
    adversarial behaviour, lifecycle and timer bookkeeping.

    Attributes:
        view (int): The view the node currently executes (last proposed).
        timer_generations (dict): timer id -> generation of the live deadline.
    """
    node_id: NodeId
    synchronizer: Optional[Synchronizer]
    behavior: NodeBehavior
    start_time: TimePoint
    start_view: int
    honest: bool
    started: bool = False
    crashed: bool = False
    view: int = 0
    timer_generations: dict = field(default_factory=dict)


class Simulator:
    """
    Deterministic discrete-event simulator for one scenario.

    Messages are delayed, never lost: a message sent at s arrives in
    (s, max(s, GST) + delta], and never before its recipient starts. Honest
    nodes call wishToAdvance at their start time and every wish interval
    after that. The whole run is a pure function of the configuration and
    its seed.

    Args:
        config: A validated ScenarioConfig.
        adversary (AdversarySpec): Overrides the adversary parsed from the
            configuration, e.g. to add scripted sends.
        delay_policy (DelayPolicy): Overrides the configured delay mode.
    """
    def __init__(self, config, adversary: Optional[AdversarySpec] = None,
                 delay_policy: Optional[DelayPolicy] = None):
        self.config = config
        self.n = config.n
        self.f = config.f
        self.delta = Fraction(config.delta)
        self.gst = Fraction(config.gst)
        self.horizon = Fraction(config.horizon)
        self.wish_interval = config.effective_wish_interval

        # The adversary is fixed before the leader map is drawn.
        self.adversary = adversary if adversary is not None else parse_adversary(config.adversary, self.n)
        self.adversary.validate(self.n, self.f, config.synchronizer)
        self.corrupt = self.adversary.corrupt
        self.honest = frozenset(range(1, self.n + 1)) - self.corrupt

        leader_seed, delay_seed = np.random.SeedSequence(config.seed).spawn(2)
        if config.leader_map == 'random':
            self.leader_map = LeaderMap.random(self.n, np.random.default_rng(leader_seed))
        else:
            self.leader_map = LeaderMap.round_robin(self.n)

        if delay_policy is not None:
            self.delay_policy = delay_policy
        elif config.delay_mode == 'uniform':
            self.delay_policy = UniformRandomDelay(self.delta, self.gst, np.random.default_rng(delay_seed))
        else:
            self.delay_policy = WorstCaseDelay(self.delta, self.gst)

        self.ledger = ContributionLedger(self.corrupt)
        self.queue = EventQueue()
        self.recorder = TraceRecorder()
        self._next_msg_id = 0
        self._finished = False

        start_times = config.start_times or (Fraction(0),) * self.n
        start_views = config.start_views or (0,) * self.n
        self.nodes = {
            node_id: self._build_node(node_id, Fraction(start_times[node_id - 1]), int(start_views[node_id - 1]))
            for node_id in range(1, self.n + 1)
        }

        for node in self.nodes.values():
            self.queue.push(node.start_time, EventKind.START, node.node_id)
        for node_id, at in sorted(self.adversary.crash_at.items()):
            self.crash(node_id, at)
        for script in self.adversary.scripted:
            self.queue.push(Fraction(script.time), EventKind.SCRIPT, script.sender, payload=script)

    def _certificate_check(self, cert) -> bool:
        return verify_certificate(cert, self.f, self.ledger)

    def _build_node(self, node_id: NodeId, start_time: TimePoint, start_view: int) -> NodeHarness:
        synchronizer = None
        if self.adversary.runs_protocol(node_id):
            cls = SYNCHRONIZERS[self.config.synchronizer]
            kwargs = dict(delta=self.delta, certificate_check=self._certificate_check, start_view=start_view)
            if self.config.synchronizer == 'doubling':
                kwargs['beta'] = Fraction(self.config.beta)
            synchronizer = cls(node_id, self.n, self.f, self.leader_map, **kwargs)
        behavior = behavior_for(node_id, self.adversary, self.leader_map, self.f, self.honest,
                                self._certificate_check)
        return NodeHarness(node_id, synchronizer, behavior, start_time, start_view,
                           honest=node_id in self.honest, view=start_view)

    def crash(self, node_id: NodeId, at: TimePoint):
        """
        Schedules a benign crash: from ``at`` on the node does nothing and
        everything delivered to it is absorbed.

        Raises:
            ConfigError: If the node is honest.
        """
        if node_id not in self.corrupt:
            raise ConfigError(f"cannot crash honest node {node_id}")
        self.queue.push(Fraction(at), EventKind.CRASH, node_id)

    def run(self) -> Trace:
        """
        Processes events up to and including the horizon.

        Returns:
            Trace: The ordered record of the run.
        """
        if self._finished:
            raise InvariantViolation("a simulator instance runs once")
        self._finished = True

        while len(self.queue) and self.queue.peek_time() <= self.horizon:
            event = self.queue.pop()
            node = self.nodes[event.node]
            if node.crashed:
                continue
            actions = self._dispatch(node, event)
            if actions:
                self._execute(node, actions, event.time)

        trace = Trace(self._meta(), self.recorder.records)
        logger.info(f"Simulated {self.config.synchronizer} with n={self.n}, f={self.f}: "
                    f"{len(trace.records)} records, {sum(1 for _ in trace.honest_sends())} honest messages")
        return trace

    def _meta(self) -> TraceMeta:
        honest_starts = [node.start_time for node in self.nodes.values() if node.honest]
        return TraceMeta(
            synchronizer=self.config.synchronizer, n=self.n, f=self.f, corrupt=tuple(sorted(self.corrupt)),
            leader_map=self.leader_map.permutation, gst=self.gst, delta=self.delta, horizon=self.horizon,
            wish_interval=self.wish_interval, origin=max(honest_starts, default=Fraction(0)),
            start_times=tuple(node.start_time for node in self.nodes.values()),
            start_views=tuple(node.start_view for node in self.nodes.values()),
        )

    def _dispatch(self, node: NodeHarness, event: Event) -> list:
        now = event.time
        sync = node.synchronizer
        kind = event.kind
        if kind is EventKind.START:
            node.started = True
            self.recorder.record(now, RecordKind.START, node.node_id, view=node.start_view)
            if sync is None:
                return []
            self.queue.push(now, EventKind.WISH_TICK, node.node_id)
            return sync.start(now)
        if kind is EventKind.CRASH:
            node.crashed = True
            self.recorder.record(now, RecordKind.CRASH, node.node_id)
            logger.debug(f"Node {node.node_id} crashed at {now}")
            return []
        if kind is EventKind.DELIVER:
            message = event.message
            self.recorder.record(now, RecordKind.DELIVER, node.node_id, view=message.view, peer=message.sender,
                                 message_kind=message.kind, msg_id=event.msg_id, for_leader=message.for_leader)
            if sync is None:
                return []
            return sync.deliver(message, now) + node.behavior.on_deliver(message)
        if kind is EventKind.WISH_TICK:
            self.recorder.record(now, RecordKind.WISH, node.node_id, view=node.view)
            next_tick = now + self.wish_interval
            if next_tick <= self.horizon:
                self.queue.push(next_tick, EventKind.WISH_TICK, node.node_id)
            return sync.wish_to_advance(now)
        if kind is EventKind.TIMER_FIRE:
            if node.timer_generations.get(event.timer_id) != event.generation:
                return []
            self.recorder.record(now, RecordKind.TIMER, node.node_id, timer=str(event.timer_id))
            return sync.timer_fired(event.timer_id, now)
        if kind is EventKind.SCRIPT:
            script: ScriptedSend = event.payload
            if script.to is None:
                return [Multicast(script.message)]
            return [Send(script.message, script.to)]
        raise InvariantViolation(f"unknown event kind {kind}")

    def _execute(self, node: NodeHarness, actions: list, now: TimePoint):
        for action in node.behavior.outgoing(actions):
            if isinstance(action, Send):
                self._transmit(node, action.message, action.to, now)
            elif isinstance(action, Multicast):
                for recipient in range(1, self.n + 1):
                    self._transmit(node, action.message, recipient, now)
            elif isinstance(action, SetTimer):
                if action.deadline < now:
                    raise InvariantViolation(f"node {node.node_id} armed timer {action.timer_id} in the past")
                generation = node.timer_generations.get(action.timer_id, 0) + 1
                node.timer_generations[action.timer_id] = generation
                self.queue.push(action.deadline, EventKind.TIMER_FIRE, node.node_id,
                                timer_id=action.timer_id, generation=generation)
            elif isinstance(action, CancelTimer):
                node.timer_generations[action.timer_id] = node.timer_generations.get(action.timer_id, 0) + 1
            elif isinstance(action, ProposeView):
                check_view(action.view)
                if action.view <= node.view:
                    raise InvariantViolation(f"node {node.node_id} proposed view {action.view} while in {node.view}")
                node.view = action.view
                self.recorder.record(now, RecordKind.PROPOSE, node.node_id, view=action.view)
            else:
                raise InvariantViolation(f"unknown action {action!r}")

    def _transmit(self, node: NodeHarness, message: Message, recipient: NodeId, now: TimePoint):
        if message.sender != node.node_id:
            raise InvariantViolation(f"node {node.node_id} tried to send as node {message.sender}")
        if not 1 <= recipient <= self.n:
            raise InvariantViolation(f"node {node.node_id} sent to unknown node {recipient}")
        msg_id = self._next_msg_id
        self._next_msg_id += 1
        deliver_at = self.delay_policy.deliver_at(now, node.node_id, recipient, message)
        deliver_at = max(deliver_at, self.nodes[recipient].start_time)
        signers = tuple(sorted(message.cert.signers)) if message.cert is not None else None
        self.recorder.record(now, RecordKind.SEND, node.node_id, view=message.view, peer=recipient,
                             message_kind=message.kind, msg_id=msg_id, deliver_at=deliver_at,
                             signers=signers, for_leader=message.for_leader)
        if node.honest:
            self.ledger.record(message.kind, message.view, node.node_id)
        self.queue.push(deliver_at, EventKind.DELIVER, recipient, message=message, msg_id=msg_id)


def run(config, adversary: Optional[AdversarySpec] = None, delay_policy: Optional[DelayPolicy] = None) -> Trace:
    """
    Simulates one scenario and returns its trace.

    Args:
        config: A ScenarioConfig; it is validated before any event runs.
        adversary (AdversarySpec): Optional adversary overriding the configured one.
        delay_policy (DelayPolicy): Optional delay policy overriding the configured one.

    Returns:
        Trace: The deterministic trace for (config, seed).

    Raises:
        ConfigError: If the configuration is invalid.
    """
    config.validate()
    return Simulator(config, adversary, delay_policy).run()
