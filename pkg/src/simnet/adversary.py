# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from src.core.errors import ConfigError
from src.core.leader import LeaderMap
from src.core.types import Certificate, Message, MessageKind, Multicast, NodeId, Send, TimePoint, to_time

logger = logging.getLogger('adversary')

COGSWORTH_ONLY = ('withhold', 'amplify')
_CLAUSE = re.compile(r'^(crash|silent|withhold|amplify):([^@]+)(?:@(.+))?$')
_GROUP = re.compile(r'^(leaders|spread)(\d+)$')


@dataclass(frozen=True)
class ScriptedSend:
    """
    A message a corrupt node sends at a fixed time. ``to`` None multicasts.
    """
    time: TimePoint
    sender: NodeId
    message: Message
    to: Optional[NodeId] = None


@dataclass(frozen=True)
class AdversarySpec:
    """
    The corrupt nodes and what they do, fixed before the run starts.

    Attributes:
        crash_at (dict): node -> crash time (benign failures).
        silent (frozenset): Byzantine nodes that never send.
        withhold (frozenset): Byzantine leaders that hand QCs to a single node.
        amplify (frozenset): Byzantine nodes forwarding every TC to the next f+1 leaders.
        scripted (tuple): ScriptedSend entries; their senders are corrupt.
    """
    crash_at: dict = field(default_factory=dict)
    silent: frozenset = frozenset()
    withhold: frozenset = frozenset()
    amplify: frozenset = frozenset()
    scripted: tuple = ()

    @property
    def corrupt(self) -> frozenset:
        scripted = {s.sender for s in self.scripted}
        return frozenset(self.crash_at) | self.silent | self.withhold | self.amplify | scripted

    def runs_protocol(self, node: NodeId) -> bool:
        if node in self.silent:
            return False
        if node in self.crash_at or node in self.withhold or node in self.amplify:
            return True
        return node not in self.corrupt

    def validate(self, n: int, f: int, synchronizer: str):
        """
        Raises:
            ConfigError: On too many corrupt nodes, unknown ids, overlapping
                behaviours or behaviours the synchronizer does not support.
        """
        corrupt = self.corrupt
        if len(corrupt) > f:
            raise ConfigError(f"adversary corrupts {len(corrupt)} nodes but f={f}")
        for node in sorted(corrupt):
            if not 1 <= node <= n:
                raise ConfigError(f"corrupt node {node} outside [1, {n}]")
        groups = [set(self.crash_at), self.silent, self.withhold, self.amplify]
        for i, group in enumerate(groups):
            for other in groups[i + 1:]:
                if group & other:
                    raise ConfigError(f"nodes {sorted(group & other)} have more than one adversary behaviour")
        for name in COGSWORTH_ONLY:
            if getattr(self, name) and synchronizer != 'cogsworth':
                raise ConfigError(f"adversary behaviour '{name}' only applies to the cogsworth synchronizer")
        for crash_time in self.crash_at.values():
            if crash_time < 0:
                raise ConfigError(f"crash time {crash_time} is negative")
        for script in self.scripted:
            if script.message.sender != script.sender:
                raise ConfigError(f"scripted message from node {script.sender} claims sender {script.message.sender}")


def resolve_targets(text: str, n: int) -> list:
    """
    Resolves a target list against the round-robin rotation.

    Targets are comma separated node ids, ``leader`` (leader of view 1),
    ``leaders<t>`` (leaders of views 1..t) or ``spread<t>`` (leaders of
    views 1, 3, ..., 2t-1).

    Raises:
        ConfigError: On an unparseable target.
    """
    rotation = LeaderMap.round_robin(n)
    nodes = []
    for token in (t.strip() for t in text.split(',')):
        if not token:
            continue
        if token == 'leader':
            nodes.append(rotation.leader_of(1))
        elif match := _GROUP.match(token):
            count = int(match.group(2))
            views = range(1, count + 1) if match.group(1) == 'leaders' else range(1, 2 * count, 2)
            nodes.extend(rotation.leaders_of(views))
        elif token.isdigit():
            nodes.append(int(token))
        else:
            raise ConfigError(f"unknown adversary target '{token}'")
    return list(dict.fromkeys(nodes))


def parse_adversary(spec: str, n: int) -> AdversarySpec:
    """
    Parses an adversary specification such as ``crash:leader@0`` or
    ``withhold:2+amplify:3``. ``none`` (or an empty string) means no corruption.

    Args:
        spec (str): The specification text.
        n (int): Number of nodes, needed to resolve leader based targets.

    Returns:
        AdversarySpec: The parsed, not yet validated, adversary.

    Raises:
        ConfigError: On a malformed clause.
    """
    spec = (spec or 'none').strip()
    if spec == 'none':
        return AdversarySpec()
    crash_at, sets = {}, {name: set() for name in ('silent', 'withhold', 'amplify')}
    for clause in spec.split('+'):
        match = _CLAUSE.match(clause.strip())
        if not match:
            raise ConfigError(f"malformed adversary clause '{clause}'")
        behavior, targets, when = match.groups()
        nodes = resolve_targets(targets, n)
        if behavior == 'crash':
            if when is None:
                raise ConfigError(f"crash clause '{clause}' needs a time, e.g. crash:1@0")
            try:
                crash_time = to_time(when)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"invalid crash time '{when}'")
            crash_at.update({node: crash_time for node in nodes})
        else:
            if when is not None:
                raise ConfigError(f"'{behavior}' clause does not take a time")
            sets[behavior].update(nodes)
    return AdversarySpec(crash_at=crash_at, silent=frozenset(sets['silent']),
                         withhold=frozenset(sets['withhold']), amplify=frozenset(sets['amplify']))


def byzantine_tc_amplify(node_id: NodeId, cert: Certificate, leader_map: LeaderMap, f: int) -> list:
    """
    Forwards a TC to the leaders of the f+1 views after it, so each of them
    multicasts it again.

    Returns:
        list: Send actions, one per distinct target leader (empty when f=0).
    """
    if f == 0:
        return []
    targets = dict.fromkeys(leader_map.leader_of(cert.view + i) for i in range(1, f + 2))
    message = Message(MessageKind.TC, cert.view, node_id, cert, for_leader=True)
    return [Send(message, to) for to in targets]


class NodeBehavior:
    """Honest behaviour: actions pass through unchanged."""
    def outgoing(self, actions: list) -> list:
        return actions

    def on_deliver(self, message: Message) -> list:
        return []


class WithholdBehavior(NodeBehavior):
    """Delivers QC multicasts to a single honest node only."""
    def __init__(self, node_id: NodeId, target: NodeId):
        self.node_id = node_id
        self.target = target

    def outgoing(self, actions):
        result = []
        for action in actions:
            if isinstance(action, Multicast) and action.message.kind is MessageKind.QC:
                logger.debug(f"Node {self.node_id} withholding QC({action.message.view}), only node {self.target} gets it")
                result.append(Send(action.message, self.target))
            else:
                result.append(action)
        return result


class AmplifyBehavior(NodeBehavior):
    """Forwards each valid TC it holds or forms to the next f+1 leaders, once per view."""
    def __init__(self, node_id: NodeId, leader_map: LeaderMap, f: int, certificate_check: Callable):
        self.node_id = node_id
        self.leader_map = leader_map
        self.f = f
        self.certificate_check = certificate_check
        self.forwarded = set()

    def _amplify(self, cert: Certificate) -> list:
        if cert.view in self.forwarded:
            return []
        self.forwarded.add(cert.view)
        return byzantine_tc_amplify(self.node_id, cert, self.leader_map, self.f)

    def outgoing(self, actions):
        extra = []
        for action in actions:
            if isinstance(action, Multicast) and action.message.kind is MessageKind.TC:
                extra.extend(self._amplify(action.message.cert))
        return actions + extra

    def on_deliver(self, message):
        if message.kind is MessageKind.TC and self.certificate_check(message.cert):
            return self._amplify(message.cert)
        return []


def behavior_for(node: NodeId, adversary: AdversarySpec, leader_map: LeaderMap, f: int, honest: frozenset,
                 certificate_check: Callable) -> NodeBehavior:
    if node in adversary.withhold:
        return WithholdBehavior(node, min(honest))
    if node in adversary.amplify:
        return AmplifyBehavior(node, leader_map, f, certificate_check)
    return NodeBehavior()

