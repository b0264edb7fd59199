# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable, Optional

from src.core.certificates import verify_certificate
from src.core.errors import InvariantViolation
from src.core.leader import LeaderMap
from src.core.types import Certificate, Message, NodeId, ProposeView, TimePoint, TimerId, ViewNumber


class Synchronizer(ABC):
    """
    The state machine contract shared by every view synchronizer.

    Inputs are ``wish_to_advance``, ``deliver`` and ``timer_fired``; each
    returns the list of actions (Send, Multicast, SetTimer, CancelTimer,
    ProposeView) the node performs in response. Instances hold no
    references to the simulator and are deterministic: the same ordered
    inputs yield the same ordered outputs.

    Attributes:
        node_id (int): This node's id.
        n (int): Number of nodes.
        f (int): Fault threshold.
        leader_map (LeaderMap): The view to leader rotation.
        delta (Fraction): Known post-GST delivery bound.
    """
    name = "abstract"

    def __init__(self, node_id: NodeId, n: int, f: int, leader_map: LeaderMap,
                 delta: Fraction = Fraction(1),
                 certificate_check: Optional[Callable[[Certificate], bool]] = None,
                 start_view: ViewNumber = 0):
        self.node_id = node_id
        self.n = n
        self.f = f
        self.leader_map = leader_map
        self.delta = delta
        self._certificate_check = certificate_check
        self.last_proposed = start_view

    def start(self, now: TimePoint) -> list:
        return []

    @abstractmethod
    def wish_to_advance(self, now: TimePoint) -> list:
        ...

    @abstractmethod
    def deliver(self, message: Message, now: TimePoint) -> list:
        ...

    def timer_fired(self, timer_id: TimerId, now: TimePoint) -> list:
        return []

    def leader(self, view: ViewNumber) -> NodeId:
        return self.leader_map.leader_of(view)

    def certificate_ok(self, cert: Certificate) -> bool:
        if self._certificate_check is not None:
            return self._certificate_check(cert)
        return verify_certificate(cert, self.f)

    def propose(self, view: ViewNumber) -> ProposeView:
        """
        Builds a proposeView signal, enforcing strictly increasing views.

        Raises:
            InvariantViolation: If ``view`` does not exceed the last proposal.
        """
        if view <= self.last_proposed:
            raise InvariantViolation(
                f"node {self.node_id} proposed view {view} after view {self.last_proposed}")
        self.last_proposed = view
        return ProposeView(view)
