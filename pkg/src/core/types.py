# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Hashable, Optional, Union

from src.core.errors import InvariantViolation

ViewNumber = int
NodeId = int
TimePoint = Fraction
Duration = Fraction
TimerId = Hashable

# Largest view a simulated run can reach.
MAX_VIEW = 2 ** 63 - 1


def to_time(value: Union[int, float, str, Fraction]) -> Fraction:
    """
    Converts a user supplied duration or time point into an exact Fraction.

    Accepts integers, decimal strings ("4.5"), fraction strings ("9/2"),
    floats (converted through their shortest repr, so 0.1 stays 1/10) and
    Fractions.

    Args:
        value: The value to convert.

    Returns:
        Fraction: The exact value.

    Raises:
        TypeError: If the value has an unsupported type.
        ValueError: If a string cannot be parsed.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not time values")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"unsupported time value {value!r}")


def check_view(view: int) -> int:
    if view < 0 or view > MAX_VIEW:
        raise InvariantViolation(f"view {view} outside [0, {MAX_VIEW}]")
    return view


class MessageKind(Enum):
    WISH = "WISH"
    TC = "TC"
    VOTE = "VOTE"
    QC = "QC"
    NEWROUND = "NEWROUND"


class CertificateKind(Enum):
    TC = "TC"
    QC = "QC"


@dataclass(frozen=True)
class Certificate:
    """
    Ideal threshold certificate: the set of nodes that signed for a view.

    Attributes:
        kind (CertificateKind): TC (f+1 wishes) or QC (2f+1 votes).
        view (int): The view the certificate is about.
        signers (frozenset): Distinct contributing node ids.
    """
    kind: CertificateKind
    view: ViewNumber
    signers: frozenset

    def __post_init__(self):
        object.__setattr__(self, 'signers', frozenset(self.signers))
        check_view(self.view)


@dataclass(frozen=True)
class Message:
    """
    A protocol message. Certificate carrying kinds (TC, QC) must hold a
    certificate for the same view; every other kind must not.

    ``for_leader`` marks messages addressed to the recipient's leader role
    (WISH, VOTE and forwarded TCs) as opposed to its replica role.
    """
    kind: MessageKind
    view: ViewNumber
    sender: NodeId
    cert: Optional[Certificate] = None
    for_leader: bool = False

    def __post_init__(self):
        check_view(self.view)
        carries = self.kind in (MessageKind.TC, MessageKind.QC)
        if carries != (self.cert is not None):
            raise ValueError(f"{self.kind.value} message must {'' if carries else 'not '}carry a certificate")
        if self.cert is not None:
            if self.cert.view != self.view:
                raise ValueError(f"certificate view {self.cert.view} does not match message view {self.view}")
            if self.cert.kind.value != self.kind.value:
                raise ValueError(f"{self.cert.kind.value} certificate inside a {self.kind.value} message")


# Actions emitted by synchronizers and executed by the simulator.

@dataclass(frozen=True)
class Send:
    message: Message
    to: NodeId


@dataclass(frozen=True)
class Multicast:
    message: Message


@dataclass(frozen=True)
class SetTimer:
    """Absolute deadline; re-arming the same timer id cancels the previous one."""
    timer_id: TimerId
    deadline: TimePoint


@dataclass(frozen=True)
class CancelTimer:
    timer_id: TimerId


@dataclass(frozen=True)
class ProposeView:
    view: ViewNumber


Action = Union[Send, Multicast, SetTimer, CancelTimer, ProposeView]
