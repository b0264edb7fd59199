# package src.core
from src.core.certificates import ContributionLedger, form_certificate, threshold, verify_certificate
from src.core.errors import ConfigError, EmitError, InvariantViolation, ViewSyncError
from src.core.leader import LeaderMap, leader_of
from src.core.synchronizer import Synchronizer
from src.core.types import (
    CancelTimer, Certificate, CertificateKind, Message, MessageKind, Multicast, ProposeView, Send, SetTimer,
    to_time,
)

__all__ = [
    'CancelTimer', 'Certificate', 'CertificateKind', 'ConfigError', 'ContributionLedger', 'EmitError',
    'InvariantViolation', 'LeaderMap', 'Message', 'MessageKind', 'Multicast', 'ProposeView', 'Send', 'SetTimer',
    'Synchronizer', 'ViewSyncError', 'form_certificate', 'leader_of', 'threshold', 'to_time', 'verify_certificate',
]
