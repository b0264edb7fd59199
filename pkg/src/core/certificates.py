# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

import logging
from collections import defaultdict
from typing import Iterable, Optional

from src.core.types import Certificate, CertificateKind, MessageKind, NodeId, ViewNumber

logger = logging.getLogger('certificates')

# Contribution message that backs each certificate kind.
CONTRIBUTION_KIND = {
    CertificateKind.TC: MessageKind.WISH,
    CertificateKind.QC: MessageKind.VOTE,
}


def threshold(kind: CertificateKind, f: int) -> int:
    """
    Returns the number of distinct signers a certificate needs: f+1 for a
    TC, 2f+1 for a QC.
    """
    return f + 1 if kind is CertificateKind.TC else 2 * f + 1


def form_certificate(kind: CertificateKind, view: ViewNumber, contributions: Iterable, f: int) -> Optional[Certificate]:
    """
    Aggregates contributions into a certificate once the threshold is met.

    Duplicate senders count once. Below the threshold nothing is formed and
    the caller keeps accumulating.

    Args:
        kind (CertificateKind): TC or QC.
        view (int): The view being certified.
        contributions: Iterable of (node_id, view) pairs.
        f (int): Fault threshold.

    Returns:
        Certificate | None: The certificate, or None while insufficient.

    Raises:
        ValueError: If a contribution is for another view.
    """
    signers = set()
    for node, contributed_view in contributions:
        if contributed_view != view:
            raise ValueError(f"contribution from node {node} is for view {contributed_view}, not {view}")
        signers.add(node)
    if len(signers) < threshold(kind, f):
        return None
    return Certificate(kind, view, frozenset(signers))


class ContributionLedger:
    """
    Records which honest nodes actually sent a WISH or VOTE for which view.

    Certificates are checked against this record: an honest signer that never
    contributed means the certificate was forged. Corrupt nodes may sign
    anything, so their signatures always pass.

    Attributes:
        corrupt (frozenset): Ids of the corrupt nodes.
    """
    def __init__(self, corrupt=frozenset()):
        self.corrupt = frozenset(corrupt)
        self._contributed = defaultdict(set)

    def record(self, kind: MessageKind, view: ViewNumber, sender: NodeId):
        if kind in (MessageKind.WISH, MessageKind.VOTE) and sender not in self.corrupt:
            self._contributed[(kind, view)].add(sender)

    def contributed(self, kind: CertificateKind, view: ViewNumber, node: NodeId) -> bool:
        if node in self.corrupt:
            return True
        return node in self._contributed.get((CONTRIBUTION_KIND[kind], view), ())


def verify_certificate(cert: Certificate, f: int, ledger: Optional[ContributionLedger] = None) -> bool:
    """
    Checks a certificate's threshold and, when a ledger is given, that every
    honest signer genuinely contributed.

    Args:
        cert (Certificate): The certificate to check.
        f (int): Fault threshold.
        ledger (ContributionLedger): Optional trace context.

    Returns:
        bool: True if the certificate is valid.
    """
    if len(cert.signers) < threshold(cert.kind, f):
        return False
    if ledger is None:
        return True
    for signer in cert.signers:
        if not ledger.contributed(cert.kind, cert.view, signer):
            logger.debug(f"Rejecting {cert.kind.value}({cert.view}): node {signer} never contributed")
            return False
    return True
