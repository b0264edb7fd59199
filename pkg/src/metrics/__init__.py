# package src.metrics
from src.metrics.analysis import (
    CommunicationBreakdown, Recovery, SyncInterval, communication_breakdown, detect_sync_intervals,
    measure_communication, measure_latency, measure_recovery,
)
from src.metrics.audits import IntegrityReport, ValidityReport, audit_validity, run_integrity_audits
from src.metrics.claims import (
    ClaimReport, check_agreement_bound, check_honest_leader_bound, check_quorum_bound, entry_order_holds,
)
from src.metrics.leaders import (
    LeaderRunEstimate, estimate_consecutive_byzantine_leaders, estimate_for_configs, exact_enlisted_leaders_mean,
)

__all__ = [
    'ClaimReport', 'CommunicationBreakdown', 'IntegrityReport', 'LeaderRunEstimate', 'Recovery', 'SyncInterval',
    'ValidityReport', 'audit_validity', 'check_agreement_bound', 'check_honest_leader_bound', 'check_quorum_bound',
    'communication_breakdown', 'detect_sync_intervals', 'entry_order_holds', 'estimate_consecutive_byzantine_leaders',
    'estimate_for_configs', 'exact_enlisted_leaders_mean', 'measure_communication', 'measure_latency',
    'measure_recovery', 'run_integrity_audits',
]
