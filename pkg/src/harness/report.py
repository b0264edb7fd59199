# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from src.harness.config import ScenarioConfig
from src.metrics.analysis import Recovery, SyncInterval

SUMMARY_COLUMNS = (
    'synchronizer', 'n', 'f', 'delta', 'gst', 'wish_interval', 'c', 'horizon', 'seed', 'leader_map', 'adversary',
    'delay_mode', 'intervals', 'first_view', 'first_sync', 'latency', 'communication', 'recovery_view',
    'recovery_latency', 'recovery_communication', 'honest_messages', 'validity', 'integrity_violations',
    'claim_violations',
)


def _text(value) -> str:
    return '' if value is None else str(value)


def _fraction(value) -> Optional[Fraction]:
    return None if value is None else Fraction(value)


def _recovery(data) -> Optional[Recovery]:
    if data is None:
        return None
    return Recovery(data['view'], Fraction(data['latency']), data['communication'])


@dataclass(frozen=True)
class ClaimSummary:
    name: str
    checked: int
    violations: int


@dataclass(frozen=True)
class SyncReport:
    """
    Outcome of one scenario: the configuration, the synchronizations found
    and every estimate and audit computed from the trace.

    Attributes:
        config (ScenarioConfig): The configuration that produced the trace.
        intervals (tuple): Detected SyncInterval entries.
        latency (Fraction): Latency estimate, None when nothing synchronized after GST.
        communication (Fraction): Messages per synchronization, None likewise.
        honest_messages (int): Honest sends in the whole trace.
        validity_passed (bool): Result of the validity audit.
        validity_violation (str): First validity counterexample, if any.
        integrity_violations (tuple): Findings of the trace integrity audits.
        claims (tuple): ClaimSummary per bound checked for this synchronizer.
        recovery (Recovery): Cost of getting past the faulty leaders after GST, if measured.
    """
    config: ScenarioConfig
    intervals: tuple
    latency: Optional[Fraction]
    communication: Optional[Fraction]
    honest_messages: int
    validity_passed: bool
    validity_violation: Optional[str] = None
    integrity_violations: tuple = ()
    claims: tuple = ()
    recovery: Optional[Recovery] = None

    @property
    def synchronized(self) -> bool:
        return self.latency is not None

    @property
    def claim_violations(self) -> int:
        return sum(claim.violations for claim in self.claims)

    def summary_row(self) -> dict:
        """One flat row with the SUMMARY_COLUMNS keys, all values as text."""
        config = self.config
        first = self.intervals[0] if self.intervals else None
        recovery = self.recovery
        row = {
            'synchronizer': config.synchronizer,
            'n': config.n,
            'f': config.f,
            'delta': config.delta,
            'gst': config.gst,
            'wish_interval': config.effective_wish_interval,
            'c': config.c,
            'horizon': config.horizon,
            'seed': config.seed,
            'leader_map': config.leader_map,
            'adversary': config.adversary,
            'delay_mode': config.delay_mode,
            'intervals': len(self.intervals),
            'first_view': first.view if first else None,
            'first_sync': first.s_k if first else None,
            'latency': self.latency if self.synchronized else 'none',
            'communication': self.communication if self.synchronized else 'none',
            'recovery_view': recovery.view if recovery else None,
            'recovery_latency': recovery.latency if recovery else None,
            'recovery_communication': recovery.communication if recovery else None,
            'honest_messages': self.honest_messages,
            'validity': 'pass' if self.validity_passed else 'violation',
            'integrity_violations': len(self.integrity_violations),
            'claim_violations': self.claim_violations,
        }
        return {key: _text(row[key]) for key in SUMMARY_COLUMNS}

    def to_dict(self) -> dict:
        return {
            'config': self.config.to_dict(),
            'intervals': [{'k': iv.k, 'view': iv.view, 't1': str(iv.t1), 't2': str(iv.t2)} for iv in self.intervals],
            'latency': None if self.latency is None else str(self.latency),
            'communication': None if self.communication is None else str(self.communication),
            'honest_messages': self.honest_messages,
            'validity_passed': self.validity_passed,
            'validity_violation': self.validity_violation,
            'integrity_violations': list(self.integrity_violations),
            'claims': [{'name': c.name, 'checked': c.checked, 'violations': c.violations} for c in self.claims],
            'recovery': None if self.recovery is None else {
                'view': self.recovery.view, 'latency': str(self.recovery.latency),
                'communication': self.recovery.communication,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> SyncReport:
        return cls(
            config=ScenarioConfig.from_dict(data['config']),
            intervals=tuple(SyncInterval(iv['k'], iv['view'], Fraction(iv['t1']), Fraction(iv['t2']))
                            for iv in data['intervals']),
            latency=_fraction(data['latency']),
            communication=_fraction(data['communication']),
            honest_messages=data['honest_messages'],
            validity_passed=data['validity_passed'],
            validity_violation=data.get('validity_violation'),
            integrity_violations=tuple(data.get('integrity_violations', ())),
            claims=tuple(ClaimSummary(**claim) for claim in data.get('claims', ())),
            recovery=_recovery(data.get('recovery')),
        )


@dataclass(frozen=True)
class SweepPoint:
    """
    One point of a sweep: the report, or the error that stopped it.
    """
    value: int
    report: Optional[SyncReport] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class SweepTable:
    """
    Attributes:
        axis (str): n, t or seed.
        points (tuple): SweepPoint entries ordered by axis value.
        fits (dict): metric (communication, latency) -> {order: GrowthFit}.
    """
    axis: str
    points: tuple
    fits: dict
