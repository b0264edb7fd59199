# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import asyncio
import logging
from typing import Optional

from src.core.errors import ConfigError, ViewSyncError
from src.harness.config import ScenarioConfig
from src.harness.fitting import fit_both
from src.harness.report import ClaimSummary, SweepPoint, SweepTable, SyncReport
from src.metrics import (
    LeaderRunEstimate, audit_validity, check_agreement_bound, check_honest_leader_bound, check_quorum_bound,
    detect_sync_intervals, entry_order_holds, estimate_consecutive_byzantine_leaders, measure_communication,
    measure_latency, measure_recovery, run_integrity_audits,
)
from src.simnet import AdversarySpec, DelayPolicy, Trace
from src.simnet import run as simulate
from src.utility.helpers import env_int

logger = logging.getLogger('runner')

SWEEP_AXES = ('n', 't', 'seed')


def _claims_for(trace: Trace) -> tuple:
    synchronizer = trace.meta.synchronizer
    if synchronizer == 'cogsworth':
        reports = [check_honest_leader_bound(trace), check_quorum_bound(trace)]
    elif synchronizer == 'broadcast':
        reports = [check_agreement_bound(trace)]
    else:
        if len(set(trace.meta.start_times)) != 1:
            return ()
        return (ClaimSummary('entry-order', 1, 0 if entry_order_holds(trace) else 1),)
    return tuple(ClaimSummary(r.name, r.checked, len(r.violations)) for r in reports)


def analyze(config: ScenarioConfig, trace: Trace) -> SyncReport:
    """
    Computes every estimate and audit of a finished trace.

    Args:
        config (ScenarioConfig): The configuration the trace was produced with.
        trace (Trace): Output of the simulator.

    Returns:
        SyncReport: The assembled report.
    """
    intervals = detect_sync_intervals(trace, config.c)
    validity = audit_validity(trace)
    integrity = run_integrity_audits(trace)
    if not validity.passed:
        logger.warning(f"Validity violated: {validity.violation}")
    for violation in integrity.violations:
        logger.error(f"Integrity audit failed: {violation}")
    return SyncReport(
        config=config,
        intervals=tuple(intervals),
        latency=measure_latency(trace, intervals),
        communication=measure_communication(trace, intervals),
        honest_messages=sum(1 for _ in trace.honest_sends()),
        validity_passed=validity.passed,
        validity_violation=validity.violation,
        integrity_violations=tuple(integrity.violations),
        claims=_claims_for(trace),
        recovery=measure_recovery(trace, intervals),
    )


def run_scenario(config: ScenarioConfig, adversary: Optional[AdversarySpec] = None,
                 delay_policy: Optional[DelayPolicy] = None) -> SyncReport:
    """
    Simulates one scenario and analyzes its trace.

    Raises:
        ConfigError: If the configuration is invalid.
        InvariantViolation: If a synchronizer or the simulator breaks an invariant.
    """
    trace = simulate(config, adversary, delay_policy)
    report = analyze(config, trace)
    logger.info(f"{config.synchronizer} n={config.n} f={config.f} seed={config.seed}: "
                f"{len(report.intervals)} synchronizations, latency={report.latency}, "
                f"communication={report.communication}")
    return report


def point_config(base: ScenarioConfig, axis: str, value: int, adversary_template: str = '') -> ScenarioConfig:
    """
    The configuration of one sweep point.

    The n axis sets f = (n-1) // 3, the t axis fills ``{t}`` in the adversary
    template and the seed axis only changes the seed.

    Raises:
        ConfigError: On an unknown axis or a t sweep without a template.
    """
    if axis == 'n':
        return base.with_changes(n=value, f=(value - 1) // 3)
    if axis == 't':
        if '{t}' not in adversary_template:
            raise ConfigError("a t sweep needs an adversary template containing {t}")
        return base.with_changes(adversary=adversary_template.format(t=value))
    if axis == 'seed':
        return base.with_changes(seed=value)
    raise ConfigError(f"unknown sweep axis '{axis}', expected one of {', '.join(SWEEP_AXES)}")


def _metric(report: SyncReport, axis: str, metric: str) -> Optional[float]:
    # Along t both metrics are the recovery cost of the run.
    if axis == 't':
        value = getattr(report.recovery, metric) if report.recovery is not None else None
    else:
        value = getattr(report, metric)
    return None if value is None else float(value)


def _fit_points(axis: str, points: list) -> dict:
    fits = {}
    for metric in ('communication', 'latency'):
        measured = [(p.value, _metric(p.report, axis, metric)) for p in points if p.report is not None]
        measured = [(x, y) for x, y in measured if y is not None]
        xs = [x for x, _ in measured]
        if len(set(xs)) < 2:
            continue
        ys = [y for _, y in measured]
        fits[metric] = fit_both(xs, ys)
        logger.debug(f"{metric} over {axis}: {fits[metric]}")
    return fits


async def run_sweep_async(base: ScenarioConfig, axis: str, values, workers: Optional[int] = None,
                          adversary_template: str = '') -> SweepTable:
    """
    Runs one scenario per axis value, at most ``workers`` at a time.

    A failing point records its error instead of aborting the sweep. Points
    come back ordered by axis value whatever order they finish in.

    Args:
        base (ScenarioConfig): Settings shared by every point.
        axis (str): n, t or seed.
        values: Axis values.
        workers (int): Concurrent points; defaults to VIEWSYNC_WORKERS or 1.
        adversary_template (str): Required for t sweeps.

    Returns:
        SweepTable: Points and the growth fits of communication and latency.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis '{axis}', expected one of {', '.join(SWEEP_AXES)}")
    workers = workers or env_int('VIEWSYNC_WORKERS', 1)
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")
    limit = asyncio.Semaphore(workers)

    async def run_point(value: int) -> SweepPoint:
        async with limit:
            try:
                config = point_config(base, axis, value, adversary_template)
                report = await asyncio.to_thread(run_scenario, config)
                return SweepPoint(value, report=report)
            except ViewSyncError as e:
                logger.warning(f"Sweep point {axis}={value} failed: {e}")
                return SweepPoint(value, error=str(e))
            except Exception as e:
                logger.exception(f"Sweep point {axis}={value} crashed")
                return SweepPoint(value, error=f"{type(e).__name__}: {e}")

    points = await asyncio.gather(*(run_point(value) for value in sorted(set(values))))
    logger.info(f"Sweep over {axis} finished: {sum(p.error is None for p in points)}/{len(points)} points ran")
    return SweepTable(axis, tuple(points), _fit_points(axis, list(points)))


def run_sweep(base: ScenarioConfig, axis: str, values, workers: Optional[int] = None,
              adversary_template: str = '') -> SweepTable:
    """Blocking wrapper of run_sweep_async."""
    return asyncio.run(run_sweep_async(base, axis, values, workers, adversary_template))


def estimate_x(n: int, f: int, trials: int, seed: int = 0) -> LeaderRunEstimate:
    """
    Raises:
        ConfigError: On n < 3f+1, non-positive trials or negative f.
    """
    if f < 0 or n < 3 * f + 1:
        raise ConfigError(f"need n >= 3f+1 with f >= 0, got n={n} f={f}")
    if trials < 1:
        raise ConfigError(f"trials must be positive, got {trials}")
    return estimate_consecutive_byzantine_leaders(n, f, trials, seed)
