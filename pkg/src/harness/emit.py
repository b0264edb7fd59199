# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Optional

from src.core.errors import EmitError
from src.harness.report import SUMMARY_COLUMNS, SweepTable, SyncReport

logger = logging.getLogger('emit')

FORMATS = ('csv', 'jsonl')
SWEEP_COLUMNS = ('axis', 'value', 'status', 'error') + SUMMARY_COLUMNS


def infer_format(path) -> str:
    """jsonl for .jsonl/.json destinations, csv otherwise."""
    return 'jsonl' if Path(path).suffix.lower() in ('.jsonl', '.json') else 'csv'


def sweep_rows(table: SweepTable) -> list:
    rows = []
    for point in table.points:
        row = dict.fromkeys(SWEEP_COLUMNS, '')
        row.update(axis=table.axis, value=str(point.value))
        if point.report is not None:
            row.update(point.report.summary_row(), status='ok')
        else:
            row.update(status='error', error=point.error or '')
        rows.append(row)
    return rows


def _csv_text(columns, rows) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _jsonl_text(records) -> str:
    return ''.join(json.dumps(record, sort_keys=True) + '\n' for record in records)


def render(result, fmt: str) -> str:
    """
    Serializes a SyncReport or SweepTable.

    CSV holds one summary row per report (a header alone for an empty
    sweep). JSONL holds one JSON object per report, keys sorted.

    Raises:
        EmitError: On an unknown format or result type.
    """
    if fmt not in FORMATS:
        raise EmitError('-', f"unknown format '{fmt}', expected one of {', '.join(FORMATS)}")
    if isinstance(result, SyncReport):
        if fmt == 'csv':
            return _csv_text(SUMMARY_COLUMNS, [result.summary_row()])
        return _jsonl_text([result.to_dict()])
    if isinstance(result, SweepTable):
        if fmt == 'csv':
            return _csv_text(SWEEP_COLUMNS, sweep_rows(result))
        return _jsonl_text({'axis': result.axis, 'value': p.value, 'error': p.error,
                            'report': p.report.to_dict() if p.report is not None else None}
                           for p in result.points)
    raise EmitError('-', f"cannot emit {type(result).__name__}")


def emit(result, path, fmt: Optional[str] = None) -> Path:
    """
    Writes a report or sweep table to ``path``.

    Args:
        result: SyncReport or SweepTable.
        path: Destination file.
        fmt (str): csv or jsonl; inferred from the suffix when omitted.

    Returns:
        Path: The written file.

    Raises:
        EmitError: If the destination cannot be written.
    """
    path = Path(path)
    text = render(result, fmt or infer_format(path))
    try:
        path.write_text(text, encoding='utf-8', newline='')
    except OSError as e:
        raise EmitError(path, e.strerror or str(e))
    logger.info(f"Wrote {path}")
    return path
