# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from src.harness.fitting import preferred_order
from src.utility.helpers import env_int, format_table, format_time


class SweepView:
    """
    Paged text table of a sweep, one row per axis value, followed by the
    growth fits of communication and latency along the axis.

    Attributes:
        table (SweepTable): The sweep being shown.
        rows_per_page (int): Points on each page.
        current_page (int): Currently displayed page number (0-based).
    """
    HEADER = ("value", "n", "f", "adversary", "syncs", "latency", "communication", "recovery latency",
              "recovery communication", "validity", "error")

    def __init__(self, table, rows_per_page=None):
        self.table = table
        self.rows_per_page = rows_per_page or env_int('VIEWSYNC_PAGE_SIZE', 20)
        self.current_page = 0
        self.rows = []
        for point in table.points:
            report = point.report
            if report is None:
                self.rows.append((str(point.value), "", "", "", "", "", "", "", "", "", point.error or ""))
                continue
            recovery = report.recovery
            self.rows.append((str(point.value), str(report.config.n), str(report.config.f), report.config.adversary,
                              str(len(report.intervals)), format_time(report.latency),
                              format_time(report.communication),
                              format_time(recovery.latency if recovery else None),
                              str(recovery.communication) if recovery else "none",
                              "pass" if report.validity_passed else "violation", ""))

    def total_pages(self):
        """Number of pages, never less than one."""
        return max(1, (len(self.rows) - 1) // self.rows_per_page + 1)

    def next_page(self):
        if self.current_page < self.total_pages() - 1:
            self.current_page += 1
            return True
        return False

    def fit_lines(self):
        lines = []
        for metric, fits in self.table.fits.items():
            best = preferred_order(fits)
            described = ", ".join(f"{order} R^2={fit.r2:.4f}" for order, fit in fits.items())
            lines.append(f"{metric} vs {self.table.axis}: {described} -> {best}")
        return lines

    def render_page(self):
        start = self.current_page * self.rows_per_page
        page_rows = self.rows[start:start + self.rows_per_page]
        if not page_rows:
            return f"Sweep over {self.table.axis}: no points."
        text = (f"Sweep over {self.table.axis} (page {self.current_page + 1}/{self.total_pages()})\n"
                f"{format_table(self.HEADER, page_rows)}")
        if self.current_page == self.total_pages() - 1 and self.table.fits:
            text += "\n\n" + "\n".join(self.fit_lines())
        return text
