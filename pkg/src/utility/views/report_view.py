# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from src.utility.helpers import env_int, format_table, format_time


class ReportView:
    """
    Paged text rendering of a SyncReport: a summary block followed by the
    detected synchronizations, ``rows_per_page`` per page.

    Attributes:
        report (SyncReport): The report being shown.
        rows (list): One row of cell strings per synchronization.
        rows_per_page (int): Rows on each page.
        current_page (int): Currently displayed page number (0-based).
    """
    HEADER = ("k", "view", "t1", "t2", "length")

    def __init__(self, report, rows_per_page=None):
        self.report = report
        self.rows_per_page = rows_per_page or env_int('VIEWSYNC_PAGE_SIZE', 20)
        self.current_page = 0
        self.rows = [(str(iv.k), str(iv.view), format_time(iv.t1), format_time(iv.t2), format_time(iv.length))
                     for iv in report.intervals]

    def total_pages(self):
        """Number of pages, never less than one."""
        return max(1, (len(self.rows) - 1) // self.rows_per_page + 1)

    def next_page(self):
        if self.current_page < self.total_pages() - 1:
            self.current_page += 1
            return True
        return False

    def summary(self):
        report = self.report
        config = report.config
        lines = [
            f"{config.synchronizer}: n={config.n} f={config.f} delta={format_time(config.delta)} "
            f"gst={format_time(config.gst)} seed={config.seed} adversary={config.adversary}",
            f"synchronizations: {len(report.intervals)}",
            f"latency: {format_time(report.latency)}",
            f"communication: {format_time(report.communication)}",
            f"honest messages: {report.honest_messages}",
            f"validity: {'pass' if report.validity_passed else 'violation: ' + str(report.validity_violation)}",
            f"integrity: {'pass' if not report.integrity_violations else len(report.integrity_violations)}",
        ]
        for claim in report.claims:
            lines.append(f"{claim.name}: {claim.checked} checked, {claim.violations} violated")
        return "\n".join(lines)

    def render_page(self):
        start = self.current_page * self.rows_per_page
        page_rows = self.rows[start:start + self.rows_per_page]
        if not page_rows:
            return f"{self.summary()}\n\nNo synchronization was detected."
        return (f"{self.summary()}\n\nSynchronizations (page {self.current_page + 1}/{self.total_pages()})\n"
                f"{format_table(self.HEADER, page_rows)}")
