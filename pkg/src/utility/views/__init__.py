# package src.utility.views

from .report_view import ReportView
from .sweep_view import SweepView

__all__ = ["ReportView", "SweepView"]
