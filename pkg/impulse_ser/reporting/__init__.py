"""CSV and fit-report output."""

from .writer import ReportWriter

__all__ = ["ReportWriter"]
