from .report_processor import ReportProcessor, emit_report

__all__ = ["ReportProcessor", "emit_report"]
