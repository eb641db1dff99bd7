from .logger import get_implementation_logger, setup_logger
from .report_writer import ReportWriter, emit_plot_data

__all__ = [
    'ReportWriter',
    'emit_plot_data',
    'get_implementation_logger',
    'setup_logger',
]
