# backend/__init__.py
"""
Copula-driven amputation backend
"""

from .amputation_core import AmputationCore
from .copulas import CopulaSpec
from .data_loader import DataLoader
from .errors import AmputationError
from .report_generator import ReportGenerator

__all__ = ['AmputationCore', 'CopulaSpec', 'DataLoader', 'AmputationError', 'ReportGenerator']
