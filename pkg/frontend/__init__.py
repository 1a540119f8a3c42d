# frontend/__init__.py
"""
Command-line and rendering frontend
"""

from .cli_app import AmputeCliApp
from .commands import CommandHandlers
from .heatmap import render_heatmap

__all__ = ['AmputeCliApp', 'CommandHandlers', 'render_heatmap']
