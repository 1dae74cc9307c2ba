"""Query parsing, static analysis and rendering"""

from .renderer import render_query
from .transformer import parse_query

__all__ = ["parse_query", "render_query"]
