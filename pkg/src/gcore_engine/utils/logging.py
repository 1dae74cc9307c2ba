"""Log setup for the command line tools"""

import logging
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler


def setup_logging(level: Optional[str] = "WARNING") -> None:
    """Route the root logger through rich on stderr so stdout only carries results"""
    resolved = logging.getLevelName((level or "WARNING").upper())
    if not isinstance(resolved, int):
        resolved = logging.WARNING
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(resolved)
