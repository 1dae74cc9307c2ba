"""Interactive query session"""

import logging
import shlex
from typing import Callable, List, Optional

from rich.console import Console

from ..catalog.manager import CatalogManager
from ..core.engine import QueryEngine
from ..utils.errors import GCoreError

logger = logging.getLogger(__name__)

LAST = "_last"

HELP = """Commands:
  \\load NAME FILE          load a graph file
  \\import NAME CSV [LABEL] import a CSV table
  \\graphs                  list graphs and views
  \\default NAME            set the default graph
  \\view NAME               the next query (ending in ;) becomes a graph view
  \\help                    this text
  \\quit                    leave the session
Queries may span lines and end with ';'. Each result is available as _last."""


class QueryRepl:
    """Read queries and backslash commands until \\quit or end of input"""

    def __init__(
        self,
        catalog: CatalogManager,
        engine: QueryEngine,
        console: Optional[Console] = None,
        read_line: Optional[Callable[[str], str]] = None,
    ):
        self.catalog = catalog
        self.engine = engine
        self.console = console or Console()
        self.read_line = read_line or self.console.input
        self.buffer: List[str] = []
        self.pending_view: Optional[str] = None
        self.running = True

    def loop(self) -> None:
        self.console.print("🔷 G-CORE session. Type [cyan]\\help[/cyan] for commands.")
        while self.running:
            prompt = "gcore> " if not self.buffer else "  ...> "
            try:
                line = self.read_line(prompt)
            except (EOFError, KeyboardInterrupt):
                break
            self.feed(line)
        self.console.print("👋 Bye")

    def feed(self, line: str) -> None:
        """Handle one input line"""
        stripped = line.strip()
        if not self.buffer and stripped.startswith("\\"):
            self._command(stripped)
            return
        if not stripped and not self.buffer:
            return
        self.buffer.append(line)
        if stripped.endswith(";"):
            text = "\n".join(self.buffer).rstrip().rstrip(";")
            self.buffer = []
            if self.pending_view is not None:
                name, self.pending_view = self.pending_view, None
                self._register_view(name, text)
            else:
                self._query(text)

    # -- commands --------------------------------------------------------------

    def _command(self, line: str) -> None:
        try:
            parts = shlex.split(line[1:])
        except ValueError as e:
            self.console.print(f"❌ {e}")
            return
        if not parts:
            return
        command, args = parts[0], parts[1:]
        handler = {
            "load": self._load,
            "import": self._import,
            "graphs": self._graphs,
            "default": self._default,
            "view": self._view,
            "help": lambda _: self.console.print(HELP, markup=False, highlight=False),
            "quit": self._quit,
            "q": self._quit,
        }.get(command)
        if handler is None:
            self.console.print(f"❌ Unknown command \\{command}; try \\help", markup=False)
            return
        try:
            handler(args)
        except (GCoreError, OSError) as e:
            self.console.print(f"❌ {e}", markup=False)

    def _expect(self, args: List[str], count: int, usage: str) -> bool:
        if len(args) < count:
            self.console.print(f"❌ Usage: {usage}", markup=False)
            return False
        return True

    def _load(self, args: List[str]) -> None:
        if self._expect(args, 2, "\\load NAME FILE"):
            graph = self.catalog.load_graph(args[0], args[1], persist=False)
            self.console.print(f"✅ {args[0]}: {self._counts(graph.summary())}")

    def _import(self, args: List[str]) -> None:
        if self._expect(args, 2, "\\import NAME CSV [LABEL]"):
            label = args[2] if len(args) > 2 else None
            graph = self.catalog.import_table(args[0], args[1], label, persist=False)
            self.console.print(f"✅ {args[0]}: {len(graph.nodes)} rows")

    def _graphs(self, args: List[str]) -> None:
        entries = self.catalog.list_entries()
        if not entries:
            self.console.print("📭 No graphs loaded")
        for entry in entries:
            marker = " ⭐" if entry["default"] else ""
            if entry["kind"] == "view":
                self.console.print(f"  {entry['name']} (view){marker}")
            else:
                self.console.print(f"  {entry['name']}: {self._counts(entry)}{marker}")

    def _default(self, args: List[str]) -> None:
        if self._expect(args, 1, "\\default NAME"):
            self.catalog.set_default(args[0], persist=False)
            self.console.print(f"⭐ Default graph: {args[0]}")

    def _view(self, args: List[str]) -> None:
        if self._expect(args, 1, "\\view NAME"):
            self.pending_view = args[0]
            self.console.print(f"📝 Enter the definition of {args[0]}, ending with ';'")

    def _quit(self, args: List[str]) -> None:
        self.running = False

    # -- queries ---------------------------------------------------------------

    @staticmethod
    def _counts(summary: dict) -> str:
        return f"{summary['nodes']} nodes, {summary['edges']} edges, {summary['paths']} paths"

    def _register_view(self, name: str, text: str) -> None:
        try:
            self.catalog.register_view(name, text, replace=True)
        except (GCoreError, OSError) as e:
            self.console.print(f"❌ {e}", markup=False)
            return
        self.console.print(f"📌 Registered graph view {name}")

    def _query(self, text: str) -> None:
        try:
            result = self.engine.execute(text)
            self.catalog.add_graph(LAST, result.graph, persist=False)
        except (GCoreError, OSError) as e:
            self.console.print(f"❌ {e}", markup=False)
            return
        self.console.print(
            f"✅ {self._counts(result.graph.summary())} "
            f"({result.execution_time:.3f}s, stored as {LAST})"
        )
        for name in result.views:
            self.console.print(f"📌 Registered graph view {name}")
