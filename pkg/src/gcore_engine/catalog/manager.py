"""Catalog of named graphs and graph views"""

import logging
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Union

import yaml

from ..core.context import EvalSettings
from ..graph.model import PathPropertyGraph
from ..parsers import ast
from ..parsers.renderer import render_query
from ..parsers.transformer import iter_nodes, parse_query
from ..utils.errors import (
    CatalogError,
    DuplicateNameError,
    GCoreError,
    UnknownGraphError,
    ViewCycleError,
)
from .storage import load_graph_file, save_graph_file
from .tables import import_table

logger = logging.getLogger(__name__)

CATALOG_FILE = "catalog.yaml"
VIEW_SUFFIX = ".gcore"


def view_dependencies(query: ast.Query) -> Set[str]:
    """Graph names a query refers to, minus the ones it defines locally"""
    local = {h.name for h in iter_nodes(query) if isinstance(h, (ast.GraphClause, ast.PathClause))}
    return {n.name for n in iter_nodes(query) if isinstance(n, ast.GraphRef)} - local


class CatalogManager:
    """Named graphs and lazily evaluated views (the gr function)

    With a directory the catalog is persistent: ``graphs/<name>.json``,
    ``views/<name>.gcore`` and ``catalog.yaml`` for the default graph.
    """

    def __init__(
        self,
        directory: Optional[Union[str, Path]] = None,
        settings: Optional[EvalSettings] = None,
    ):
        self.directory = Path(directory) if directory is not None else None
        self.settings = settings or EvalSettings()
        self.graphs: Dict[str, PathPropertyGraph] = {}
        self.views: Dict[str, ast.Query] = {}
        self.view_texts: Dict[str, str] = {}
        self.default_name: Optional[str] = None
        self._materialized: Dict[str, PathPropertyGraph] = {}
        self._resolving: List[str] = []
        self._lock = threading.RLock()
        if self.directory is not None:
            self._load_catalog()

    # -- persistence -----------------------------------------------------------

    def _load_catalog(self) -> None:
        """Load catalog state from the directory"""
        meta_file = self.directory / CATALOG_FILE
        if meta_file.exists():
            try:
                meta = yaml.safe_load(meta_file.read_text(encoding="utf-8")) or {}
                self.default_name = meta.get("default_graph")
            except yaml.YAMLError as e:
                logger.warning(f"Could not read {meta_file}: {e}")
        for path in sorted((self.directory / "graphs").glob("*.json")):
            try:
                self.graphs[path.stem] = load_graph_file(path)
            except GCoreError as e:
                logger.warning(f"Skipping graph {path.stem}: {e}")
        for path in sorted((self.directory / "views").glob(f"*{VIEW_SUFFIX}")):
            try:
                text = path.read_text(encoding="utf-8")
                self.views[path.stem] = parse_query(text)
                self.view_texts[path.stem] = text
            except (GCoreError, OSError) as e:
                logger.warning(f"Skipping view {path.stem}: {e}")

    def _save_meta(self) -> None:
        if self.directory is None:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "default_graph": self.default_name,
            "graphs": sorted(self.graphs),
            "views": sorted(self.views),
        }
        with open(self.directory / CATALOG_FILE, "w") as f:
            yaml.dump(meta, f, default_flow_style=False)

    def _graph_file(self, name: str) -> Optional[Path]:
        return self.directory / "graphs" / f"{name}.json" if self.directory else None

    # -- registration ----------------------------------------------------------

    def add_graph(self, name: str, graph: PathPropertyGraph, persist: bool = True) -> PathPropertyGraph:
        with self._lock:
            if name in self.views:
                raise DuplicateNameError(f"'{name}' is already a graph view")
            if name in self.graphs:
                logger.info(f"Replacing graph {name}")
            self.graphs[name] = graph
            self._materialized.clear()
            target = self._graph_file(name)
            if persist and target is not None:
                save_graph_file(graph, target)
                self._save_meta()
        logger.info(f"Registered graph {name}: {graph.summary()}")
        return graph

    def load_graph(self, name: str, path: Union[str, Path], persist: bool = True) -> PathPropertyGraph:
        return self.add_graph(name, load_graph_file(path), persist)

    def import_table(
        self,
        name: str,
        path: Union[str, Path],
        label: Optional[str] = None,
        column_types: Optional[Dict[str, str]] = None,
        persist: bool = True,
    ) -> PathPropertyGraph:
        return self.add_graph(name, import_table(path, name, label, column_types), persist)

    def save_graph(self, name: str, dest: Union[str, Path]) -> Path:
        return save_graph_file(self.resolve(name), dest)

    def register_view(self, name: str, query: Union[str, ast.Query], replace: bool = False) -> None:
        """Store a view definition after checking names and dependency cycles"""
        text = query if isinstance(query, str) else render_query(query)
        parsed = parse_query(text)
        with self._lock:
            if name in self.graphs:
                raise DuplicateNameError(f"'{name}' is already a graph")
            if name in self.views and not replace:
                if self.view_texts.get(name, "").strip() == text.strip():
                    return
                raise DuplicateNameError(f"graph view '{name}' already exists")
            self._check_cycles(name, parsed)
            self.views[name] = parsed
            self.view_texts[name] = text
            self._materialized.clear()
            if self.directory is not None:
                view_dir = self.directory / "views"
                view_dir.mkdir(parents=True, exist_ok=True)
                (view_dir / f"{name}{VIEW_SUFFIX}").write_text(text.strip() + "\n", encoding="utf-8")
                self._save_meta()
        logger.info(f"Registered graph view {name}")

    def _check_cycles(self, name: str, query: ast.Query) -> None:
        """Depth-first search over view dependencies, with the new definition in place"""
        definitions = dict(self.views)
        definitions[name] = query
        visiting: List[str] = []
        done: Set[str] = set()

        def visit(current: str) -> None:
            if current in visiting:
                cycle = visiting[visiting.index(current):] + [current]
                raise ViewCycleError(f"graph views form a cycle: {' -> '.join(cycle)}")
            if current in done or current not in definitions:
                return
            visiting.append(current)
            for dependency in sorted(view_dependencies(definitions[current])):
                visit(dependency)
            visiting.pop()
            done.add(current)

        visit(name)

    def set_default(self, name: str, persist: bool = True) -> None:
        if not self.has(name):
            raise UnknownGraphError(f"unknown graph '{name}'")
        with self._lock:
            self.default_name = name
            if persist:
                self._save_meta()
        logger.info(f"Default graph is now {name}")

    # -- lookup ----------------------------------------------------------------

    def has(self, name: str) -> bool:
        return name in self.graphs or name in self.views

    def resolve(self, name: str) -> PathPropertyGraph:
        """A stored graph, or the current value of a view"""
        if name in self.graphs:
            return self.graphs[name]
        if name not in self.views:
            raise UnknownGraphError(f"unknown graph '{name}'")
        if name in self._materialized:
            return self._materialized[name]
        if name in self._resolving:
            raise ViewCycleError(f"graph view {name} depends on itself")

        from ..core.engine import QueryEngine

        self._resolving.append(name)
        try:
            graph = QueryEngine(self, self.settings).evaluate(
                self.views[name], seed=f"{self.settings.seed}:{name}"
            )
        finally:
            self._resolving.pop()
        if self.settings.memoize_views:
            self._materialized[name] = graph
        logger.debug(f"Resolved view {name}: {graph.summary()}")
        return graph

    def default_graph(self) -> PathPropertyGraph:
        if self.default_name is not None:
            return self.resolve(self.default_name)
        # names starting with an underscore are session scratch graphs such as _last
        candidates = [n for n in self.graphs if not n.startswith("_")]
        if len(candidates) == 1:
            return self.graphs[candidates[0]]
        raise UnknownGraphError("no default graph: set one or use ON")

    def list_entries(self) -> List[Dict[str, Any]]:
        entries: List[Dict[str, Any]] = []
        for name in sorted(self.graphs):
            entries.append(
                {"name": name, "kind": "graph", "default": name == self.default_name, **self.graphs[name].summary()}
            )
        for name in sorted(self.views):
            entries.append(
                {"name": name, "kind": "view", "default": name == self.default_name, "definition": self.view_texts[name]}
            )
        return entries

    def names(self) -> List[str]:
        return sorted(set(self.graphs) | set(self.views))


def open_catalog(directory: Optional[Union[str, Path]], settings: Optional[EvalSettings] = None) -> CatalogManager:
    try:
        return CatalogManager(directory, settings)
    except OSError as e:
        raise CatalogError(f"cannot open catalog {directory}: {e}") from e
