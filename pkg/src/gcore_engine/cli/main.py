"""Main CLI application entry point"""

import json
from pathlib import Path
from typing import Dict, List, NoReturn, Optional, Tuple

import typer
from rich.console import Console
from rich.table import Table

from ..catalog.manager import CatalogManager
from ..core.context import EvalSettings
from ..core.engine import QueryEngine
from ..core.exporter import FORMATS, export_graph
from ..parsers.renderer import render_query
from ..parsers.transformer import parse_query
from ..utils.config import ConfigManager
from ..utils.errors import GCoreError, ParseError, StaticAnalysisError
from ..utils.logging import setup_logging

console = Console()
err_console = Console(stderr=True)
app = typer.Typer(
    name="gcore",
    help="G-CORE engine - composable graph queries over Path Property Graphs",
    rich_markup_mode="rich",
)

catalog_app = typer.Typer(name="catalog", help="Named graphs and graph views")
app.add_typer(catalog_app, name="catalog")

EXIT_PARSE = 1
EXIT_RUNTIME = 2


def _pairs(values: Optional[List[str]], option: str) -> List[Tuple[str, str]]:
    """Split NAME=VALUE option values"""
    pairs = []
    for value in values or []:
        name, sep, rest = value.partition("=")
        if not sep or not name or not rest:
            err_console.print(f"❌ {option} expects NAME=VALUE, got [bold]{value}[/bold]")
            raise typer.Exit(EXIT_RUNTIME)
        pairs.append((name.strip(), rest.strip()))
    return pairs


def _fail(error: Exception) -> NoReturn:
    """Report an error on stderr and exit with the matching code"""
    if isinstance(error, (ParseError, StaticAnalysisError)):
        err_console.print(f"❌ Query error: {error}")
        raise typer.Exit(EXIT_PARSE)
    err_console.print(f"❌ Error: {error}")
    raise typer.Exit(EXIT_RUNTIME)


def _settings(config: ConfigManager, seed: Optional[int], memoize_views: bool) -> EvalSettings:
    return EvalSettings(
        seed=seed if seed is not None else config.seed(),
        k_shortest_cap=config.k_shortest_cap(),
        memoize_views=memoize_views or config.memoize_views(),
    )


def open_session(
    catalog_dir: Optional[str],
    graphs: Optional[List[str]],
    tables: Optional[List[str]],
    default: Optional[str],
    seed: Optional[int],
    memoize_views: bool,
    log_level: Optional[str],
) -> Tuple[CatalogManager, QueryEngine]:
    """Catalog and engine from flags, environment and the config file"""
    config = ConfigManager()
    setup_logging(log_level or config.get("settings.log_level"))
    settings = _settings(config, seed, memoize_views)

    directory = catalog_dir or config.catalog_directory()
    if catalog_dir is None and not Path(directory).is_dir():
        directory = None
    catalog = CatalogManager(directory, settings)
    for name, path in _pairs(graphs, "--graph"):
        catalog.load_graph(name, path, persist=False)
    for name, path in _pairs(tables, "--table"):
        catalog.import_table(name, path, persist=False)

    default = default or config.get("catalog.default_graph")
    if default:
        catalog.set_default(default, persist=False)
    return catalog, QueryEngine(catalog, settings)


@app.command()
def init(project_name: str = typer.Argument(..., help="Name of the project")):
    """Initialize a new G-CORE project"""
    console.print(f"🚀 Initializing new project: [bold cyan]{project_name}[/bold cyan]")

    config_manager = ConfigManager()
    config_manager.init_project(project_name)
    Path(config_manager.catalog_directory()).mkdir(parents=True, exist_ok=True)

    console.print("✅ Project initialized successfully!")
    console.print(f"📝 Configuration saved to: [dim]{config_manager.config_file}[/dim]")
    console.print("\n📖 Next steps:")
    console.print("1. Load a graph: [cyan]gcore catalog load social_graph graph.json[/cyan]")
    console.print("2. Run a query: [cyan]gcore run query.gcore[/cyan]")


@app.command()
def run(
    query_file: Path = typer.Argument(..., help="File holding one G-CORE query"),
    catalog_dir: Optional[str] = typer.Option(None, "--catalog", help="Catalog directory"),
    graph: Optional[List[str]] = typer.Option(None, "--graph", help="Load a graph file: NAME=FILE"),
    table: Optional[List[str]] = typer.Option(None, "--table", help="Import a CSV table: NAME=CSV"),
    default: Optional[str] = typer.Option(None, "--default", help="Default graph name"),
    output_format: str = typer.Option("json", "--format", help="Output format (json, dot, table)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the result graph to a file"),
    bindings: bool = typer.Option(False, "--bindings", help="Print the final MATCH bindings"),
    explain: bool = typer.Option(False, "--explain", help="Print the parsed query"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for generated identifiers"),
    memoize_views: bool = typer.Option(False, "--memoize-views", help="Cache graph view results"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Log level"),
):
    """Evaluate a query file and export the result graph"""
    if output_format not in FORMATS:
        err_console.print(f"❌ Unknown format {output_format}; use one of {', '.join(FORMATS)}")
        raise typer.Exit(EXIT_RUNTIME)
    try:
        text = query_file.read_text(encoding="utf-8")
    except OSError as e:
        _fail(e)

    try:
        catalog, engine = open_session(
            catalog_dir, graph, table, default, seed, memoize_views, log_level
        )
        if explain:
            query = parse_query(text)
            if output_format == "json":
                err_console.print_json(json.dumps(query.model_dump(mode="json")))
            else:
                err_console.print(render_query(query), markup=False, highlight=False)
        result = engine.execute(text)
        rendered = export_graph(result.graph, output_format)
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(rendered, encoding="utf-8")
            err_console.print(f"💾 Result written to: [dim]{out}[/dim]")
        else:
            typer.echo(rendered, nl=False)
    except (GCoreError, OSError) as e:
        _fail(e)

    if bindings:
        if result.bindings is None:
            err_console.print("📭 Query has no MATCH clause")
        else:
            err_console.print(result.bindings.to_table(), markup=False, highlight=False)
    summary = result.graph.summary()
    err_console.print(
        f"✅ {summary['nodes']} nodes, {summary['edges']} edges, {summary['paths']} paths "
        f"in {result.execution_time:.3f}s"
    )
    for name in result.views:
        err_console.print(f"📌 Registered graph view: [cyan]{name}[/cyan]")


@app.command()
def repl(
    catalog_dir: Optional[str] = typer.Option(None, "--catalog", help="Catalog directory"),
    graph: Optional[List[str]] = typer.Option(None, "--graph", help="Load a graph file: NAME=FILE"),
    table: Optional[List[str]] = typer.Option(None, "--table", help="Import a CSV table: NAME=CSV"),
    default: Optional[str] = typer.Option(None, "--default", help="Default graph name"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for generated identifiers"),
    memoize_views: bool = typer.Option(False, "--memoize-views", help="Cache graph view results"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Log level"),
):
    """Interactive query session"""
    from .repl import QueryRepl

    try:
        catalog, engine = open_session(
            catalog_dir, graph, table, default, seed, memoize_views, log_level
        )
    except (GCoreError, OSError) as e:
        _fail(e)
    QueryRepl(catalog, engine, console).loop()


def _catalog(catalog_dir: Optional[str]) -> CatalogManager:
    config = ConfigManager()
    setup_logging(config.get("settings.log_level"))
    directory = catalog_dir or config.catalog_directory()
    return CatalogManager(directory, _settings(config, None, False))


@catalog_app.command("load")
def catalog_load(
    name: str = typer.Argument(..., help="Graph name"),
    path: Path = typer.Argument(..., help="Graph JSON file"),
    catalog_dir: Optional[str] = typer.Option(None, "--catalog", help="Catalog directory"),
):
    """Add a graph file to the catalog"""
    console.print(f"📥 Loading graph: [bold cyan]{name}[/bold cyan]")
    try:
        graph = _catalog(catalog_dir).load_graph(name, path)
    except (GCoreError, OSError) as e:
        _fail(e)
    summary = graph.summary()
    console.print(
        f"✅ Loaded {summary['nodes']} nodes, {summary['edges']} edges, {summary['paths']} paths"
    )


@catalog_app.command("import")
def catalog_import(
    name: str = typer.Argument(..., help="Graph name"),
    path: Path = typer.Argument(..., help="CSV file with a header row"),
    label: Optional[str] = typer.Option(None, "--label", help="Node label (defaults to NAME)"),
    column_type: Optional[List[str]] = typer.Option(
        None, "--column-type", help="Column conversion: COLUMN=int|float|bool|str"
    ),
    catalog_dir: Optional[str] = typer.Option(None, "--catalog", help="Catalog directory"),
):
    """Import a CSV table as a graph of isolated nodes"""
    console.print(f"📥 Importing table: [bold cyan]{name}[/bold cyan]")
    column_types: Dict[str, str] = dict(_pairs(column_type, "--column-type"))
    try:
        graph = _catalog(catalog_dir).import_table(name, path, label, column_types)
    except (GCoreError, OSError) as e:
        _fail(e)
    console.print(f"✅ Imported {len(graph.nodes)} rows")


@catalog_app.command("list")
def catalog_list(
    catalog_dir: Optional[str] = typer.Option(None, "--catalog", help="Catalog directory"),
):
    """List graphs and graph views"""
    entries = _catalog(catalog_dir).list_entries()
    if not entries:
        console.print("📭 Catalog is empty")
        return

    table = Table(title="Catalog")
    table.add_column("Name", style="cyan")
    table.add_column("Kind", style="magenta")
    table.add_column("Nodes", style="green")
    table.add_column("Edges", style="green")
    table.add_column("Paths", style="green")
    table.add_column("Default", style="yellow")
    for entry in entries:
        is_view = entry["kind"] == "view"
        table.add_row(
            entry["name"],
            entry["kind"],
            "-" if is_view else str(entry["nodes"]),
            "-" if is_view else str(entry["edges"]),
            "-" if is_view else str(entry["paths"]),
            "⭐" if entry["default"] else "",
        )
    console.print(table)


@catalog_app.command("view")
def catalog_view(
    name: str = typer.Argument(..., help="View name"),
    query_file: Path = typer.Argument(..., help="File holding the view query"),
    replace: bool = typer.Option(False, "--replace", help="Overwrite an existing view"),
    catalog_dir: Optional[str] = typer.Option(None, "--catalog", help="Catalog directory"),
):
    """Register a graph view"""
    console.print(f"📝 Registering graph view: [bold cyan]{name}[/bold cyan]")
    try:
        _catalog(catalog_dir).register_view(name, query_file.read_text(encoding="utf-8"), replace)
    except (GCoreError, OSError) as e:
        _fail(e)
    console.print("✅ View registered")


@catalog_app.command("default")
def catalog_default(
    name: str = typer.Argument(..., help="Graph or view name"),
    catalog_dir: Optional[str] = typer.Option(None, "--catalog", help="Catalog directory"),
):
    """Set the default graph"""
    try:
        _catalog(catalog_dir).set_default(name)
    except (GCoreError, OSError) as e:
        _fail(e)
    console.print(f"⭐ Default graph: [bold cyan]{name}[/bold cyan]")


if __name__ == "__main__":
    app()
