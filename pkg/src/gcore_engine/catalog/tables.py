"""Tables as graphs of isolated nodes"""

import csv
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

from ..graph.model import GraphBuilder, PathPropertyGraph, node_id
from ..utils.errors import TableImportError

logger = logging.getLogger(__name__)


def _to_bool(cell: str) -> bool:
    lowered = cell.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {cell!r}")


COLUMN_TYPES: Dict[str, Callable[[str], Any]] = {
    "str": str,
    "int": int,
    "float": float,
    "bool": _to_bool,
}


def import_table(
    path: Union[str, Path],
    name: str,
    label: Optional[str] = None,
    column_types: Optional[Dict[str, str]] = None,
    delimiter: str = ",",
) -> PathPropertyGraph:
    """One node per data row; columns become properties, empty cells are absent

    Node ids are ``name:row`` with rows counted from 0. Cells stay strings
    unless ``column_types`` maps their column to int, float or bool.
    """
    path = Path(path)
    label = label or name
    column_types = column_types or {}
    for column, type_name in column_types.items():
        if type_name not in COLUMN_TYPES:
            raise TableImportError(f"unknown column type {type_name} for column {column}")

    try:
        with path.open(newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle, delimiter=delimiter)
            header = next(reader, None)
            if header is None:
                raise TableImportError(f"{path} is empty: a header row is required")
            header = [h.strip() for h in header]
            unknown = set(column_types) - set(header)
            if unknown:
                raise TableImportError(f"typed columns not in header: {', '.join(sorted(unknown))}")

            builder = GraphBuilder()
            index = -1
            for index, cells in enumerate(reader):
                line = reader.line_num
                if len(cells) != len(header):
                    raise TableImportError(
                        f"{path}, line {line}: expected {len(header)} cells, found {len(cells)}"
                    )
                properties: Dict[str, Any] = {}
                for column, cell in zip(header, cells):
                    if cell == "":
                        continue
                    convert = COLUMN_TYPES[column_types.get(column, "str")]
                    try:
                        properties[column] = [convert(cell)]
                    except ValueError as e:
                        raise TableImportError(f"{path}, line {line}, column {column}: {e}") from e
                builder.add_node(node_id(f"{name}:{index}"), [label], properties)
    except OSError as e:
        raise TableImportError(f"cannot read {path}: {e}") from e
    except csv.Error as e:
        raise TableImportError(f"{path}: {e}") from e

    graph = builder.build()
    logger.info(f"Imported table {name} from {path}: {index + 1} rows")
    return graph
