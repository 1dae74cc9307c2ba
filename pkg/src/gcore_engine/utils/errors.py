"""Exception hierarchy for the G-CORE engine"""

from typing import List, Optional


class GCoreError(ValueError):
    """Base class for every error raised by the engine"""


class GraphValidationError(GCoreError):
    """A graph violates the Path Property Graph invariants"""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("invalid graph: " + "; ".join(self.violations))


class UnknownPathError(GCoreError):
    """A path identifier is not a member of the graph"""


class UnknownGraphError(GCoreError):
    """A graph or view name cannot be resolved"""


class ParseError(GCoreError):
    """Syntax error in query text"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class StaticAnalysisError(GCoreError):
    """A query is syntactically valid but breaks a static rule"""

    def __init__(self, message: str, rule: str):
        self.message = message
        self.rule = rule
        super().__init__(f"[{rule}] {message}")


class EvaluationError(GCoreError):
    """Runtime failure while evaluating a query"""


class ExpressionTypeError(EvaluationError):
    """Operands of an expression have unsupported types"""


class DivisionByZeroError(EvaluationError):
    """Division by zero in an expression"""


class PathCostError(EvaluationError):
    """A path segment cost is not a positive number"""


class CatalogError(GCoreError):
    """Catalog or storage failure"""


class GraphFormatError(CatalogError):
    """A graph document does not follow the file format"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        prefix = f"{location}: " if location else ""
        super().__init__(f"{prefix}{message}")


class TableImportError(CatalogError):
    """A CSV table cannot be interpreted as a graph"""


class ViewCycleError(CatalogError):
    """Graph views reference each other in a cycle"""


class DuplicateNameError(CatalogError):
    """A graph, view, or path view name is already taken"""
