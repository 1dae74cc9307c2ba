"""G-CORE Engine - a graph query language engine over Path Property Graphs"""

__version__ = "0.1.0"
__author__ = "G-CORE Engine Team"
__description__ = "Composable graph queries with paths as first-class citizens"
