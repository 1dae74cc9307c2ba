"""Render an AST back to canonical query text"""

from typing import List, Optional

from . import ast
from .transformer import ANON_PREFIX


def _var(name: Optional[str]) -> str:
    if name is None or name.startswith(ANON_PREFIX):
        return ""
    return name


def _quote(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n")
    return f"'{escaped}'"


def _join(parts: List[str], sep: str = " ") -> str:
    return sep.join(p for p in parts if p)


class QueryRenderer:
    """Produces text whose parse equals the rendered tree"""

    def render(self, query: ast.Query) -> str:
        lines = [self.head_clause(h) for h in query.head]
        if query.body is not None:
            lines.append(self.full_query(query.body))
        return "\n".join(lines)

    # -- queries -----------------------------------------------------------

    def head_clause(self, clause) -> str:
        if isinstance(clause, ast.PathClause):
            text = f"PATH {clause.name} = " + ", ".join(self.chain(c) for c in clause.chains)
            if clause.where is not None:
                text += f" WHERE {self.expr(clause.where)}"
            if clause.cost is not None:
                text += f" COST {self.expr(clause.cost)}"
            return text
        keyword = "GRAPH VIEW" if isinstance(clause, ast.GraphViewClause) else "GRAPH"
        return f"{keyword} {clause.name} AS ({self.render(clause.query)})"

    def full_query(self, query) -> str:
        if isinstance(query, ast.GraphRef):
            return query.name
        if isinstance(query, ast.SetOperation):
            return f"({self.full_query(query.left)}) {query.op} ({self.full_query(query.right)})"
        return f"{self.construct(query.construct)} {self.match(query.match)}"

    # -- CONSTRUCT ---------------------------------------------------------

    def construct(self, clause: ast.ConstructClause) -> str:
        return "CONSTRUCT " + ", ".join(self.basic_construct(b) for b in clause.constructs)

    def basic_construct(self, basic: ast.BasicConstruct) -> str:
        items = []
        for item in basic.items:
            if isinstance(item, ast.GraphRef):
                items.append(item.name)
            else:
                items.append("".join(self.construct_element(e) for e in item.elements))
        text = ", ".join(items)
        for assignment in basic.assignments:
            text += " " + self.assignment(assignment)
        if basic.when is not None:
            text += f" WHEN {self.expr(basic.when)}"
        return text

    def assignment(self, item) -> str:
        if isinstance(item, ast.SetProperty):
            return f"SET {item.variable}.{item.key} := {self.expr(item.value)}"
        if isinstance(item, ast.SetLabel):
            return f"SET {item.variable}:{item.label}"
        if isinstance(item, ast.RemoveProperty):
            return f"REMOVE {item.variable}.{item.key}"
        return f"REMOVE {item.variable}:{item.label}"

    def _construct_filler(self, element, stored: bool = False) -> str:
        parts = [("@" if stored else "") + _var(element.variable)]
        if element.copy_of is not None:
            parts.append(f"={element.copy_of}")
        group = getattr(element, "group", [])
        if group:
            parts.append("GROUP " + ", ".join(self.expr(g) for g in group))
        if element.labels:
            parts.append("".join(f":{label}" for label in element.labels))
        if element.assignments:
            parts.append(
                "{"
                + ", ".join(f"{a.key} := {self.expr(a.value)}" for a in element.assignments)
                + "}"
            )
        return _join(parts)

    def construct_element(self, element) -> str:
        if isinstance(element, ast.NodeConstruct):
            return f"({self._construct_filler(element)})"
        if isinstance(element, ast.EdgeConstruct):
            filler = self._construct_filler(element)
            return f"-[{filler}]->" if element.direction == "right" else f"<-[{filler}]-"
        filler = self._construct_filler(element, stored=element.stored)
        return f"-/{filler}/->" if element.direction == "right" else f"<-/{filler}/-"

    # -- MATCH -------------------------------------------------------------

    def match(self, clause: ast.MatchClause) -> str:
        text = "MATCH " + ", ".join(self.located(p) for p in clause.patterns)
        if clause.where is not None:
            text += f" WHERE {self.expr(clause.where)}"
        for block in clause.optionals:
            text += " OPTIONAL " + ", ".join(self.located(p) for p in block.patterns)
            if block.where is not None:
                text += f" WHERE {self.expr(block.where)}"
        return text

    def located(self, located: ast.LocatedPattern) -> str:
        text = self.chain(located.chain)
        if located.location is None:
            return text
        if isinstance(located.location, ast.GraphRef):
            return f"{text} ON {located.location.name}"
        return f"{text} ON ({self.full_query(located.location)})"

    def chain(self, chain: ast.Chain) -> str:
        return "".join(self.pattern_element(e) for e in chain.elements)

    def _labels(self, labels: List[List[str]]) -> str:
        return "".join(":" + "|".join(alternatives) for alternatives in labels)

    def _pattern_filler(self, element) -> str:
        text = _var(element.variable) + self._labels(element.labels)
        props = [f"{p.key} = {self.expr(p.value)}" for p in element.predicates]
        props += [f"{b.key} = {b.variable}" for b in element.bindings]
        if props:
            text = _join([text, "{" + ", ".join(props) + "}"])
        return text

    def pattern_element(self, element) -> str:
        if isinstance(element, ast.NodePattern):
            return f"({self._pattern_filler(element)})"
        if isinstance(element, ast.EdgePattern):
            filler = self._pattern_filler(element)
            if element.direction == "right":
                return f"-[{filler}]->"
            if element.direction == "left":
                return f"<-[{filler}]-"
            return f"-[{filler}]-"
        return self.path_pattern(element)

    def path_pattern(self, element: ast.PathPattern) -> str:
        parts = []
        if element.mode == "all":
            parts.append("ALL")
        elif element.k > 1:
            parts.append(f"{element.k} SHORTEST")
        body = ("@" if element.stored else "") + (element.variable or "")
        body += self._labels(element.labels)
        if element.regex is not None:
            body += f"<{self.regex(element.regex)}>"
        parts.append(body)
        if element.cost_variable:
            parts.append(f"COST {element.cost_variable}")
        filler = _join(parts)
        return f"-/{filler}/->" if element.direction == "right" else f"<-/{filler}/-"

    # -- regular expressions -----------------------------------------------

    def regex(self, node) -> str:
        if isinstance(node, ast.RegexAlternation):
            return " + ".join(self.regex(o) for o in node.options)
        if isinstance(node, ast.RegexConcatenation):
            return " ".join(self._regex_operand(p, (ast.RegexAlternation,)) for p in node.parts)
        if isinstance(node, ast.RegexStar):
            inner = self._regex_operand(node.inner, (ast.RegexAlternation, ast.RegexConcatenation))
            return f"{inner}*"
        if isinstance(node, ast.RegexWildcard):
            return "_"
        if isinstance(node, ast.RegexEdge):
            return f"^:{node.label}" if node.inverse else f":{node.label}"
        if isinstance(node, ast.RegexNode):
            return f"[:{node.label}]"
        return f"~{node.name}"

    def _regex_operand(self, node, wrap) -> str:
        text = self.regex(node)
        return f"({text})" if isinstance(node, wrap) else text

    # -- expressions -------------------------------------------------------

    def expr(self, node) -> str:
        if isinstance(node, ast.LiteralExpr):
            return self.literal(node.value)
        if isinstance(node, ast.VariableExpr):
            return node.name
        if isinstance(node, ast.PropertyExpr):
            return f"{node.variable}.{node.key}"
        if isinstance(node, ast.LabelTestExpr):
            return node.variable + self._labels(node.labels)
        if isinstance(node, ast.UnaryExpr):
            op = "NOT " if node.op == "NOT" else "-"
            return f"({op}{self.expr(node.operand)})"
        if isinstance(node, ast.BinaryExpr):
            return f"({self.expr(node.left)} {node.op} {self.expr(node.right)})"
        if isinstance(node, ast.FunctionCallExpr):
            return f"{node.name}({', '.join(self.expr(a) for a in node.args)})"
        if isinstance(node, ast.AggregateExpr):
            if node.argument is None:
                return f"{node.function}(*)"
            distinct = "DISTINCT " if node.distinct else ""
            return f"{node.function}({distinct}{self.expr(node.argument)})"
        if isinstance(node, ast.ExistsExpr):
            return f"EXISTS ({self.render(node.query)})"
        if isinstance(node, ast.CaseExpr):
            text = "CASE"
            for branch in node.branches:
                text += f" WHEN {self.expr(branch.condition)} THEN {self.expr(branch.result)}"
            if node.default is not None:
                text += f" ELSE {self.expr(node.default)}"
            return text + " END"
        if isinstance(node, ast.IndexExpr):
            return f"{self.expr(node.target)}[{self.expr(node.index)}]"
        if isinstance(node, ast.ListExpr):
            return "[" + ", ".join(self.expr(i) for i in node.items) + "]"
        return "{" + ", ".join(self.expr(i) for i in node.items) + "}"

    def literal(self, value) -> str:
        if value is None:
            return "NULL"
        if isinstance(value, bool):
            return "TRUE" if value else "FALSE"
        if isinstance(value, str):
            return _quote(value)
        return repr(value)


def render_query(query: ast.Query) -> str:
    return QueryRenderer().render(query)
