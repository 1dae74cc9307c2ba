"""Abstract syntax tree for G-CORE queries

Every node is a pydantic model with a ``kind`` discriminator so that trees
compare structurally and dump to a diagnostic JSON form.
"""

from typing import Annotated, Any, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class SourcePosition(BaseModel):
    """Location of a syntax element; never affects AST equality"""

    model_config = ConfigDict(frozen=True)

    line: int = 1
    column: int = 1

    def __eq__(self, other: Any) -> bool:
        return other is None or isinstance(other, SourcePosition)

    def __hash__(self) -> int:
        return 0


class AstNode(BaseModel):
    pos: Optional[SourcePosition] = Field(default=None, exclude=True, repr=False)


# ---------------------------------------------------------------------------
# Regular path expressions
# ---------------------------------------------------------------------------


class RegexWildcard(AstNode):
    kind: Literal["regex_wildcard"] = "regex_wildcard"


class RegexEdge(AstNode):
    kind: Literal["regex_edge"] = "regex_edge"
    label: str
    inverse: bool = False


class RegexNode(AstNode):
    kind: Literal["regex_node"] = "regex_node"
    label: str


class RegexView(AstNode):
    kind: Literal["regex_view"] = "regex_view"
    name: str


class RegexAlternation(AstNode):
    kind: Literal["regex_alt"] = "regex_alt"
    options: List["Regex"]


class RegexConcatenation(AstNode):
    kind: Literal["regex_concat"] = "regex_concat"
    parts: List["Regex"]


class RegexStar(AstNode):
    kind: Literal["regex_star"] = "regex_star"
    inner: "Regex"


Regex = Annotated[
    Union[
        RegexWildcard,
        RegexEdge,
        RegexNode,
        RegexView,
        RegexAlternation,
        RegexConcatenation,
        RegexStar,
    ],
    Field(discriminator="kind"),
]


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class LiteralExpr(AstNode):
    kind: Literal["literal"] = "literal"
    value: Union[bool, int, float, str, None] = None


class ListExpr(AstNode):
    kind: Literal["list"] = "list"
    items: List["Expression"] = Field(default_factory=list)


class SetExpr(AstNode):
    kind: Literal["set"] = "set"
    items: List["Expression"] = Field(default_factory=list)


class VariableExpr(AstNode):
    kind: Literal["variable"] = "variable"
    name: str


class PropertyExpr(AstNode):
    kind: Literal["property"] = "property"
    variable: str
    key: str


class LabelTestExpr(AstNode):
    """x:A|B:C holds when x carries A or B, and C"""

    kind: Literal["label_test"] = "label_test"
    variable: str
    labels: List[List[str]]


class UnaryExpr(AstNode):
    kind: Literal["unary"] = "unary"
    op: Literal["NOT", "-"]
    operand: "Expression"


BinaryOperator = Literal[
    "AND", "OR", "=", "<>", "<", "<=", ">", ">=", "IN", "SUBSET OF",
    "+", "-", "*", "/", "%",
]


class BinaryExpr(AstNode):
    kind: Literal["binary"] = "binary"
    op: BinaryOperator
    left: "Expression"
    right: "Expression"


class FunctionCallExpr(AstNode):
    kind: Literal["call"] = "call"
    name: str
    args: List["Expression"] = Field(default_factory=list)


class AggregateExpr(AstNode):
    """Aggregation over the group of a construct element; argument None is COUNT(*)"""

    kind: Literal["aggregate"] = "aggregate"
    function: Literal["COUNT", "MIN", "MAX", "SUM", "AVG", "COLLECT"]
    argument: Optional["Expression"] = None
    distinct: bool = False


class ExistsExpr(AstNode):
    kind: Literal["exists"] = "exists"
    query: "Query"


class CaseBranch(AstNode):
    condition: "Expression"
    result: "Expression"


class CaseExpr(AstNode):
    kind: Literal["case"] = "case"
    branches: List[CaseBranch]
    default: Optional["Expression"] = None


class IndexExpr(AstNode):
    kind: Literal["index"] = "index"
    target: "Expression"
    index: "Expression"


Expression = Annotated[
    Union[
        LiteralExpr,
        ListExpr,
        SetExpr,
        VariableExpr,
        PropertyExpr,
        LabelTestExpr,
        UnaryExpr,
        BinaryExpr,
        FunctionCallExpr,
        AggregateExpr,
        ExistsExpr,
        CaseExpr,
        IndexExpr,
    ],
    Field(discriminator="kind"),
]


# ---------------------------------------------------------------------------
# MATCH patterns
# ---------------------------------------------------------------------------


class PropertyPredicate(AstNode):
    """Inline {k = expr}: the element must carry the value"""

    key: str
    value: "Expression"


class PropertyBinding(AstNode):
    """Inline {k = var}: binds var to each value of k"""

    key: str
    variable: str


class NodePattern(AstNode):
    kind: Literal["node"] = "node"
    variable: Optional[str] = None
    labels: List[List[str]] = Field(default_factory=list)
    predicates: List[PropertyPredicate] = Field(default_factory=list)
    bindings: List[PropertyBinding] = Field(default_factory=list)


class EdgePattern(AstNode):
    kind: Literal["edge"] = "edge"
    variable: Optional[str] = None
    direction: Literal["right", "left", "any"] = "right"
    labels: List[List[str]] = Field(default_factory=list)
    predicates: List[PropertyPredicate] = Field(default_factory=list)
    bindings: List[PropertyBinding] = Field(default_factory=list)


class PathPattern(AstNode):
    """-/ [k SHORTEST | ALL] [@]p [:label] [<regex>] [COST c] /->"""

    kind: Literal["path"] = "path"
    variable: Optional[str] = None
    direction: Literal["right", "left"] = "right"
    stored: bool = False
    mode: Literal["shortest", "all"] = "shortest"
    k: int = 1
    labels: List[List[str]] = Field(default_factory=list)
    regex: Optional[Regex] = None
    cost_variable: Optional[str] = None


PatternElement = Annotated[
    Union[NodePattern, EdgePattern, PathPattern], Field(discriminator="kind")
]


class Chain(AstNode):
    """Alternating node and relationship patterns"""

    elements: List[PatternElement]

    @property
    def nodes(self) -> List[NodePattern]:
        return [e for e in self.elements if isinstance(e, NodePattern)]


class GraphRef(AstNode):
    kind: Literal["graph_ref"] = "graph_ref"
    name: str


class LocatedPattern(AstNode):
    chain: Chain
    location: Optional["FullQuery"] = None


class OptionalBlock(AstNode):
    patterns: List[LocatedPattern]
    where: Optional["Expression"] = None


class MatchClause(AstNode):
    patterns: List[LocatedPattern]
    where: Optional["Expression"] = None
    optionals: List[OptionalBlock] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# CONSTRUCT patterns
# ---------------------------------------------------------------------------


class PropertyAssignment(AstNode):
    key: str
    value: "Expression"


class NodeConstruct(AstNode):
    kind: Literal["node"] = "node"
    variable: Optional[str] = None
    copy_of: Optional[str] = None
    group: List[Union[VariableExpr, PropertyExpr]] = Field(default_factory=list)
    labels: List[str] = Field(default_factory=list)
    assignments: List[PropertyAssignment] = Field(default_factory=list)


class EdgeConstruct(AstNode):
    kind: Literal["edge"] = "edge"
    variable: Optional[str] = None
    direction: Literal["right", "left"] = "right"
    copy_of: Optional[str] = None
    group: List[Union[VariableExpr, PropertyExpr]] = Field(default_factory=list)
    labels: List[str] = Field(default_factory=list)
    assignments: List[PropertyAssignment] = Field(default_factory=list)


class PathConstruct(AstNode):
    kind: Literal["path"] = "path"
    variable: str
    direction: Literal["right", "left"] = "right"
    stored: bool = False
    copy_of: Optional[str] = None
    labels: List[str] = Field(default_factory=list)
    assignments: List[PropertyAssignment] = Field(default_factory=list)


ConstructElement = Annotated[
    Union[NodeConstruct, EdgeConstruct, PathConstruct], Field(discriminator="kind")
]


class ConstructChain(AstNode):
    kind: Literal["construct_chain"] = "construct_chain"
    elements: List[ConstructElement]


class SetProperty(AstNode):
    kind: Literal["set_property"] = "set_property"
    variable: str
    key: str
    value: "Expression"


class SetLabel(AstNode):
    kind: Literal["set_label"] = "set_label"
    variable: str
    label: str


class RemoveProperty(AstNode):
    kind: Literal["remove_property"] = "remove_property"
    variable: str
    key: str


class RemoveLabel(AstNode):
    kind: Literal["remove_label"] = "remove_label"
    variable: str
    label: str


Assignment = Annotated[
    Union[SetProperty, SetLabel, RemoveProperty, RemoveLabel],
    Field(discriminator="kind"),
]

ConstructItem = Annotated[Union[GraphRef, ConstructChain], Field(discriminator="kind")]


class BasicConstruct(AstNode):
    """Object constructs and graph references sharing one SET/REMOVE list and WHEN"""

    items: List[ConstructItem]
    assignments: List[Assignment] = Field(default_factory=list)
    when: Optional["Expression"] = None


class ConstructClause(AstNode):
    constructs: List[BasicConstruct]

    @property
    def all_items(self) -> List[Any]:
        """Every construct item across the basic constructs, in order"""
        return [item for basic in self.constructs for item in basic.items]


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


class BasicQuery(AstNode):
    kind: Literal["basic"] = "basic"
    construct: ConstructClause
    match: MatchClause


class SetOperation(AstNode):
    kind: Literal["set_op"] = "set_op"
    op: Literal["UNION", "INTERSECT", "MINUS"]
    left: "FullQuery"
    right: "FullQuery"


FullQuery = Annotated[
    Union[BasicQuery, SetOperation, GraphRef], Field(discriminator="kind")
]


class PathClause(AstNode):
    """PATH name = walk, auxiliary patterns [WHERE cond] [COST expr]"""

    kind: Literal["path_clause"] = "path_clause"
    name: str
    chains: List[Chain]
    where: Optional["Expression"] = None
    cost: Optional["Expression"] = None


class GraphClause(AstNode):
    kind: Literal["graph_clause"] = "graph_clause"
    name: str
    query: "Query"


class GraphViewClause(AstNode):
    kind: Literal["graph_view_clause"] = "graph_view_clause"
    name: str
    query: "Query"


HeadClause = Annotated[
    Union[PathClause, GraphClause, GraphViewClause], Field(discriminator="kind")
]


class Query(AstNode):
    head: List[HeadClause] = Field(default_factory=list)
    body: Optional[FullQuery] = None


for _model in list(globals().values()):
    if isinstance(_model, type) and issubclass(_model, BaseModel) and _model is not BaseModel:
        _model.model_rebuild()
