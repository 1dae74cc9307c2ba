"""Lark grammar for G-CORE queries"""

from lark import Lark

GCORE_GRAMMAR = r"""
?start: query

query: head_clause* full_query?

?head_clause: path_clause
            | graph_clause
            | graph_view_clause

//============================================================================
// Head clauses
//============================================================================

path_clause: _PATH NAME "=" chain ("," chain)* path_option*
?path_option: where_clause
            | cost_clause
cost_clause: _COST expr

graph_clause: _GRAPH NAME _AS "(" query ")"
graph_view_clause: _GRAPH _VIEW NAME _AS "(" query ")"

//============================================================================
// Graph queries and set operations
//============================================================================

?full_query: operand
           | full_query _UNION operand      -> union_query
           | full_query _INTERSECT operand  -> intersect_query
           | full_query _MINUS operand      -> minus_query

?operand: basic_query
        | NAME                              -> graph_ref
        | "(" full_query ")"

basic_query: construct_clause match_clause

//============================================================================
// CONSTRUCT
//============================================================================

construct_clause: _CONSTRUCT (gated_construct ",")* basic_construct

// A basic construct owns the SET/REMOVE and WHEN that follow it; only the last
// one may end without them, so a comma after WHEN starts the next one.
basic_construct: construct_item ("," construct_item)* set_remove* when_clause?
gated_construct: construct_item ("," construct_item)* set_remove+ when_clause?
               | construct_item ("," construct_item)* when_clause

?construct_item: NAME                      -> graph_ref
               | construct_chain

construct_chain: c_node (c_rel c_node)*

c_node: "(" NAME? copy_of? group_by? c_labels? c_props? ")"

?c_rel: "-[" c_edge_filler "]->"            -> c_edge_right
      | "<-[" c_edge_filler "]-"            -> c_edge_left
      | "-/" c_path_filler "/->"            -> c_path_right
      | "<-/" c_path_filler "/-"            -> c_path_left

c_edge_filler: NAME? copy_of? group_by? c_labels? c_props?
c_path_filler: STORED? NAME copy_of? c_labels? c_props?

copy_of: "=" NAME
group_by: _GROUP group_item ("," group_item)*
?group_item: NAME                           -> variable
           | NAME "." key                   -> property
c_labels: (":" key)+
c_props: "{" c_prop ("," c_prop)* "}"
c_prop: key ":=" expr

set_remove: _SET set_item ("," set_item)*
          | _REMOVE remove_item ("," remove_item)*
set_item: NAME "." key ":=" expr            -> set_property
        | NAME ":" key                      -> set_label
remove_item: NAME "." key                   -> remove_property
           | NAME ":" key                   -> remove_label

when_clause: _WHEN expr

//============================================================================
// MATCH
//============================================================================

match_clause: _MATCH located_list where_clause? optional_block*
optional_block: _OPTIONAL located_list where_clause?
located_list: located ("," located)*
located: chain (_ON location)?
?location: NAME                             -> graph_ref
         | "(" full_query ")"

where_clause: _WHERE expr

chain: node (rel node)*

node: "(" NAME? labels? props? ")"

?rel: "-[" edge_filler "]->"                -> edge_right
    | "<-[" edge_filler "]-"                -> edge_left
    | "-[" edge_filler "]-"                 -> edge_any
    | "-/" path_filler "/->"                -> path_right
    | "<-/" path_filler "/-"                -> path_left

edge_filler: NAME? labels? props?
path_filler: path_mode? STORED? NAME? labels? regex_spec? cost_var?

path_mode: INT? _SHORTEST                   -> shortest_mode
         | _ALL                             -> all_mode
regex_spec: "<" regex ">"
cost_var: _COST NAME

labels: label_alternatives+
label_alternatives: ":" key ("|" key)*
props: "{" prop ("," prop)* "}"
prop: key ("=" | ":") expr

//============================================================================
// Regular path expressions
//============================================================================

?regex: regex_seq
      | regex ("+" | "|") regex_seq         -> regex_alt
?regex_seq: regex_star
          | regex_seq regex_star            -> regex_concat
?regex_star: regex_atom
           | regex_star "*"                 -> regex_kleene
?regex_atom: WILDCARD                       -> regex_wildcard
           | ":"? key                       -> regex_edge
           | "^" ":"? key                   -> regex_inverse
           | "[" ":" key "]"                -> regex_node
           | "~" NAME                       -> regex_view
           | "(" regex ")"

//============================================================================
// Expressions
//============================================================================

?expr: or_expr
?or_expr: and_expr
        | or_expr _OR and_expr              -> or_op
?and_expr: not_expr
         | and_expr _AND not_expr           -> and_op
?not_expr: comparison
         | _NOT not_expr                    -> not_op
?comparison: additive
           | additive "=" additive          -> eq
           | additive ("<>" | "!=") additive -> neq
           | additive "<" additive          -> lt
           | additive "<=" additive         -> le
           | additive ">" additive          -> gt
           | additive ">=" additive         -> ge
           | additive _IN additive          -> in_op
           | additive _SUBSET _OF additive  -> subset_op
?additive: multiplicative
         | additive "+" multiplicative      -> add
         | additive "-" multiplicative      -> sub
?multiplicative: unary
               | multiplicative "*" unary   -> mul
               | multiplicative "/" unary   -> div
               | multiplicative "%" unary   -> mod
?unary: postfix
      | "-" unary                           -> neg
?postfix: atom
        | postfix "[" expr "]"              -> index
?atom: literal
     | NAME                                 -> variable
     | NAME "." key                         -> property
     | NAME label_alternatives+             -> label_test
     | NAME "(" DISTINCT? arguments? ")"    -> call
     | NAME "(" "*" ")"                     -> count_star
     | _EXISTS "(" query ")"                -> exists
     | case_expr
     | "[" arguments? "]"                   -> list_literal
     | "{" arguments? "}"                   -> set_literal
     | node (rel node)+                     -> pattern_predicate
     | "(" expr ")"

arguments: expr ("," expr)*

case_expr: _CASE case_branch+ case_else? _END       -> searched_case
         | _CASE expr case_branch+ case_else? _END  -> simple_case
case_branch: _WHEN expr _THEN expr
case_else: _ELSE expr

?literal: INT                               -> int_literal
        | FLOAT                             -> float_literal
        | STRING                            -> string_literal
        | _TRUE                             -> true_literal
        | _FALSE                            -> false_literal
        | _NULL                             -> null_literal

// Labels and property keys may spell a keyword in any case
!key: NAME | _CONSTRUCT | _MATCH | _OPTIONAL | _WHERE | _ON | _UNION | _INTERSECT
    | _MINUS | _PATH | _GRAPH | _VIEW | _AS | _COST | _SHORTEST | _ALL | _GROUP
    | _SET | _REMOVE | _WHEN | _EXISTS | _NOT | _AND | _OR | _IN | _SUBSET | _OF
    | _CASE | _THEN | _ELSE | _END | _TRUE | _FALSE | _NULL | DISTINCT

//============================================================================
// Terminals
//============================================================================

_CONSTRUCT: "construct"i
_MATCH: "match"i
_OPTIONAL: "optional"i
_WHERE: "where"i
_ON: "on"i
_UNION: "union"i
_INTERSECT: "intersect"i
_MINUS: "minus"i
_PATH: "path"i
_GRAPH: "graph"i
_VIEW: "view"i
_AS: "as"i
_COST: "cost"i
_SHORTEST: "shortest"i
_ALL: "all"i
_GROUP: "group"i
_SET: "set"i
_REMOVE: "remove"i
_WHEN: "when"i
_EXISTS: "exists"i
_NOT: "not"i
_AND: "and"i
_OR: "or"i
_IN: "in"i
_SUBSET: "subset"i
_OF: "of"i
_CASE: "case"i
_THEN: "then"i
_ELSE: "else"i
_END: "end"i
_TRUE: "true"i
_FALSE: "false"i
_NULL: "null"i
DISTINCT: "distinct"i

STORED: "@"
WILDCARD: "_"
NAME: /[A-Za-z_][A-Za-z0-9_]*/i
FLOAT.2: /\d+\.\d+([eE][+-]?\d+)?/ | /\d+[eE][+-]?\d+/
INT: /\d+/
STRING: /'(?:[^'\\]|\\.)*'/ | /"(?:[^"\\]|\\.)*"/

COMMENT: /--[^\n]*/
%import common.WS
%ignore WS
%ignore COMMENT
"""

KEYWORDS = frozenset(
    name.lstrip("_").lower()
    for name in (
        "CONSTRUCT MATCH OPTIONAL WHERE ON UNION INTERSECT MINUS PATH GRAPH VIEW AS "
        "COST SHORTEST ALL GROUP SET REMOVE WHEN EXISTS NOT AND OR IN SUBSET OF CASE "
        "THEN ELSE END TRUE FALSE NULL DISTINCT"
    ).split()
)


def build_parser() -> Lark:
    """Earley parser with a context-free lexer; ambiguities resolve by rule order"""
    return Lark(
        GCORE_GRAMMAR,
        start="start",
        parser="earley",
        lexer="basic",
        ambiguity="resolve",
        propagate_positions=True,
        maybe_placeholders=False,
    )
