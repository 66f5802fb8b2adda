"""Markov conditions: independence-statement generators over mixed graphs.

Each condition turns a graph into a set of statements "X is independent of
Y given Z" over variable nodes (propositions, or the super-nodes a
condensation introduces; never formula-nodes).  Statements are canonical:
both sides sorted, the lexicographically smaller side first, so set
comparisons are meaningful.

Conditions:

* ``lmc-lcn`` — per proposition A: A ⊥ everything except itself, its
  lcn-descendants and lcn-parents | lcn-parents.  Runs on a dependency
  graph.
* ``lmc-cstr`` — per node A: remainder excludes strict descendants and the
  boundary; condition on the boundary.
* ``lmc-c`` — like lmc-cstr with plain descendants.
* ``lmc-d`` — remainder excludes descendants and parents; condition on the
  parents.
* ``gmc-c`` — global: X ⊥ Y | Z whenever Z separates X from Y in the moral
  graph of the smallest ancestral set containing X ∪ Y ∪ Z.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .build import lcn_descendants, lcn_parents
from .errors import GraphError
from .graph import MixedGraph, Node

LMC_LCN = "lmc-lcn"
LMC_C = "lmc-c"
LMC_CSTR = "lmc-cstr"
LMC_D = "lmc-d"
GMC_C = "gmc-c"

LOCAL_CONDITIONS = (LMC_LCN, LMC_C, LMC_CSTR, LMC_D)
CONDITIONS = LOCAL_CONDITIONS + (GMC_C,)

#: Combinatorial guard for exhaustive statement enumeration.
MAX_ENUMERATION_NODES = 12


@dataclass(frozen=True)
class IndependenceStatement:
    """X ⊥ Y | Z over variable names, stored canonically."""

    x: tuple[str, ...]
    y: tuple[str, ...]
    z: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        x = tuple(sorted(set(self.x)))
        y = tuple(sorted(set(self.y)))
        z = tuple(sorted(set(self.z)))
        if not x or not y:
            raise GraphError("both sides of an independence statement must be nonempty")
        if x > y:
            x, y = y, x
        if (set(x) & set(y)) or (set(x) & set(z)) or (set(y) & set(z)):
            raise GraphError("sides of an independence statement must be disjoint")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def __str__(self) -> str:
        base = f"{','.join(self.x)} _||_ {','.join(self.y)}"
        return f"{base} | {','.join(self.z)}" if self.z else base

    @property
    def sort_key(self) -> tuple:
        return (self.x, self.y, self.z)

    def to_json_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "z": list(self.z)}


def _variables(g: MixedGraph) -> tuple[Node, ...]:
    return tuple(n for n in g.nodes if n.kind != "formula")


def _names(nodes: Iterable[Node]) -> tuple[str, ...]:
    return tuple(sorted(n.name for n in nodes))


def _require_variable_graph(g: MixedGraph, condition: str) -> None:
    if any(n.kind == "formula" for n in g.nodes):
        raise GraphError(
            f"condition/graph-kind mismatch: {condition} is defined on graphs "
            "without formula-nodes"
        )


def local_statements(g: MixedGraph, condition: str) -> frozenset[IndependenceStatement]:
    """One statement per node, skipping nodes whose remainder is empty."""
    if condition not in LOCAL_CONDITIONS:
        raise GraphError(f"unknown local condition {condition!r}")
    if condition != LMC_LCN:
        _require_variable_graph(g, condition)

    variables = _variables(g)
    var_set = frozenset(variables)
    out: set[IndependenceStatement] = set()
    for a in variables:
        if condition == LMC_LCN:
            given = lcn_parents(g, a)
            excluded = lcn_descendants(g, a)
        elif condition == LMC_CSTR:
            given = g.boundary(a)
            excluded = g.strict_descendants(a)
        elif condition == LMC_C:
            given = g.boundary(a)
            excluded = g.descendants(a)
        else:  # LMC_D
            given = g.parents(a)
            excluded = g.descendants(a)
        rest = var_set - {a} - (excluded & var_set) - given
        if rest:
            out.add(IndependenceStatement((a.name,), _names(rest), _names(given)))
    return frozenset(out)


def gmc_implies(g: MixedGraph,
                n1: Iterable[object],
                n2: Iterable[object],
                n3: Iterable[object]) -> bool:
    """Whether the global condition makes n1 independent of n3 given n2:
    n2 separates n1 from n3 in the moral graph of the smallest ancestral
    set containing all three."""
    s1, s2, s3 = g.resolve_set(n1), g.resolve_set(n2), g.resolve_set(n3)
    for s in (s1, s2, s3):
        for n in s:
            if n.kind == "formula":
                raise GraphError("independence queries range over variable nodes only")
    if not s1 or not s3:
        raise GraphError("both outer sets of an independence query must be nonempty")
    return g.gma(s1, s2, s3).separates(s1, s2, s3)


def enumerate_gmc(g: MixedGraph,
                  max_x: int = 2,
                  max_y: int | None = None,
                  max_z: int = 3) -> frozenset[IndependenceStatement]:
    """All statements X ⊥ Y | Z (|X| ≤ max_x, |Y| ≤ max_y, |Z| ≤ max_z) the
    global condition implies, as a canonical set.

    Cost grows steeply with the node count and the guard caps it at
    MAX_ENUMERATION_NODES.
    """
    _require_variable_graph(g, GMC_C)
    variables = _variables(g)
    n = len(variables)
    if n > MAX_ENUMERATION_NODES:
        raise GraphError(
            f"enumeration over {n} nodes exceeds the "
            f"{MAX_ENUMERATION_NODES}-node guard"
        )
    if max_y is None:
        max_y = n
    out: set[IndependenceStatement] = set()
    for x in _subsets(variables, 1, max_x):
        rest_x = tuple(v for v in variables if v not in x)
        for y in _subsets(rest_x, 1, max_y):
            rest_xy = tuple(v for v in rest_x if v not in y)
            for z in _subsets(rest_xy, 0, max_z):
                if gmc_implies(g, x, z, y):
                    out.add(IndependenceStatement(_names(x), _names(y), _names(z)))
    return frozenset(out)


def _subsets(pool: tuple[Node, ...], lo: int, hi: int) -> Iterator[tuple[Node, ...]]:
    for size in range(lo, min(hi, len(pool)) + 1):
        yield from combinations(pool, size)


def weak_descendants(g: MixedGraph, node) -> frozenset[Node]:
    """Descendants that are not strict descendants (chain graphs only):
    nodes every directed path reaches only by leaving through an
    undirected edge first."""
    if g.has_directed_cycle():
        raise GraphError("weak descendants are defined on chain graphs only")
    return g.descendants(node) - g.strict_descendants(node)


def statement_decomposes(strong: IndependenceStatement,
                         weak: IndependenceStatement) -> bool:
    """Whether `weak` follows from `strong` by shrinking one side
    (the decomposition rule: X ⊥ Y∪W | Z implies X ⊥ Y | Z)."""
    if strong.z != weak.z:
        return False
    sx, sy = set(strong.x), set(strong.y)
    wx, wy = set(weak.x), set(weak.y)
    return ((wx == sx and wy <= sy) or (wy == sx and wx <= sy)
            or (wx == sy and wy <= sx) or (wy == sy and wx <= sx))


@dataclass(frozen=True)
class ComparisonReport:
    only_in_a: tuple[IndependenceStatement, ...]
    only_in_b: tuple[IndependenceStatement, ...]
    shared: tuple[IndependenceStatement, ...]


def statements_for(g: MixedGraph,
                   condition: str,
                   max_x: int = 2,
                   max_y: int | None = None,
                   max_z: int = 3) -> frozenset[IndependenceStatement]:
    """Statement set of any condition: local generators as generated, the
    global condition via bounded enumeration."""
    if condition in LOCAL_CONDITIONS:
        return local_statements(g, condition)
    if condition == GMC_C:
        return enumerate_gmc(g, max_x, max_y, max_z)
    raise GraphError(f"unknown condition {condition!r}")


def compare_conditions(g_a: MixedGraph, cond_a: str,
                       g_b: MixedGraph, cond_b: str,
                       max_x: int = 2,
                       max_y: int | None = None,
                       max_z: int = 3) -> ComparisonReport:
    """Set difference of two conditions' statements (possibly on two
    different graphs)."""
    sa = statements_for(g_a, cond_a, max_x, max_y, max_z)
    sb = statements_for(g_b, cond_b, max_x, max_y, max_z)
    order = lambda stmts: tuple(sorted(stmts, key=lambda s: s.sort_key))
    return ComparisonReport(order(sa - sb), order(sb - sa), order(sa & sb))
