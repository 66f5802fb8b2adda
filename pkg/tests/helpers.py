"""Shared test utilities: example graphs, random generators, and
independent reference implementations used to cross-check the library.

The reference implementations here deliberately share no traversal or
accumulation code with the package: they are straight-line re-derivations
used as oracles.
"""

from __future__ import annotations

import math
import random
from itertools import combinations
from pathlib import Path

from lcn.factorize import FactorizationPlan
from lcn.formula import (
    And,
    BOTTOM_KEY,
    Not,
    Or,
    Prop,
    TOP,
    TOP_KEY,
    canonical_key,
    key_as_single_prop,
    support,
)
from lcn.graph import MixedGraph
from lcn.markov import IndependenceStatement
from lcn.model import Constraint, Lcn, make_lcn, parse_lcn
from lcn.oracle import WEIGHT_FLOOR, JointTable

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> Lcn:
    return parse_lcn((FIXTURES / name).read_text())


# ---------------------------------------------------------------------------
# Hand-built example graphs

def quad_dag() -> MixedGraph:
    return MixedGraph.from_props("ABCD", [("A", "B"), ("C", "D"), ("B", "D")])


def quad_bidirected() -> MixedGraph:
    return MixedGraph.from_props(
        "ABCD",
        [("A", "B"), ("B", "A"), ("C", "D"), ("D", "C"), ("B", "D"), ("D", "B")],
    )


def quad_undirected() -> MixedGraph:
    return MixedGraph.from_props("ABCD", [], [("A", "B"), ("C", "D"), ("B", "D")])


def quad_mixed() -> MixedGraph:
    return MixedGraph.from_props(
        "ABCD", [("A", "B"), ("C", "D"), ("B", "D"), ("D", "B")]
    )


def quad_chain() -> MixedGraph:
    return MixedGraph.from_props("ABCD", [("A", "B"), ("C", "D")], [("B", "D")])


def quad_chain_tail() -> MixedGraph:
    """quad_chain with an extra directed edge D -> E."""
    return MixedGraph.from_props(
        "ABCDE", [("A", "B"), ("C", "D"), ("D", "E")], [("B", "D")]
    )


def undirected_block() -> MixedGraph:
    return MixedGraph.from_props(
        "ABCDE", [("A", "B"), ("E", "D")], [("B", "C"), ("C", "D")]
    )


def bidirected_block() -> MixedGraph:
    return MixedGraph.from_props(
        "ABCDE",
        [("A", "B"), ("E", "D"), ("B", "C"), ("C", "B"), ("C", "D"), ("D", "C")],
    )


def cycle_graph(k: int) -> MixedGraph:
    names = [f"A{i}" for i in range(1, k + 1)]
    edges = [(names[i], names[(i + 1) % k]) for i in range(k)]
    return MixedGraph.from_props(names, edges)


# ---------------------------------------------------------------------------
# Edge-set extraction for golden comparisons

def dir_names(g: MixedGraph) -> set[tuple[str, str]]:
    return {(a.name, b.name) for a, b in g.directed}


def und_names(g: MixedGraph) -> set[frozenset[str]]:
    return {frozenset((a.name, b.name)) for a, b in g.undirected}


def und(*pairs: str) -> set[frozenset[str]]:
    """und("AB", "CD") -> {{A,B}, {C,D}} for two-letter node names."""
    return {frozenset((p[0], p[1])) for p in pairs}


def stmt(x: str, y: str, z: str = "") -> IndependenceStatement:
    """stmt("A", "B,C", "D") -> A _||_ B,C | D."""
    split = lambda s: tuple(t for t in s.split(",") if t)
    return IndependenceStatement(split(x), split(y), split(z))


def stmt_strs(statements) -> set[str]:
    return {str(s) for s in statements}


# ---------------------------------------------------------------------------
# Random generators

def random_mixed_graph(rng: random.Random, n: int,
                       p_dir: float = 0.12, p_und: float = 0.12,
                       p_bi: float = 0.04) -> MixedGraph:
    """Sparse random mixed graph on n nodes (may contain directed cycles)."""
    names = [f"X{i}" for i in range(n)]
    directed: list[tuple[str, str]] = []
    undirected: list[tuple[str, str]] = []
    for a, b in combinations(names, 2):
        r = rng.random()
        if r < p_dir:
            directed.append((a, b))
        elif r < 2 * p_dir:
            directed.append((b, a))
        elif r < 2 * p_dir + p_und:
            undirected.append((a, b))
        elif r < 2 * p_dir + p_und + p_bi:
            directed.append((a, b))
            directed.append((b, a))
    return MixedGraph.from_props(names, directed, undirected)


def random_chain_graph(rng: random.Random, n: int,
                       p_within: float = 0.5,
                       p_between: float = 0.3) -> MixedGraph:
    """Random chain graph built by construction: undirected edges inside
    blocks, directed edges from earlier blocks to later ones."""
    names = [f"X{i}" for i in range(n)]
    rng.shuffle(names)
    blocks: list[list[str]] = []
    i = 0
    while i < n:
        size = rng.randint(1, 3)
        blocks.append(names[i:i + size])
        i += size
    directed: list[tuple[str, str]] = []
    undirected: list[tuple[str, str]] = []
    for bi, block in enumerate(blocks):
        for a, b in combinations(block, 2):
            if rng.random() < p_within:
                undirected.append((a, b))
        for later in blocks[bi + 1:]:
            for a in block:
                for b in later:
                    if rng.random() < p_between:
                        directed.append((a, b))
    return MixedGraph.from_props(names, directed, undirected)


def random_undirected_graph(rng: random.Random, n: int,
                            p: float = 0.35) -> MixedGraph:
    names = [f"X{i}" for i in range(n)]
    undirected = [(a, b) for a, b in combinations(names, 2) if rng.random() < p]
    return MixedGraph.from_props(names, [], undirected)


def random_formula(rng: random.Random, props: list[str], depth: int):
    if depth <= 0 or rng.random() < 0.35:
        return Prop(rng.choice(props))
    op = rng.random()
    if op < 0.25:
        return Not(random_formula(rng, props, depth - 1))
    left = random_formula(rng, props, depth - 1)
    right = random_formula(rng, props, depth - 1)
    return And(left, right) if op < 0.6 else Or(left, right)


class _FreshFormulas:
    """Draws random formulas that are *support-exact* (every proposition
    written in the formula matters to its truth value) and whose
    materialized canonical keys are pairwise distinct and distinct from
    Top, Bottom, and every bare proposition.  Single-proposition-equivalent
    formulas are exempt from key freshness (never materialized).

    Support-exactness keeps the generated models well-posed for the
    dependency-graph/structure correspondence properties: the structure
    reads propositions off the written formula while the dependency graph
    uses the propositions the formula depends on, and those properties relate
    the two only when those agree."""

    def __init__(self, rng: random.Random, props: list[str]):
        self.rng = rng
        self.props = props
        self.used = {TOP_KEY, BOTTOM_KEY}
        self.used.update(canonical_key(Prop(p)) for p in props)

    def draw(self, pool: list[str] | None = None, tries: int = 60):
        pool = pool if pool is not None else self.props
        for _ in range(tries):
            f = random_formula(self.rng, pool, self.rng.randint(1, 2))
            key = canonical_key(f)
            if tuple(sorted(support(f))) != key[0]:
                continue
            if key_as_single_prop(key) is not None:
                return f
            if key in self.used:
                continue
            self.used.add(key)
            return f
        return None


def random_lcn(rng: random.Random, max_props: int = 6,
               max_constraints: int = 8) -> Lcn:
    """Random collision-free model: materialized formulas never share a
    canonical key across constraints."""
    k = rng.randint(2, max_props)
    props = [f"P{i}" for i in range(k)]
    fresh = _FreshFormulas(rng, props)
    constraints: list[Constraint] = []
    want = rng.randint(1, max_constraints)
    guard = 0
    while len(constraints) < want and guard < 10 * want:
        guard += 1
        phi = fresh.draw()
        if phi is None:
            break
        psi = TOP if rng.random() < 0.45 else (fresh.draw() or TOP)
        lo = round(rng.uniform(0.0, 0.9), 3)
        hi = round(rng.uniform(lo, 1.0), 3)
        group = "U" if rng.random() < 0.5 else "D"
        constraints.append(Constraint(lo, hi, phi, psi, group))
    if not constraints:
        constraints.append(Constraint(0.1, 0.9, Prop(props[0])))
    return make_lcn(constraints, props)


def random_chain_lcn(rng: random.Random, max_props: int = 6,
                     max_constraints: int = 8) -> Lcn:
    """Random collision-free model whose structure is a chain graph by
    construction: propositions live in ordered blocks, undirected-group
    consequents stay inside one block, and antecedents draw from strictly
    earlier blocks."""
    k = rng.randint(2, max_props)
    props = [f"P{i}" for i in range(k)]
    blocks: list[list[str]] = []
    i = 0
    while i < k:
        size = rng.randint(1, 3)
        blocks.append(props[i:i + size])
        i += size
    fresh = _FreshFormulas(rng, props)
    constraints: list[Constraint] = []
    want = rng.randint(1, max_constraints)
    guard = 0
    while len(constraints) < want and guard < 10 * want:
        guard += 1
        bi = rng.randrange(len(blocks))
        group = "U" if rng.random() < 0.6 else "D"
        if group == "U":
            phi_pool = blocks[bi]
        else:
            phi_pool = [p for blk in blocks[bi:] for p in blk]
        phi = fresh.draw(phi_pool)
        if phi is None:
            continue
        earlier = [p for blk in blocks[:bi] for p in blk]
        if earlier and rng.random() < 0.6:
            psi = fresh.draw(earlier) or TOP
        else:
            psi = TOP
        lo = round(rng.uniform(0.0, 0.9), 3)
        hi = round(rng.uniform(lo, 1.0), 3)
        constraints.append(Constraint(lo, hi, phi, psi, group))
    if not constraints:
        constraints.append(Constraint(0.1, 0.9, Prop(props[0])))
    return make_lcn(constraints, props)


def st_random_lcn():
    """Hypothesis strategy: a seeded random collision-free model."""
    from hypothesis import strategies as st

    return st.integers(min_value=0, max_value=10**6).map(
        lambda s: random_lcn(random.Random(s))
    )


# ---------------------------------------------------------------------------
# Independent reference implementations

def cmi(table: JointTable, statement: IndependenceStatement) -> float:
    """Conditional mutual information I(X;Y|Z) in nats, from first
    principles: sum p(x,y,z) log [ p(x,y,z) p(z) / (p(x,z) p(y,z)) ]."""
    pos = {p: j for j, p in enumerate(table.props)}

    def project(names: tuple[str, ...], index: int) -> tuple[int, ...]:
        return tuple((index >> pos[nm]) & 1 for nm in names)

    joint: dict[tuple, float] = {}
    for i, p in enumerate(table.probs):
        key = (project(statement.x, i), project(statement.y, i),
               project(statement.z, i))
        joint[key] = joint.get(key, 0.0) + p

    pxz: dict[tuple, float] = {}
    pyz: dict[tuple, float] = {}
    pz: dict[tuple, float] = {}
    for (xv, yv, zv), p in joint.items():
        pxz[(xv, zv)] = pxz.get((xv, zv), 0.0) + p
        pyz[(yv, zv)] = pyz.get((yv, zv), 0.0) + p
        pz[zv] = pz.get(zv, 0.0) + p

    total = 0.0
    for (xv, yv, zv), p in joint.items():
        if p <= 0.0:
            continue
        total += p * math.log(p * pz[zv] / (pxz[(xv, zv)] * pyz[(yv, zv)]))
    return total


def conditional_product_table(rng: random.Random, names, x, y, z) -> JointTable:
    """Table where y is independent of everything else given z: each entry
    is weight(z, non-y bits) * weight(z, y bit), normalized."""
    pos = {n: i for i, n in enumerate(names)}
    others = [n for n in names if n != y]
    weights_o: dict = {}
    weights_y: dict = {}
    probs = []
    for i in range(1 << len(names)):
        assign = {n: (i >> pos[n]) & 1 for n in names}
        zkey = tuple(assign[n] for n in z)
        okey = tuple(assign[n] for n in others)
        wo = weights_o.setdefault((zkey, okey), rng.uniform(0.1, 1.0))
        wy = weights_y.setdefault((zkey, assign[y]), rng.uniform(0.1, 1.0))
        probs.append(wo * wy)
    total = sum(probs)
    return JointTable(tuple(names), tuple(p / total for p in probs))


def naive_directed_cycle(g: MixedGraph) -> bool:
    """Directed-cycle detection by exhaustive simple-path search: a closed
    mixed path (all nodes distinct except the endpoints) using at least
    one directed edge."""
    steps: dict = {n: [] for n in g.nodes}
    for a, b in g.directed:
        steps[a].append((b, True))
    for a, b in g.undirected:
        steps[a].append((b, False))
        steps[b].append((a, False))

    def search(start, node, on_path, used_directed) -> bool:
        for nxt, is_dir in steps[node]:
            if nxt == start and (used_directed or is_dir):
                return True
            if nxt in on_path:
                continue
            if search(start, nxt, on_path | {nxt}, used_directed or is_dir):
                return True
        return False

    return any(search(s, s, frozenset([s]), False) for s in g.nodes)


def brute_force_cliques(g: MixedGraph) -> set[frozenset[str]]:
    """Maximal cliques of an undirected graph by subset enumeration."""
    assert not g.directed
    nodes = list(g.nodes)
    adjacent = {n: g.neighbors(n) for n in nodes}

    def is_clique(subset) -> bool:
        return all(b in adjacent[a] for a, b in combinations(subset, 2))

    cliques = []
    for size in range(1, len(nodes) + 1):
        for subset in combinations(nodes, size):
            if is_clique(subset):
                cliques.append(set(subset))
    maximal = [c for c in cliques
               if not any(c < other for other in cliques)]
    return {frozenset(n.name for n in c) for c in maximal}


def step_reach(g: MixedGraph, start) -> set:
    """Plain reachability over steps (directed edges forward, undirected
    edges both ways); the start node itself is excluded."""
    start = g.resolve(start)
    seen = {start}
    queue = [start]
    reached = set()
    while queue:
        n = queue.pop()
        for m in list(g.children(n)) + list(g.neighbors(n)):
            if m not in seen:
                seen.add(m)
                reached.add(m)
                queue.append(m)
    return reached


def chain_descendants_ref(g: MixedGraph, node) -> set:
    """On a chain graph, the descendants of A are exactly the
    step-reachable nodes outside A's chain component."""
    node = g.resolve(node)
    component = next(c for c in g.chain_components() if node in c)
    return {n for n in step_reach(g, node) if n not in component}


def chain_strict_descendants_ref(g: MixedGraph, node) -> set:
    """On a chain graph, the strict descendants of A are exactly the nodes
    step-reachable from A's direct directed children."""
    node = g.resolve(node)
    out = set()
    for child in g.children(node):
        out.add(child)
        out |= step_reach(g, child)
    out.discard(node)
    return out


def dag_mirror_table(g: MixedGraph, plan: FactorizationPlan,
                     seed: int) -> JointTable:
    """Mirror of the factorized sampler for DAG plans, built from per-node
    conditionals instead of potential/marginal quotients.  Reproduces the
    sampler's draw order exactly."""
    rng = random.Random(seed)
    conditionals = []
    for factor in plan.factors:
        assert len(factor.component) == 1 and len(factor.cliques) == 1
        (clique,) = factor.cliques
        clique_names = [n.name for n in clique]
        weights = [rng.uniform(WEIGHT_FLOOR, 1.0)
                   for _ in range(1 << len(clique_names))]
        conditionals.append((factor.component[0].name, clique_names, weights))

    names = [n.name for n in g.nodes]
    probs = []
    for i in range(1 << len(names)):
        assign = {nm: (i >> j) & 1 for j, nm in enumerate(names)}
        p = 1.0
        for node, clique_names, weights in conditionals:
            idx = sum(assign[nm] << j for j, nm in enumerate(clique_names))
            bit = clique_names.index(node)
            here = assign[node]
            idx0 = idx & ~(1 << bit)
            idx1 = idx0 | (1 << bit)
            p *= weights[idx if here else idx0] / (weights[idx0] + weights[idx1])
        probs.append(p)
    total = sum(probs)
    return JointTable(tuple(names), tuple(q / total for q in probs))
