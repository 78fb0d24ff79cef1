"""Sum-product network structures, file formats, and structural validation.

A network is a rooted DAG whose internal nodes are weighted sums and
products and whose leaves are indicator variables over discrete variables.
This module owns the in-memory graph representation, the line-based model
format, the Dirichlet prior format, and the CSV instance format.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Instance = Tuple[Optional[int], ...]

WEIGHT_NORMALIZATION_TOL = 1e-9


class ModelFormatError(ValueError):
    """Malformed model text; carries a 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PriorFormatError(ValueError):
    """Malformed prior text or hyperparameters inconsistent with the graph."""


class DataFormatError(ValueError):
    """Malformed instance data; carries 1-based row/column when known."""

    def __init__(self, message: str, row: Optional[int] = None, col: Optional[int] = None):
        where = ""
        if row is not None:
            where = f"row {row}"
            if col is not None:
                where += f", column {col}"
            message = f"{where}: {message}"
        super().__init__(message)
        self.row = row
        self.col = col


class StructureError(ValueError):
    """The graph violates a structural precondition (cycle, missing root, ...)."""


class NodeKind(Enum):
    SUM = "sum"
    PRODUCT = "prod"
    LEAF = "leaf"


class SpnGraph:
    """Immutable rooted DAG of sum, product, and indicator-leaf nodes.

    Construction is cheap and purely structural.  Semantic properties
    (single root, acyclicity, completeness, decomposability, weight
    normalization) are checked by :func:`validate`, which reports
    violations instead of raising.

    Node ids are dense integers ``0..num_nodes-1``.  Children lists are
    ordered; for sum nodes ``sum_weights[k]`` is aligned with
    ``children[k]``.  Instances are safe to share across threads.
    """

    __slots__ = (
        "kinds",
        "children",
        "sum_weights",
        "leaf_var",
        "leaf_value",
        "num_vars",
        "arities",
        "num_edges",
        "_parents",
        "_topo",
        "_roots",
        "_child_pos",
        "__weakref__",
    )

    def __init__(
        self,
        kinds: Sequence[NodeKind],
        children: Sequence[Sequence[int]],
        sum_weights: Mapping[int, Sequence[float]],
        leaf_var: Mapping[int, int],
        leaf_value: Mapping[int, int],
        num_vars: int,
        arities: Sequence[int],
    ):
        self.kinds = tuple(kinds)
        self.children = tuple(tuple(ch) for ch in children)
        self.sum_weights = {k: tuple(ws) for k, ws in sum_weights.items()}
        self.leaf_var = dict(leaf_var)
        self.leaf_value = dict(leaf_value)
        self.num_vars = num_vars
        self.arities = tuple(arities)
        self.num_edges = sum(len(ch) for ch in self.children)
        self._parents: Optional[Tuple[Tuple[int, ...], ...]] = None
        self._topo: Optional[Tuple[int, ...]] = None
        self._child_pos: Optional[Dict[Tuple[int, int], int]] = None
        has_parent = [False] * len(self.kinds)
        for ch in self.children:
            for c in ch:
                has_parent[c] = True
        self._roots = tuple(i for i, hp in enumerate(has_parent) if not hp)

    @property
    def num_nodes(self) -> int:
        return len(self.kinds)

    @property
    def roots(self) -> Tuple[int, ...]:
        """All parentless nodes (a valid graph has exactly one)."""
        return self._roots

    @property
    def root(self) -> int:
        if len(self._roots) != 1:
            raise StructureError(
                f"expected exactly one parentless node, found {len(self._roots)}: {self._roots}"
            )
        return self._roots[0]

    @property
    def parents(self) -> Tuple[Tuple[int, ...], ...]:
        if self._parents is None:
            acc: List[List[int]] = [[] for _ in range(self.num_nodes)]
            for p, ch in enumerate(self.children):
                for c in ch:
                    acc[c].append(p)
            self._parents = tuple(tuple(ps) for ps in acc)
        return self._parents

    @property
    def topo_order(self) -> Tuple[int, ...]:
        if self._topo is None:
            self._topo = topological_order(self)
        return self._topo

    def is_sum(self, node: int) -> bool:
        return self.kinds[node] is NodeKind.SUM

    def is_product(self, node: int) -> bool:
        return self.kinds[node] is NodeKind.PRODUCT

    def is_leaf(self, node: int) -> bool:
        return self.kinds[node] is NodeKind.LEAF

    def sum_nodes(self) -> List[int]:
        return [i for i, k in enumerate(self.kinds) if k is NodeKind.SUM]

    def child_position(self, parent: int, child: int) -> int:
        """Position of ``child`` in ``children[parent]`` (edges are unique pairs)."""
        if self._child_pos is None:
            pos: Dict[Tuple[int, int], int] = {}
            for p, ch in enumerate(self.children):
                for i, c in enumerate(ch):
                    pos[(p, c)] = i
            self._child_pos = pos
        return self._child_pos[(parent, child)]

    def sum_edges(self) -> List[Tuple[int, int]]:
        """All (sum node, child) pairs in (parent, child position) order."""
        return [(k, c) for k in self.sum_nodes() for c in self.children[k]]

    def with_sum_weights(self, weights: Mapping[int, Sequence[float]]) -> "SpnGraph":
        """Copy of this graph with replaced sum-edge weights."""
        new_weights = {}
        for k in self.sum_weights:
            ws = weights[k]
            if len(ws) != len(self.children[k]):
                raise ValueError(f"weight vector for node {k} has wrong length")
            new_weights[k] = tuple(ws)
        return SpnGraph(
            self.kinds, self.children, new_weights, self.leaf_var, self.leaf_value,
            self.num_vars, self.arities,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpnGraph):
            return NotImplemented
        return (
            self.kinds == other.kinds
            and self.children == other.children
            and self.sum_weights == other.sum_weights
            and self.leaf_var == other.leaf_var
            and self.leaf_value == other.leaf_value
            and self.num_vars == other.num_vars
            and self.arities == other.arities
        )

    def __hash__(self):
        return object.__hash__(self)

    def __repr__(self):
        return (
            f"SpnGraph(nodes={self.num_nodes}, edges={self.num_edges}, "
            f"vars={self.num_vars})"
        )


class GraphBuilder:
    """Incremental constructor enforcing edge-level structural rules."""

    def __init__(self):
        self._kinds: List[NodeKind] = []
        self._children: List[List[int]] = []
        self._weights: Dict[int, List[float]] = {}
        self._leaf_var: Dict[int, int] = {}
        self._leaf_value: Dict[int, int] = {}
        self._edge_set: set = set()

    @property
    def num_nodes(self) -> int:
        return len(self._kinds)

    def _add_node(self, kind: NodeKind) -> int:
        self._kinds.append(kind)
        self._children.append([])
        return len(self._kinds) - 1

    def add_sum(self) -> int:
        nid = self._add_node(NodeKind.SUM)
        self._weights[nid] = []
        return nid

    def add_product(self) -> int:
        return self._add_node(NodeKind.PRODUCT)

    def add_leaf(self, var: int, value: int) -> int:
        if var < 0 or value < 0:
            raise ValueError("leaf variable and value must be non-negative")
        nid = self._add_node(NodeKind.LEAF)
        self._leaf_var[nid] = var
        self._leaf_value[nid] = value
        return nid

    def add_edge(self, parent: int, child: int, weight: Optional[float] = None):
        n = len(self._kinds)
        if not (0 <= parent < n):
            raise ValueError(f"unknown node id {parent}")
        if not (0 <= child < n):
            raise ValueError(f"unknown node id {child}")
        if (parent, child) in self._edge_set:
            raise ValueError(f"duplicate edge {parent} -> {child}")
        if self._kinds[parent] is NodeKind.SUM:
            if weight is None:
                raise ValueError(f"missing weight on sum edge {parent} -> {child}")
            self._weights[parent].append(weight)
        elif weight is not None:
            raise ValueError(f"weight on a non-sum edge {parent} -> {child}")
        self._children[parent].append(child)
        self._edge_set.add((parent, child))

    def build(self, num_vars: Optional[int] = None) -> SpnGraph:
        max_var = max(self._leaf_var.values(), default=-1)
        inferred_vars = max_var + 1
        if num_vars is None:
            num_vars = inferred_vars
        elif num_vars < inferred_vars:
            raise ValueError(
                f"declared {num_vars} variables but a leaf references variable {max_var}"
            )
        arities = [0] * num_vars
        for nid, var in self._leaf_var.items():
            arities[var] = max(arities[var], self._leaf_value[nid] + 1)
        return SpnGraph(
            self._kinds, self._children, self._weights,
            self._leaf_var, self._leaf_value, num_vars, arities,
        )


def topological_order(graph: SpnGraph) -> Tuple[int, ...]:
    """Children-before-parents order, deterministic for a given graph.

    Nodes are sorted by height above the leaves, ties broken by ascending
    id, so all leaves come first and the root last.  Raises
    :class:`StructureError` naming one offending edge if the graph contains
    a cycle.
    """
    n = graph.num_nodes
    pending = [len(ch) for ch in graph.children]
    parents = graph.parents
    level = [0] * n
    queue = [i for i in range(n) if pending[i] == 0]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        lv = level[v] + 1
        for p in parents[v]:
            if lv > level[p]:
                level[p] = lv
            pending[p] -= 1
            if pending[p] == 0:
                queue.append(p)
    if head < n:
        stuck = set(range(n)) - set(queue)
        edge = _find_cycle_edge(graph, stuck)
        raise StructureError(f"cycle detected through edge {edge[0]} -> {edge[1]}")
    return tuple(sorted(range(n), key=lambda v: (level[v], v)))


def _find_cycle_edge(graph: SpnGraph, stuck: set) -> Tuple[int, int]:
    start = min(stuck)
    seen = {}
    v = start
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = next(c for c in graph.children[v] if c in stuck)
    return path[-1], v


@dataclass(frozen=True)
class Violation:
    check: str
    node: Optional[int]
    message: str

    def __str__(self):
        where = f" at node {self.node}" if self.node is not None else ""
        return f"{self.check}{where}: {self.message}"


@dataclass
class ValidationReport:
    """Outcome of all structural checks plus per-node scopes.

    Scopes are stored as variable-index bitmasks; use :meth:`scope_set` for
    a plain set view.  ``scope_masks`` is ``None`` when the graph is cyclic
    (scopes are undefined then).
    """

    violations: List[Violation]
    scope_masks: Optional[List[int]]
    checks_run: List[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def scope_set(self, node: int) -> frozenset:
        if self.scope_masks is None:
            raise StructureError("scopes unavailable: graph is cyclic")
        mask = self.scope_masks[node]
        out = []
        var = 0
        while mask:
            if mask & 1:
                out.append(var)
            mask >>= 1
            var += 1
        return frozenset(out)

    def failed_checks(self) -> List[str]:
        seen = []
        for v in self.violations:
            if v.check not in seen:
                seen.append(v.check)
        return seen

    def summary(self) -> str:
        lines = []
        failed = set(self.failed_checks())
        for check in self.checks_run:
            lines.append(f"{check}: {'FAIL' if check in failed else 'ok'}")
        for v in self.violations:
            lines.append(f"violation {v}")
        lines.append("valid" if self.ok else f"invalid ({len(self.violations)} violations)")
        return "\n".join(lines)


_CHECKS = (
    "single-root",
    "acyclic",
    "reachable",
    "node-structure",
    "completeness",
    "decomposability",
    "weight-normalization",
)


def validate(graph: SpnGraph, tol: float = WEIGHT_NORMALIZATION_TOL) -> ValidationReport:
    """Check single-rootedness, acyclicity, reachability, completeness,
    decomposability, and local weight normalization.

    Violations become report entries, never exceptions.
    """
    violations: List[Violation] = []

    if len(graph.roots) != 1:
        violations.append(Violation(
            "single-root", None,
            f"expected exactly one parentless node, found {list(graph.roots)}",
        ))

    try:
        order = graph.topo_order
    except StructureError as exc:
        violations.append(Violation("acyclic", None, str(exc)))
        return ValidationReport(violations, None, list(_CHECKS))

    if len(graph.roots) == 1:
        reached = {graph.root}
        stack = [graph.root]
        while stack:
            v = stack.pop()
            for c in graph.children[v]:
                if c not in reached:
                    reached.add(c)
                    stack.append(c)
        for v in range(graph.num_nodes):
            if v not in reached:
                violations.append(Violation("reachable", v, "not reachable from the root"))

    for v in range(graph.num_nodes):
        kind = graph.kinds[v]
        n_children = len(graph.children[v])
        if kind is NodeKind.LEAF:
            if n_children:
                violations.append(Violation("node-structure", v, "leaf node has children"))
            if graph.leaf_var[v] >= graph.num_vars:
                violations.append(Violation(
                    "node-structure", v,
                    f"leaf variable {graph.leaf_var[v]} out of range",
                ))
        elif n_children < 1:
            violations.append(Violation("node-structure", v, f"{kind.value} node has no children"))

    # Scopes bottom-up; bitmask per node keeps this linear in total scope size.
    scopes = [0] * graph.num_nodes
    for v in order:
        if graph.kinds[v] is NodeKind.LEAF:
            scopes[v] = 1 << graph.leaf_var[v]
        else:
            mask = 0
            for c in graph.children[v]:
                mask |= scopes[c]
            scopes[v] = mask

    for v in range(graph.num_nodes):
        ch = graph.children[v]
        if graph.kinds[v] is NodeKind.SUM and ch:
            first = scopes[ch[0]]
            if any(scopes[c] != first for c in ch[1:]):
                violations.append(Violation(
                    "completeness", v, "children of sum node have differing scopes",
                ))
        elif graph.kinds[v] is NodeKind.PRODUCT and ch:
            union = 0
            total_bits = 0
            for c in ch:
                union |= scopes[c]
                total_bits += _popcount(scopes[c])
            if _popcount(union) != total_bits:
                violations.append(Violation(
                    "decomposability", v, "children of product node have overlapping scopes",
                ))

    for k, ws in graph.sum_weights.items():
        if any(w <= 0.0 for w in ws):
            violations.append(Violation(
                "weight-normalization", k, "sum weights must be strictly positive",
            ))
            continue
        total = math.fsum(ws)
        if abs(total - 1.0) > tol:
            violations.append(Violation(
                "weight-normalization", k,
                f"sum weights add to {total!r}, expected 1 within {tol:g}",
            ))

    return ValidationReport(violations, scopes, list(_CHECKS))


def _popcount(mask: int) -> int:
    return mask.bit_count()


# ---------------------------------------------------------------------------
# Model file format
#
#   vars <n>                     optional header
#   node <id> sum
#   node <id> prod
#   node <id> leaf <var> <value>
#   edge <parent> <child> [weight]    weight required iff parent is a sum
#
# '#' starts a comment; blank lines are ignored.
# ---------------------------------------------------------------------------

def parse_model(text: str) -> SpnGraph:
    declared_vars: Optional[int] = None
    nodes: Dict[int, Tuple[NodeKind, Optional[int], Optional[int], int]] = {}
    edges: List[Tuple[int, int, Optional[float], int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        stmt = tokens[0]
        if stmt == "vars":
            if len(tokens) != 2:
                raise ModelFormatError("expected 'vars <n>'", lineno)
            declared_vars = _parse_int(tokens[1], "variable count", lineno)
        elif stmt == "node":
            if len(tokens) < 3:
                raise ModelFormatError("expected 'node <id> <kind> ...'", lineno)
            nid = _parse_int(tokens[1], "node id", lineno)
            if nid in nodes:
                raise ModelFormatError(f"duplicate node id {nid}", lineno)
            kind_word = tokens[2]
            if kind_word == "sum" or kind_word == "prod":
                if len(tokens) != 3:
                    raise ModelFormatError(f"'{kind_word}' node takes no arguments", lineno)
                kind = NodeKind.SUM if kind_word == "sum" else NodeKind.PRODUCT
                nodes[nid] = (kind, None, None, lineno)
            elif kind_word == "leaf":
                if len(tokens) != 5:
                    raise ModelFormatError("expected 'node <id> leaf <var> <value>'", lineno)
                var = _parse_int(tokens[3], "leaf variable", lineno)
                value = _parse_int(tokens[4], "leaf value", lineno)
                nodes[nid] = (NodeKind.LEAF, var, value, lineno)
            else:
                raise ModelFormatError(f"unknown node kind '{kind_word}'", lineno)
        elif stmt == "edge":
            if len(tokens) not in (3, 4):
                raise ModelFormatError("expected 'edge <parent> <child> [weight]'", lineno)
            parent = _parse_int(tokens[1], "parent id", lineno)
            child = _parse_int(tokens[2], "child id", lineno)
            weight = None
            if len(tokens) == 4:
                try:
                    weight = float(tokens[3])
                except ValueError:
                    raise ModelFormatError(f"bad weight '{tokens[3]}'", lineno) from None
            edges.append((parent, child, weight, lineno))
        else:
            raise ModelFormatError(f"unknown statement '{stmt}'", lineno)

    if not nodes:
        raise ModelFormatError("model declares no nodes")
    ids = sorted(nodes)
    if ids != list(range(len(ids))):
        raise ModelFormatError(f"node ids must be dense 0..{len(ids) - 1}, got {ids}")

    builder = GraphBuilder()
    for nid in ids:
        kind, var, value, lineno = nodes[nid]
        try:
            if kind is NodeKind.SUM:
                builder.add_sum()
            elif kind is NodeKind.PRODUCT:
                builder.add_product()
            else:
                builder.add_leaf(var, value)
        except ValueError as exc:
            raise ModelFormatError(str(exc), lineno) from None

    for parent, child, weight, lineno in edges:
        if parent not in nodes:
            raise ModelFormatError(f"unknown node id {parent}", lineno)
        if child not in nodes:
            raise ModelFormatError(f"unknown node id {child}", lineno)
        try:
            builder.add_edge(parent, child, weight)
        except ValueError as exc:
            raise ModelFormatError(str(exc), lineno) from None

    try:
        return builder.build(num_vars=declared_vars)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def serialize_model(graph: SpnGraph) -> str:
    """Inverse of :func:`parse_model`; round-trips nodes, edges, order, weights."""
    out = [f"vars {graph.num_vars}"]
    for nid, kind in enumerate(graph.kinds):
        if kind is NodeKind.SUM:
            out.append(f"node {nid} sum")
        elif kind is NodeKind.PRODUCT:
            out.append(f"node {nid} prod")
        else:
            out.append(f"node {nid} leaf {graph.leaf_var[nid]} {graph.leaf_value[nid]}")
    for nid, ch in enumerate(graph.children):
        if graph.kinds[nid] is NodeKind.SUM:
            for pos, c in enumerate(ch):
                out.append(f"edge {nid} {c} {graph.sum_weights[nid][pos]!r}")
        else:
            for c in ch:
                out.append(f"edge {nid} {c}")
    return "\n".join(out) + "\n"


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ModelFormatError(f"bad {what} '{token}'", lineno) from None
    if value < 0:
        raise ModelFormatError(f"{what} must be non-negative, got {value}", lineno)
    return value


# ---------------------------------------------------------------------------
# Dirichlet prior: one hyperparameter per sum edge
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletPrior:
    """Per-sum-node positive hyperparameter vectors, aligned with child order."""

    alpha: Dict[int, Tuple[float, ...]]

    def __post_init__(self):
        for k, vec in self.alpha.items():
            if not vec:
                raise ValueError(f"empty hyperparameter vector for node {k}")
            if any(a <= 0.0 for a in vec):
                raise ValueError(f"non-positive hyperparameter at node {k}")

    @classmethod
    def uniform(cls, graph: SpnGraph) -> "DirichletPrior":
        return cls({k: (1.0,) * len(graph.children[k]) for k in graph.sum_nodes()})

    @classmethod
    def for_graph(cls, graph: SpnGraph, alpha: Mapping[int, Sequence[float]]) -> "DirichletPrior":
        """Prior from a partial mapping; missing sum nodes default to all-ones."""
        full: Dict[int, Tuple[float, ...]] = {}
        for k in graph.sum_nodes():
            vec = alpha.get(k)
            if vec is None:
                full[k] = (1.0,) * len(graph.children[k])
            else:
                if len(vec) != len(graph.children[k]):
                    raise PriorFormatError(
                        f"node {k}: {len(vec)} hyperparameters for {len(graph.children[k])} children"
                    )
                full[k] = tuple(float(a) for a in vec)
        extra = set(alpha) - set(full)
        if extra:
            raise PriorFormatError(f"node {min(extra)} is not a sum node of this graph")
        try:
            return cls(full)
        except ValueError as exc:
            raise PriorFormatError(str(exc)) from None


def parse_prior(text: str, graph: SpnGraph) -> DirichletPrior:
    """Parse ``<sum-node-id>: a1 a2 ... ak`` lines; missing nodes get all-ones."""
    sums = set(graph.sum_nodes())
    alpha: Dict[int, List[float]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise PriorFormatError(f"line {lineno}: expected '<node-id>: a1 a2 ...'")
        try:
            nid = int(head.strip())
        except ValueError:
            raise PriorFormatError(f"line {lineno}: bad node id '{head.strip()}'") from None
        if nid not in sums:
            raise PriorFormatError(f"line {lineno}: unknown node id {nid} (not a sum node)")
        if nid in alpha:
            raise PriorFormatError(f"line {lineno}: duplicate entry for node {nid}")
        try:
            vec = [float(tok) for tok in tail.split()]
        except ValueError:
            raise PriorFormatError(f"line {lineno}: bad hyperparameter value") from None
        if len(vec) != len(graph.children[nid]):
            raise PriorFormatError(
                f"line {lineno}: node {nid} has {len(graph.children[nid])} children "
                f"but {len(vec)} hyperparameters"
            )
        if any(a <= 0.0 for a in vec):
            raise PriorFormatError(f"line {lineno}: non-positive hyperparameter")
        alpha[nid] = vec
    return DirichletPrior.for_graph(graph, alpha)


def serialize_prior(prior: DirichletPrior) -> str:
    lines = []
    for k in sorted(prior.alpha):
        lines.append(f"{k}: " + " ".join(repr(a) for a in prior.alpha[k]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Instance data: CSV rows of category integers, '?' marks a marginalized cell
# ---------------------------------------------------------------------------

def parse_cell(token: str, graph: SpnGraph, var: int, row: Optional[int] = None) -> Optional[int]:
    token = token.strip()
    if token == "?":
        return None
    try:
        value = int(token)
    except ValueError:
        raise DataFormatError(f"bad cell '{token}'", row, var + 1) from None
    if not (0 <= value < graph.arities[var]):
        raise DataFormatError(
            f"value {value} out of range for variable {var} (arity {graph.arities[var]})",
            row, var + 1,
        )
    return value


def parse_instance(text: str, graph: SpnGraph, row: Optional[int] = None) -> Instance:
    """One CSV row -> instance tuple (None marks a marginalized variable)."""
    cells = next(csv.reader(io.StringIO(text)))
    if len(cells) != graph.num_vars:
        raise DataFormatError(
            f"expected {graph.num_vars} cells, got {len(cells)}", row,
        )
    return tuple(parse_cell(tok, graph, var, row) for var, tok in enumerate(cells))


def parse_data(text: str, graph: SpnGraph) -> List[Instance]:
    instances = []
    for rowno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        instances.append(parse_instance(raw, graph, row=rowno))
    return instances


def format_instance(instance: Instance) -> str:
    return ",".join("?" if x is None else str(x) for x in instance)


def marginal_instance(graph: SpnGraph) -> Instance:
    """The all-marginalized instance (evaluates the normalization constant)."""
    return (None,) * graph.num_vars
