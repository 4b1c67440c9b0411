"""Finite vertex-weighted graphs and their reduced size functions.

The measuring object is a *size pair*: a finite connected graph together
with a real value attached to every vertex.  The reduced size function
counts, for ``x < y``, the connected components of the sublevel graph at
``y`` (vertices with value <= y, edges whose endpoints both qualify) that
contain at least one vertex with value <= x.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterable, Mapping, Optional, Sequence, Tuple

from ._rational import as_fraction

__all__ = [
    "ParseError",
    "ModelViolationError",
    "DisconnectedGraphError",
    "SizePair",
    "SublevelPartition",
    "parse_size_pair",
    "load_size_pair",
    "sublevel_components",
    "reduced_size_function",
    "size_function_on_grid",
    "shifted_inequality_check",
]


class ParseError(ValueError):
    """A vertex or edge line could not be parsed.

    ``line`` carries the 1-based number of the offending line.
    """

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line


class ModelViolationError(ValueError):
    """The input is well-formed but breaks a model invariant."""


class DisconnectedGraphError(ModelViolationError):
    """The measuring graph must be connected."""

    def __init__(self, component_count: int):
        super().__init__(f"graph is disconnected ({component_count} components)")
        self.component_count = component_count


def _check_value(value, owner) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
        raise ModelViolationError(
            f"value of vertex {owner!r} must be a real number, got {type(value).__name__}"
        )
    if isinstance(value, float) and not math.isfinite(value):
        raise ModelViolationError(f"value of vertex {owner!r} must be finite, got {value!r}")


class SizePair:
    """A finite connected graph with a real value on every vertex.

    ``vertices`` is a mapping (or iterable of pairs) from vertex id to value;
    ``edges`` is an iterable of unordered id pairs.  Ids may be any hashable
    objects (files use strings).  Construction validates the model:
    non-empty, finite real values, no self-loops, no duplicate edges, every
    edge endpoint known, and the graph connected.
    """

    __slots__ = ("_values", "_adj", "_edges")

    def __init__(self, vertices, edges=()):
        if isinstance(vertices, Mapping):
            items = list(vertices.items())
        else:
            items = [(vid, value) for vid, value in vertices]
        if not items:
            raise ModelViolationError("a size pair needs at least one vertex")
        values: Dict[Hashable, object] = {}
        for vid, value in items:
            if vid in values:
                raise ModelViolationError(f"duplicate vertex id {vid!r}")
            _check_value(value, vid)
            values[vid] = value
        adj = {vid: set() for vid in values}
        seen = set()
        for edge in edges:
            u, v = edge
            for end in (u, v):
                if end not in values:
                    raise ModelViolationError(f"edge ({u!r}, {v!r}) references unknown vertex {end!r}")
            if u == v:
                raise ModelViolationError(f"self-loop at vertex {u!r}")
            key = frozenset((u, v))
            if key in seen:
                raise ModelViolationError(f"duplicate edge ({u!r}, {v!r})")
            seen.add(key)
            adj[u].add(v)
            adj[v].add(u)
        self._values = values
        self._adj = {vid: tuple(sorted(ns, key=str)) for vid, ns in adj.items()}
        self._edges = tuple(
            sorted((tuple(sorted(e, key=str)) for e in seen), key=lambda e: (str(e[0]), str(e[1])))
        )
        count = self._component_count()
        if count != 1:
            raise DisconnectedGraphError(count)

    def _component_count(self) -> int:
        remaining = set(self._values)
        count = 0
        while remaining:
            count += 1
            stack = [next(iter(remaining))]
            remaining.discard(stack[0])
            while stack:
                v = stack.pop()
                for u in self._adj[v]:
                    if u in remaining:
                        remaining.discard(u)
                        stack.append(u)
        return count

    @property
    def vertex_ids(self) -> Tuple[Hashable, ...]:
        return tuple(sorted(self._values, key=str))

    @property
    def edges(self) -> Tuple[Tuple[Hashable, Hashable], ...]:
        return self._edges

    @property
    def n_vertices(self) -> int:
        return len(self._values)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def value(self, vid):
        return self._values[vid]

    @property
    def vertex_values(self) -> Dict[Hashable, object]:
        return dict(self._values)

    def neighbors(self, vid) -> Tuple[Hashable, ...]:
        return self._adj[vid]

    def degree(self, vid) -> int:
        return len(self._adj[vid])

    @property
    def min_value(self):
        return min(self._values.values())

    @property
    def max_value(self):
        return max(self._values.values())

    @property
    def critical_values(self) -> Tuple:
        """Sorted distinct vertex values."""
        return tuple(sorted(set(self._values.values())))

    def __eq__(self, other):
        if not isinstance(other, SizePair):
            return NotImplemented
        return self._values == other._values and set(self._edges) == set(other._edges)

    def __repr__(self):
        return f"SizePair({self.n_vertices} vertices, {self.n_edges} edges)"


def _iter_lines(text):
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [line.rstrip("\n") for line in text]
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line:
            yield number, line


def parse_size_pair(vertex_text, edge_text) -> SizePair:
    """Parse the two-file format.

    Vertex lines read ``id,value`` (the split is on the last comma, so ids
    may contain commas; values are parsed as 64-bit floats).  Edge lines
    read ``u,v``.  Blank lines are ignored.  Malformed lines raise
    :class:`ParseError` with the 1-based line number.
    """
    vertices = []
    for number, line in _iter_lines(vertex_text):
        vid, sep, value_text = line.rpartition(",")
        if not sep:
            raise ParseError(f"vertex line {number}: expected 'id,value', got {line!r}", number)
        try:
            value = float(value_text)
        except ValueError:
            raise ParseError(
                f"vertex line {number}: could not parse value {value_text.strip()!r}", number
            ) from None
        vertices.append((vid.strip(), value))
    edges = []
    for number, line in _iter_lines(edge_text):
        fields = [field.strip() for field in line.split(",")]
        if len(fields) != 2:
            raise ParseError(f"edge line {number}: expected 'u,v', got {line!r}", number)
        edges.append((fields[0], fields[1]))
    return SizePair(vertices, edges)


def load_size_pair(vertex_path, edge_path) -> SizePair:
    """Read a size pair from a vertex file and an edge file."""
    with open(vertex_path, "r", encoding="utf-8") as fh:
        vertex_text = fh.read()
    with open(edge_path, "r", encoding="utf-8") as fh:
        edge_text = fh.read()
    return parse_size_pair(vertex_text, edge_text)


@dataclass(frozen=True)
class SublevelPartition:
    """The connected components of a sublevel graph at threshold ``y``."""

    y: object
    components: Tuple[frozenset, ...]

    @property
    def count(self) -> int:
        return len(self.components)

    def component_of(self, vid) -> Optional[frozenset]:
        for component in self.components:
            if vid in component:
                return component
        return None


def sublevel_components(sp: SizePair, y) -> SublevelPartition:
    """Components of the subgraph induced by vertices with value <= y.

    An edge belongs to the sublevel graph iff both endpoints do.  For y
    below the minimum value the partition is empty.
    """
    active = {v for v in sp.vertex_ids if sp.value(v) <= y}
    components = []
    remaining = set(active)
    while remaining:
        start = next(iter(remaining))
        remaining.discard(start)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in sp.neighbors(v):
                if u in active and u not in seen:
                    seen.add(u)
                    remaining.discard(u)
                    stack.append(u)
        components.append(frozenset(seen))
    components.sort(key=lambda comp: str(min(comp, key=str)))
    return SublevelPartition(y=y, components=tuple(components))


def reduced_size_function(sp: SizePair, x, y) -> int:
    """Number of components of the sublevel graph at ``y`` that reach value <= x.

    Defined for ``x < y`` only; 0 when x is below the minimum value, 1 once
    both arguments clear the maximum value (the graph is connected).
    """
    if not x < y:
        raise ValueError(f"reduced size function requires x < y, got x={x!r}, y={y!r}")
    partition = sublevel_components(sp, y)
    count = 0
    for component in partition.components:
        if any(sp.value(v) <= x for v in component):
            count += 1
    return count


class _UnionFind:
    """Union-find keeping the minimum vertex value of each class."""

    __slots__ = ("parent", "birth")

    def __init__(self):
        self.parent = {}
        self.birth = {}

    def add(self, v, value):
        self.parent[v] = v
        self.birth[v] = value

    def find(self, v):
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, u, v) -> bool:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if self.birth[rv] < self.birth[ru]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        if self.birth[rv] < self.birth[ru]:
            self.birth[ru] = self.birth[rv]
        return True


def size_function_on_grid(sp: SizePair, xs: Sequence, ys: Sequence) -> Dict[Tuple, int]:
    """Reduced size function on a grid, in one ascending sweep.

    Returns ``{(x, y): value}`` for every pair with ``x < y``.  Equals
    :func:`reduced_size_function` pointwise; it just avoids recomputing the
    sublevel partition per query.
    """
    xs_sorted = sorted(set(xs))
    ys_sorted = sorted(set(ys))
    order = sorted(sp.vertex_ids, key=lambda v: (sp.value(v), str(v)))
    uf = _UnionFind()
    active = set()
    result: Dict[Tuple, int] = {}
    index = 0
    n = len(order)
    for y in ys_sorted:
        while index < n and sp.value(order[index]) <= y:
            v = order[index]
            uf.add(v, sp.value(v))
            active.add(v)
            for u in sp.neighbors(v):
                if u in active:
                    uf.union(v, u)
            index += 1
        births = sorted(uf.birth[root] for root in {uf.find(v) for v in active})
        for x in xs_sorted:
            if x < y:
                result[(x, y)] = bisect_right(births, x)
    return result


def _quarter_gap_grid(values: Iterable) -> Tuple[Fraction, ...]:
    """Distinct values plus offsets of a quarter of the minimal gap."""
    base = sorted({as_fraction(v) for v in values})
    if not base:
        return ()
    if len(base) == 1:
        step = Fraction(1, 4)
    else:
        step = min(b - a for a, b in zip(base, base[1:])) / 4
    grid = set(base)
    for v in base:
        grid.add(v - step)
        grid.add(v + step)
    return tuple(sorted(grid))


def shifted_inequality_check(sp1: SizePair, sp2: SizePair, f: Mapping, h, grid=None) -> bool:
    """Check the shifted comparison of two size functions along an isomorphism.

    ``f`` must be a graph isomorphism from ``sp1`` onto ``sp2`` and ``h`` an
    upper bound for ``max |value1(v) - value2(f(v))|`` (both are validated;
    violations raise ``ValueError``).  The check itself evaluates
    ``l1(x - h, y + h) <= l2(x, y)`` at every grid point and returns whether
    all of them hold.  ``grid`` is an iterable of ``(x, y)`` pairs with
    ``x < y``; when omitted it defaults to all such pairs drawn from the
    critical values of both graphs plus/minus a quarter of the minimal gap.
    """
    ids1, ids2 = set(sp1.vertex_ids), set(sp2.vertex_ids)
    if set(f.keys()) != ids1 or set(f.values()) != ids2 or len(f) != len(ids2):
        raise ValueError("f is not a bijection between the vertex sets")
    if sp1.n_edges != sp2.n_edges:
        raise ValueError("f is not an isomorphism: edge counts differ")
    edges2 = {frozenset(e) for e in sp2.edges}
    for u, v in sp1.edges:
        if frozenset((f[u], f[v])) not in edges2:
            raise ValueError(f"f is not an isomorphism: edge ({u!r}, {v!r}) is not preserved")
    h = as_fraction(h)
    if h < 0:
        raise ValueError(f"h must be non-negative, got {h}")
    actual = max(abs(as_fraction(sp1.value(v)) - as_fraction(sp2.value(f[v]))) for v in ids1)
    if h < actual:
        raise ValueError(f"h={h} is below the sup-norm value distance {actual} along f")
    if grid is None:
        coords = _quarter_gap_grid(list(sp1.critical_values) + list(sp2.critical_values))
        pairs = [(x, y) for x in coords for y in coords if x < y]
    else:
        pairs = []
        for point in grid:
            try:
                x, y = point
            except (TypeError, ValueError):
                raise ValueError(f"grid entries must be (x, y) pairs, got {point!r}") from None
            x, y = as_fraction(x), as_fraction(y)
            if not x < y:
                raise ValueError(f"grid point ({x}, {y}) is outside the domain x < y")
            pairs.append((x, y))
    if not pairs:
        return True
    left = size_function_on_grid(sp1, [x - h for x, _ in pairs], [y + h for _, y in pairs])
    right = size_function_on_grid(sp2, [x for x, _ in pairs], [y for _, y in pairs])
    return all(left[(x - h, y + h)] <= right[(x, y)] for x, y in pairs)
