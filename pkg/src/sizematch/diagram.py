"""Cornerpoint diagrams of reduced size functions.

A diagram is the abscissa of the cornerpoint at infinity (the minimum
vertex value; the graph is connected, so there is exactly one) plus a
finite multiset of proper cornerpoints strictly above the diagonal.  The
diagram represents the whole reduced size function:

    l(x, y)  ==  [infinity_x <= x]  +  sum of multiplicities over
                 proper cornerpoints with  px <= x  and  py > y.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right, insort
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

from ._rational import as_fraction
from .core import SizePair, reduced_size_function, size_function_on_grid

__all__ = [
    "ExtendedPoint",
    "Diagram",
    "extract_diagram",
    "evaluate_diagram",
    "evaluate_diagram_on_grid",
    "multiplicity",
    "multiplicity_at_infinity",
    "multiplicity_grid",
    "count_in_square",
]


@dataclass(frozen=True)
class ExtendedPoint:
    """A point of the extended half-plane x < y (y may be +infinity)."""

    x: Fraction
    y: object

    def __post_init__(self):
        object.__setattr__(self, "x", as_fraction(self.x))
        if not (isinstance(self.y, float) and math.isinf(self.y) and self.y > 0):
            object.__setattr__(self, "y", as_fraction(self.y))
        if not self.y > self.x:
            raise ValueError(f"point must lie strictly above the diagonal, got ({self.x}, {self.y})")

    @classmethod
    def at_infinity(cls, x) -> "ExtendedPoint":
        return cls(as_fraction(x), math.inf)

    @property
    def is_at_infinity(self) -> bool:
        return isinstance(self.y, float) and math.isinf(self.y)

    @property
    def persistence(self):
        """y - x (infinite for points at infinity)."""
        return math.inf if self.is_at_infinity else self.y - self.x

    def __repr__(self):
        y = "inf" if self.is_at_infinity else str(self.y)
        return f"ExtendedPoint({self.x}, {y})"


def _coerce_point_entry(entry) -> Tuple[ExtendedPoint, int]:
    if isinstance(entry, ExtendedPoint):
        return entry, 1
    seq = tuple(entry)
    if len(seq) == 2 and isinstance(seq[0], (ExtendedPoint, tuple, list)):
        raw, mult = seq
        point = raw if isinstance(raw, ExtendedPoint) else ExtendedPoint(raw[0], raw[1])
        if isinstance(mult, bool) or not isinstance(mult, int) or mult <= 0:
            raise ValueError(f"multiplicity must be a positive integer, got {mult!r}")
        return point, mult
    if len(seq) == 2:
        return ExtendedPoint(seq[0], seq[1]), 1
    if len(seq) == 3:
        point, mult = _coerce_point_entry(((seq[0], seq[1]), seq[2]))
        return point, mult
    raise ValueError(f"cannot interpret diagram point entry {entry!r}")


class Diagram:
    """Multiset of proper cornerpoints plus the cornerpoint at infinity."""

    __slots__ = ("_infinity_x", "_points")

    def __init__(self, infinity_x, points: Iterable = ()):
        self._infinity_x = as_fraction(infinity_x)
        counts: Dict[ExtendedPoint, int] = {}
        for entry in points:
            point, mult = _coerce_point_entry(entry)
            if point.is_at_infinity:
                raise ValueError("the cornerpoint at infinity is given by infinity_x, not a point")
            counts[point] = counts.get(point, 0) + mult
        self._points = tuple(sorted(counts.items(), key=lambda pm: (pm[0].x, pm[0].y)))

    @property
    def infinity_x(self) -> Fraction:
        return self._infinity_x

    @property
    def points(self) -> Tuple[Tuple[ExtendedPoint, int], ...]:
        """Proper cornerpoints with multiplicities, sorted by (x, y)."""
        return self._points

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self._points)

    def expanded(self) -> Tuple[ExtendedPoint, ...]:
        """Proper cornerpoints repeated according to multiplicity."""
        out: List[ExtendedPoint] = []
        for point, mult in self._points:
            out.extend([point] * mult)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._infinity_x == other._infinity_x and self._points == other._points

    def __hash__(self):
        return hash((self._infinity_x, self._points))

    def __repr__(self):
        pts = ", ".join(f"({p.x}, {p.y})x{m}" for p, m in self._points)
        return f"Diagram(infinity_x={self._infinity_x}, points=[{pts}])"

    def to_json_dict(self) -> dict:
        return {
            "infinity_x": float(self._infinity_x),
            "points": [[float(p.x), float(p.y), m] for p, m in self._points],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Diagram":
        if not isinstance(data, dict):
            raise ValueError("diagram JSON: expected an object")
        if "infinity_x" not in data:
            raise ValueError("diagram JSON: missing 'infinity_x'")
        raw_points = data.get("points", [])
        if not isinstance(raw_points, list):
            raise ValueError("diagram JSON: 'points' must be a list")
        points = []
        for row in raw_points:
            if not isinstance(row, (list, tuple)) or len(row) != 3:
                raise ValueError(f"diagram JSON: bad point row {row!r}, expected [x, y, mult]")
            x, y, mult = row
            if isinstance(mult, bool) or not isinstance(mult, int):
                raise ValueError(f"diagram JSON: multiplicity must be an integer, got {mult!r}")
            points.append(((x, y), mult))
        try:
            return cls(data["infinity_x"], points)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"diagram JSON: {exc}") from exc

    def dumps(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def loads(cls, text: str) -> "Diagram":
        return cls.from_json_dict(json.loads(text))


def extract_diagram(sp: SizePair) -> Diagram:
    """Cornerpoint diagram of a size pair, by one elder-rule sweep.

    Vertices are activated in increasing (value, id) order; an edge appears
    at the value of its later endpoint.  When two components merge, the
    younger one (larger birth, ties broken toward keeping the smaller
    vertex id) dies and contributes the pair (its birth, merge value);
    zero-persistence pairs are discarded.  The oldest component survives
    and becomes the cornerpoint at infinity at the global minimum.
    """
    order = sorted(sp.vertex_ids, key=lambda v: (sp.value(v), str(v)))
    parent: Dict = {}
    birth: Dict = {}

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    pairs: Dict[Tuple[Fraction, Fraction], int] = {}
    active = set()
    for v in order:
        parent[v] = v
        birth[v] = (sp.value(v), str(v))
        active.add(v)
        level = sp.value(v)
        for u in sorted(sp.neighbors(v), key=lambda w: (sp.value(w), str(w))):
            if u not in active:
                continue
            ru, rv = find(u), find(v)
            if ru == rv:
                continue
            dead, alive = (ru, rv) if birth[ru] > birth[rv] else (rv, ru)
            born = birth[dead][0]
            if level > born:
                key = (as_fraction(born), as_fraction(level))
                pairs[key] = pairs.get(key, 0) + 1
            parent[dead] = alive
    root = find(order[0])
    return Diagram(birth[root][0], [(xy, m) for xy, m in sorted(pairs.items())])


def evaluate_diagram(diagram: Diagram, x, y) -> int:
    """Value of the represented size function at (x, y), x < y."""
    if not x < y:
        raise ValueError(f"evaluation requires x < y, got x={x!r}, y={y!r}")
    total = 1 if diagram.infinity_x <= x else 0
    for point, mult in diagram.points:
        if point.x <= x and point.y > y:
            total += mult
    return total


def evaluate_diagram_on_grid(diagram: Diagram, xs: Sequence, ys: Sequence) -> Dict[Tuple, int]:
    """Representation sums on a grid: ``{(x, y): value}`` for x < y.

    Same values as :func:`evaluate_diagram`, computed with one descending
    sweep over y.
    """
    xs_sorted = sorted({as_fraction(x) for x in xs})
    ys_sorted = sorted({as_fraction(y) for y in ys})
    expanded = sorted(diagram.expanded(), key=lambda p: p.y, reverse=True)
    result: Dict[Tuple, int] = {}
    alive_xs: List[Fraction] = []
    index = 0
    for y in reversed(ys_sorted):
        while index < len(expanded) and expanded[index].y > y:
            insort(alive_xs, expanded[index].x)
            index += 1
        for x in xs_sorted:
            if x < y:
                base = 1 if diagram.infinity_x <= x else 0
                result[(x, y)] = base + bisect_right(alive_xs, x)
    return result


def _min_gap(values: Sequence[Fraction]) -> Fraction:
    gaps = [b - a for a, b in zip(values, values[1:])]
    positive = [g for g in gaps if g > 0]
    if not positive:
        return Fraction(1)
    return min(positive)


def multiplicity(sp: SizePair, x, y) -> int:
    """Multiplicity of (x, y) as a proper cornerpoint, by the four-point formula.

    mu(x, y) = l(x+e, y-e) - l(x-e, y-e) - l(x+e, y+e) + l(x-e, y+e)
    for any e > 0 small enough that the step function is constant on the
    probed windows; e is half the minimal gap of the critical values
    extended with {x, y}, capped at (y - x)/4.
    """
    x, y = as_fraction(x), as_fraction(y)
    if not x < y:
        raise ValueError(f"multiplicity requires x < y, got x={x}, y={y}")
    extended = sorted({as_fraction(v) for v in sp.critical_values} | {x, y})
    eps = min(_min_gap(extended) / 2, (y - x) / 4)
    a = reduced_size_function(sp, x + eps, y - eps)
    b = reduced_size_function(sp, x - eps, y - eps)
    c = reduced_size_function(sp, x + eps, y + eps)
    e = reduced_size_function(sp, x - eps, y + eps)
    return a - b - c + e


def multiplicity_at_infinity(sp: SizePair, k) -> int:
    """Multiplicity of the vertical line at abscissa k as a cornerpoint at infinity.

    Computed as l(k+e, Y) - l(k-e, Y) with Y above every vertex value; the
    graph is connected, so the result is 1 exactly at the global minimum
    and 0 elsewhere.
    """
    k = as_fraction(k)
    extended = sorted({as_fraction(v) for v in sp.critical_values} | {k})
    eps = _min_gap(extended) / 2
    top = max(as_fraction(sp.max_value), k + eps) + 1
    return reduced_size_function(sp, k + eps, top) - reduced_size_function(sp, k - eps, top)


def multiplicity_grid(sp: SizePair, coords: Sequence) -> Dict[Tuple, int]:
    """Four-point multiplicities for every coordinate pair x < y from ``coords``.

    One shared probe offset (a quarter of the minimal gap of the critical
    values extended with all coordinates) is below every local constancy
    scale, so the values agree with :func:`multiplicity` pointwise while
    using four grid sweeps instead of four evaluations per pair.
    """
    coords = sorted({as_fraction(c) for c in coords})
    if len(coords) < 2:
        return {}
    extended = sorted(set(coords) | {as_fraction(v) for v in sp.critical_values})
    eps = _min_gap(extended) / 4
    xs_plus = [c + eps for c in coords]
    xs_minus = [c - eps for c in coords]
    ys_minus = [c - eps for c in coords]
    ys_plus = [c + eps for c in coords]
    grid_a = size_function_on_grid(sp, xs_plus, ys_minus)
    grid_b = size_function_on_grid(sp, xs_minus, ys_minus)
    grid_c = size_function_on_grid(sp, xs_plus, ys_plus)
    grid_e = size_function_on_grid(sp, xs_minus, ys_plus)
    result: Dict[Tuple, int] = {}
    for i, x in enumerate(coords):
        for y in coords[i + 1 :]:
            result[(x, y)] = (
                grid_a[(x + eps, y - eps)]
                - grid_b[(x - eps, y - eps)]
                - grid_c[(x + eps, y + eps)]
                + grid_e[(x - eps, y + eps)]
            )
    return result


def count_in_square(sp: SizePair, center, eta) -> int:
    """Total multiplicity inside the half-open square of half-side eta at center.

    ``center`` is a proper :class:`ExtendedPoint` or an (x, y) pair.  Uses
    the inclusion-exclusion of the four corner evaluations a=(x+eta, y-eta),
    b=(x-eta, y-eta), c=(x+eta, y+eta), e=(x-eta, y+eta):
    l(a) - l(b) - l(c) + l(e).  The square must sit inside the half-plane:
    eta > 0 and x + eta < y - eta, otherwise ValueError.
    """
    if isinstance(center, ExtendedPoint):
        if center.is_at_infinity:
            raise ValueError("center must be a proper point, not one at infinity")
        center_x, center_y = center.x, center.y
    else:
        try:
            center_x, center_y = center
        except (TypeError, ValueError):
            raise ValueError(
                f"center must be an ExtendedPoint or an (x, y) pair, got {center!r}"
            ) from None
    cx, cy, eta = as_fraction(center_x), as_fraction(center_y), as_fraction(eta)
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if not cx + eta < cy - eta:
        raise ValueError(
            f"degenerate square: need center_x + eta < center_y - eta, got ({cx}, {cy}), eta={eta}"
        )
    a = reduced_size_function(sp, cx + eta, cy - eta)
    b = reduced_size_function(sp, cx - eta, cy - eta)
    c = reduced_size_function(sp, cx + eta, cy + eta)
    e = reduced_size_function(sp, cx - eta, cy + eta)
    return a - b - c + e
