"""Joint realization of two prescribed cornerpoint diagrams.

Given diagrams d1 and d2 (every proper abscissa at or above its own
infinity_x), build two piecewise-linear vertex-value fields phi and psi on
a shared rectangular grid over [0, 1] x [min_value, S] such that

    extract(phi) == d1,   extract(psi) == d2,
    max |phi - psi| over the grid  ==  matching_distance(d1, d2),

all exactly, in rational arithmetic.  One matched pair of the optimal
matching witness becomes one narrow "pit" structure (a V-shaped dip to the
point's abscissa, rimmed at its ordinate, flanked by plateau columns);
points matched to the diagonal become a pit on one field facing a plateau
at the pit's center height on the other.  Both fields share their column
abscissas and row ordinates, so the difference is piecewise linear on the
grid and its node maximum is the true maximum.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ._rational import as_fraction, number_from_json, number_to_json
from .core import ModelViolationError, SizePair
from .diagram import Diagram, ExtendedPoint, extract_diagram
from .matching import DIAGONAL, Matching, matching_distance

__all__ = [
    "RectField",
    "RealizationParams",
    "realize",
    "discretize",
    "max_field_gap",
]


@dataclass(frozen=True)
class RectField:
    """Piecewise-linear field on columns x_breaks over y in [min_phi, S].

    Within a column the value is linear between consecutive y breaks;
    between columns the field interpolates linearly (nothing in the
    package ever needs values off the columns, but the model is the full
    rectangle).
    """

    x_breaks: Tuple[Fraction, ...]
    y_breaks_per_column: Tuple[Tuple[Fraction, ...], ...]
    values_per_column: Tuple[Tuple[Fraction, ...], ...]
    S: Fraction
    min_phi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x_breaks", tuple(as_fraction(x) for x in self.x_breaks))
        object.__setattr__(self, "S", as_fraction(self.S))
        object.__setattr__(self, "min_phi", as_fraction(self.min_phi))
        object.__setattr__(
            self,
            "y_breaks_per_column",
            tuple(tuple(as_fraction(y) for y in column) for column in self.y_breaks_per_column),
        )
        object.__setattr__(
            self,
            "values_per_column",
            tuple(tuple(as_fraction(v) for v in column) for column in self.values_per_column),
        )
        if len(self.x_breaks) < 2:
            raise ValueError("a field needs at least two columns")
        if any(b <= a for a, b in zip(self.x_breaks, self.x_breaks[1:])):
            raise ValueError("x_breaks must be strictly increasing")
        if not self.min_phi < self.S:
            raise ValueError(f"empty y range [{self.min_phi}, {self.S}]")
        if len(self.y_breaks_per_column) != len(self.x_breaks) or len(
            self.values_per_column
        ) != len(self.x_breaks):
            raise ValueError("per-column data must match the number of columns")
        for ys, vs in zip(self.y_breaks_per_column, self.values_per_column):
            if len(ys) != len(vs) or len(ys) < 2:
                raise ValueError("each column needs matching y breaks and values (>= 2)")
            if any(b <= a for a, b in zip(ys, ys[1:])):
                raise ValueError("column y breaks must be strictly increasing")
            if ys[0] != self.min_phi or ys[-1] != self.S:
                raise ValueError("column y breaks must span [min_phi, S]")

    @property
    def n_columns(self) -> int:
        return len(self.x_breaks)

    def value_at(self, column: int, y) -> Fraction:
        """Exact field value on a column at height y (linear between breaks)."""
        y = as_fraction(y)
        ys = self.y_breaks_per_column[column]
        vs = self.values_per_column[column]
        if not ys[0] <= y <= ys[-1]:
            raise ValueError(f"y={y} outside the field range [{ys[0]}, {ys[-1]}]")
        k = bisect_right(ys, y)
        if k == len(ys):
            return vs[-1]
        if ys[k - 1] == y:
            return vs[k - 1]
        a, b = ys[k - 1], ys[k]
        va, vb = vs[k - 1], vs[k]
        return va + (vb - va) * (y - a) / (b - a)

    def to_json_dict(self) -> dict:
        return {
            "x_breaks": [number_to_json(x) for x in self.x_breaks],
            "y_breaks_per_column": [
                [number_to_json(y) for y in ys] for ys in self.y_breaks_per_column
            ],
            "values_per_column": [
                [number_to_json(v) for v in vs] for vs in self.values_per_column
            ],
            "S": number_to_json(self.S),
            "min_phi": number_to_json(self.min_phi),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RectField":
        if not isinstance(data, dict):
            raise ValueError("field JSON: expected an object")
        try:
            return cls(
                x_breaks=tuple(number_from_json(x) for x in data["x_breaks"]),
                y_breaks_per_column=tuple(
                    tuple(number_from_json(y) for y in ys) for ys in data["y_breaks_per_column"]
                ),
                values_per_column=tuple(
                    tuple(number_from_json(v) for v in vs) for vs in data["values_per_column"]
                ),
                S=number_from_json(data["S"]),
                min_phi=number_from_json(data["min_phi"]),
            )
        except KeyError as exc:
            raise ValueError(f"field JSON: missing key {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ValueError(f"field JSON: {exc}") from exc

    def dumps(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def loads(cls, text: str) -> "RectField":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class StructureParams:
    """One matched pair turned into a column structure."""

    kind: str  # "direct" | "left" | "right"
    left: Optional[ExtendedPoint]
    right: Optional[ExtendedPoint]
    center: Fraction
    epsilon: Fraction

    def to_json_dict(self) -> dict:
        def point(p):
            return None if p is None else [number_to_json(p.x), number_to_json(p.y)]

        return {
            "kind": self.kind,
            "left": point(self.left),
            "right": point(self.right),
            "center": number_to_json(self.center),
            "epsilon": number_to_json(self.epsilon),
        }


@dataclass(frozen=True)
class RealizationParams:
    """Construction record of a realization."""

    S: Fraction
    min_phi: Fraction
    min_psi: Fraction
    swapped: bool
    d_match: Fraction
    structures: Tuple[StructureParams, ...]
    matching: Matching

    @property
    def epsilons(self) -> Tuple[Fraction, ...]:
        return tuple(st.epsilon for st in self.structures)

    def to_json_dict(self) -> dict:
        return {
            "S": number_to_json(self.S),
            "min_phi": number_to_json(self.min_phi),
            "min_psi": number_to_json(self.min_psi),
            "swapped": self.swapped,
            "d_match": number_to_json(self.d_match),
            "structures": [st.to_json_dict() for st in self.structures],
            "matching": self.matching.to_json_dict(),
        }


def _profile_value(profile: Sequence[Tuple[Fraction, Fraction]], y: Fraction) -> Fraction:
    """Evaluate a piecewise-linear breakpoint list at y."""
    for (ya, va), (yb, vb) in zip(profile, profile[1:]):
        if ya <= y <= yb:
            if y == ya:
                return va
            if y == yb:
                return vb
            return va + (vb - va) * (y - ya) / (yb - ya)
    raise ValueError(f"y={y} outside the profile range")


def _structures_from_matching(matching: Matching) -> List[Tuple[str, object, object]]:
    out = []
    for left, right in matching.pairs:
        if left is not DIAGONAL and right is not DIAGONAL and left.is_at_infinity:
            continue
        if left is DIAGONAL:
            out.append(("right", None, right))
        elif right is DIAGONAL:
            out.append(("left", left, None))
        else:
            out.append(("direct", left, right))
    return out


def realize(
    d1: Diagram, d2: Diagram, *, min_epsilon: Fraction = Fraction(1, 10**12)
) -> Tuple[RectField, RectField, RealizationParams]:
    """Build fields (phi, psi) with extract(phi) == d1, extract(psi) == d2 and
    max node gap == matching_distance(d1, d2), exactly.

    Both diagrams must be localized: every proper abscissa at or above the
    diagram's own infinity_x.  Structure half-widths below ``min_epsilon``
    are refused.  The construction anchors the shared base at the smaller
    infinity_x, so internally the roles may be swapped; the returned pair
    is always (field for d1, field for d2) and ``params.swapped`` records
    the orientation.
    """
    for name, diagram in (("d1", d1), ("d2", d2)):
        for point, _ in diagram.points:
            if point.x < diagram.infinity_x:
                raise ModelViolationError(
                    f"{name}: cornerpoint abscissa {point.x} lies below infinity_x "
                    f"{diagram.infinity_x}"
                )
    swapped = d2.infinity_x < d1.infinity_x
    low, high = (d2, d1) if swapped else (d1, d2)
    d_match, matching = matching_distance(low, high)
    min_phi = low.infinity_x
    min_psi = high.infinity_x

    coords = [low.infinity_x, high.infinity_x]
    for diagram in (low, high):
        for point, _ in diagram.points:
            coords.extend((point.x, point.y))
    S = max(coords) + 1

    structures: List[StructureParams] = []
    for kind, left, right in _structures_from_matching(matching):
        anchor = left if kind in ("direct", "left") else right
        center = (anchor.x + anchor.y) / 2
        epsilon = min(anchor.persistence / 4, center - min_phi, S - center) / 2
        if epsilon < min_epsilon:
            raise ValueError(
                f"structure half-width {epsilon} underflows the configured minimum {min_epsilon}"
            )
        structures.append(
            StructureParams(kind=kind, left=left, right=right, center=center, epsilon=epsilon)
        )

    base_low = [(min_phi, min_phi), (S, S)]
    base_high = [(min_phi, min_psi), (S, S)]

    def pit(base_start, st, point):
        c, e = st.center, st.epsilon
        return [(min_phi, base_start), (c - e, point.y), (c, point.x), (c + e, point.y), (S, S)]

    def flank(base_start, st, point):
        c, e = st.center, st.epsilon
        return [(min_phi, base_start), (c - e, point.y), (c + e, point.y), (S, S)]

    def plateau(base_start, st):
        c, e = st.center, st.epsilon
        if c <= base_start:
            return [(min_phi, base_start), (c + e, base_start), (S, S)]
        return [(min_phi, base_start), (c - e, c), (c + e, c), (S, S)]

    # column layout: structure i (1-based) owns 1/(3i+1) < 1/(3i) < 1/(3i-1);
    # the middle one carries the pit, its neighbors the flanks.
    column_profiles_low: Dict[Fraction, list] = {
        Fraction(0): base_low,
        Fraction(1): base_low,
    }
    column_profiles_high: Dict[Fraction, list] = {
        Fraction(0): base_high,
        Fraction(1): base_high,
    }
    for index, st in enumerate(structures, start=1):
        pit_x = Fraction(1, 3 * index)
        flank_xs = (Fraction(1, 3 * index + 1), Fraction(1, 3 * index - 1))
        if st.kind in ("direct", "left"):
            column_profiles_low[pit_x] = pit(min_phi, st, st.left)
            for fx in flank_xs:
                column_profiles_low[fx] = flank(min_phi, st, st.left)
        else:
            for fx in flank_xs + (pit_x,):
                column_profiles_low[fx] = plateau(min_phi, st)
        if st.kind in ("direct", "right"):
            column_profiles_high[pit_x] = pit(min_psi, st, st.right)
            for fx in flank_xs:
                column_profiles_high[fx] = flank(min_psi, st, st.right)
        else:
            for fx in flank_xs + (pit_x,):
                column_profiles_high[fx] = plateau(min_psi, st)

    x_breaks = tuple(sorted(column_profiles_low))
    y_breaks = {min_phi, S}
    for st in structures:
        y_breaks.update((st.center - st.epsilon, st.center, st.center + st.epsilon))
    y_grid = tuple(sorted(y_breaks))

    def build(column_profiles) -> RectField:
        values = tuple(
            tuple(_profile_value(column_profiles[x], y) for y in y_grid) for x in x_breaks
        )
        return RectField(
            x_breaks=x_breaks,
            y_breaks_per_column=(y_grid,) * len(x_breaks),
            values_per_column=values,
            S=S,
            min_phi=min_phi,
        )

    field_low = build(column_profiles_low)
    field_high = build(column_profiles_high)

    if extract_diagram(discretize(field_low, 1)) != low:
        raise RuntimeError("internal error: realization does not reproduce the first diagram")
    if extract_diagram(discretize(field_high, 1)) != high:
        raise RuntimeError("internal error: realization does not reproduce the second diagram")
    gap = max_field_gap(field_low, field_high)
    if gap != d_match:
        raise RuntimeError(
            f"internal error: realized field gap {gap} differs from the matching distance {d_match}"
        )

    params = RealizationParams(
        S=S,
        min_phi=min_phi,
        min_psi=min_psi,
        swapped=swapped,
        d_match=d_match,
        structures=tuple(structures),
        matching=matching,
    )
    if swapped:
        return field_high, field_low, params
    return field_low, field_high, params


def discretize(field: RectField, refine: int = 1) -> SizePair:
    """Sample a field onto a 4-connected grid graph.

    Columns sit at the field's x breaks; each consecutive y gap is split
    into ``refine`` equal parts (refine=1 keeps the break rows only).
    Values are sampled exactly.  All columns must share one y grid.
    """
    if isinstance(refine, bool) or not isinstance(refine, int) or refine < 1:
        raise ValueError(f"refine must be a positive integer, got {refine!r}")
    shared = field.y_breaks_per_column[0]
    if any(column != shared for column in field.y_breaks_per_column):
        raise ValueError("discretize needs one shared y grid across columns")
    ys: List[Fraction] = []
    for a, b in zip(shared, shared[1:]):
        step = (b - a) / refine
        ys.extend(a + step * k for k in range(refine))
    ys.append(shared[-1])
    vertices = []
    for ci in range(field.n_columns):
        for ri, y in enumerate(ys):
            vertices.append((f"c{ci}r{ri}", field.value_at(ci, y)))
    edges = []
    rows = len(ys)
    for ci in range(field.n_columns):
        for ri in range(rows - 1):
            edges.append((f"c{ci}r{ri}", f"c{ci}r{ri + 1}"))
    for ci in range(field.n_columns - 1):
        for ri in range(rows):
            edges.append((f"c{ci}r{ri}", f"c{ci + 1}r{ri}"))
    return SizePair(vertices, edges)


def max_field_gap(field_a: RectField, field_b: RectField) -> Fraction:
    """Exact max of |a - b| over the shared grid nodes.

    The fields must share their x breaks; each column is compared on the
    union of the two columns' y breaks, where both restrictions are linear
    in between, so the node maximum is the maximum over the whole column.
    """
    if field_a.x_breaks != field_b.x_breaks:
        raise ValueError("fields do not share their column abscissas")
    worst = Fraction(0)
    for ci in range(field_a.n_columns):
        ys = sorted(set(field_a.y_breaks_per_column[ci]) | set(field_b.y_breaks_per_column[ci]))
        for y in ys:
            gap = abs(field_a.value_at(ci, y) - field_b.value_at(ci, y))
            if gap > worst:
                worst = gap
    return worst
