"""Lower and upper companions of the matching distance.

``earlier_bound`` computes

    s = sup { min(xi - x, y - eta)  :  x <= xi < eta <= y,
                                       l1(x, y) > l2(xi, eta) }

exactly (0 on an empty set).  Both step functions are constant on the
half-open boxes cut by their own break lines, so the sup is a finite
optimization over pairs of boxes, solved in closed form per pair.

``exact_graph_pseudo_distance`` minimizes the sup-norm value difference
over all graph isomorphisms (small graphs only) — an upper companion:
earlier_bound <= matching_distance <= exact_graph_pseudo_distance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ._rational import as_fraction
from .core import SizePair
from .diagram import Diagram, extract_diagram
from .matching import Matching, matching_distance

__all__ = [
    "EarlierWitness",
    "BoundReport",
    "NotIsomorphicError",
    "earlier_bound",
    "earlier_bound_grid_oracle",
    "exact_graph_pseudo_distance",
    "bound_report",
]

_NEG = -math.inf
_POS = math.inf


def _formula_value(diagram: Diagram, x, y) -> int:
    """Representation sum without the x < y guard (step-function value)."""
    total = 1 if diagram.infinity_x <= x else 0
    for point, mult in diagram.points:
        if point.x <= x and point.y > y:
            total += mult
    return total


def _axis_cells(breaks: Sequence[Fraction]) -> List[Tuple[object, object]]:
    """Half-open cells [a, b) cut by the breaks, including both unbounded ends."""
    if not breaks:
        return [(_NEG, _POS)]
    cells: List[Tuple[object, object]] = [(_NEG, breaks[0])]
    for a, b in zip(breaks, breaks[1:]):
        cells.append((a, b))
    cells.append((breaks[-1], _POS))
    return cells


def _cell_representative(cell: Tuple[object, object], fallback_below) -> object:
    a, b = cell
    return a if a != _NEG else fallback_below


@dataclass(frozen=True)
class EarlierWitness:
    """A strictly admissible 4-tuple near the optimum of the sup."""

    x: Fraction
    y: Fraction
    xi: Fraction
    eta: Fraction
    value_left: int
    value_right: int
    achieved: Fraction

    def to_json_dict(self) -> dict:
        return {
            "x": float(self.x),
            "y": float(self.y),
            "xi": float(self.xi),
            "eta": float(self.eta),
            "value_left": self.value_left,
            "value_right": self.value_right,
            "achieved": float(self.achieved),
        }


def _diagram_breaks(diagram: Diagram) -> Tuple[List[Fraction], List[Fraction]]:
    xs = sorted({diagram.infinity_x} | {p.x for p, _ in diagram.points})
    ys = sorted({p.y for p, _ in diagram.points})
    return xs, ys


def earlier_bound(d1: Diagram, d2: Diagram) -> Tuple[Fraction, Optional[EarlierWitness]]:
    """Exact sup of min(xi - x, y - eta) over the admissible set, with a witness.

    Per pair of constancy boxes with l1-value > l2-value the sup has closed
    form: x sits at the left end of its box, y at the sup of its box, and
    (xi, eta) at one of two corner candidates or at the balanced midpoint
    (x + y)/2 clamped into the box (the wedge apex).  The witness is a
    strictly admissible 4-tuple re-verified by direct evaluation; on an
    empty admissible set the result is (0, None).
    """
    xs1, ys1 = _diagram_breaks(d1)
    xs2, ys2 = _diagram_breaks(d2)
    x_cells1, y_cells1 = _axis_cells(xs1), _axis_cells(ys1)
    x_cells2, y_cells2 = _axis_cells(xs2), _axis_cells(ys2)
    below1 = (xs1[0] if xs1 else Fraction(0)) - 1
    below_y1 = (ys1[0] if ys1 else Fraction(0)) - 1
    below2 = (xs2[0] if xs2 else Fraction(0)) - 1
    below_y2 = (ys2[0] if ys2 else Fraction(0)) - 1

    values1 = [
        [
            _formula_value(d1, _cell_representative(cx, below1), _cell_representative(cy, below_y1))
            for cy in y_cells1
        ]
        for cx in x_cells1
    ]
    values2 = [
        [
            _formula_value(d2, _cell_representative(cx, below2), _cell_representative(cy, below_y2))
            for cy in y_cells2
        ]
        for cx in x_cells2
    ]

    best = Fraction(0)
    best_cells = None
    for ix1, (ax, bx) in enumerate(x_cells1):
        if ax == _NEG:
            continue  # l1 is 0 left of every abscissa
        for iy1, (ay, by) in enumerate(y_cells1):
            left_value = values1[ix1][iy1]
            if left_value == 0:
                continue
            for ix2, (axi, bxi) in enumerate(x_cells2):
                lo_xi = max(axi, ax)
                if not lo_xi < bxi:
                    continue
                for iy2, (aeta, beta) in enumerate(y_cells2):
                    if values2[ix2][iy2] >= left_value:
                        continue
                    hi_eta = min(beta, by)
                    if not (aeta < hi_eta and lo_xi < hi_eta):
                        continue
                    candidates = []
                    if bxi != _POS:
                        eta0 = max(aeta, bxi)
                        if eta0 <= hi_eta:
                            candidates.append((bxi, eta0))
                    if aeta != _NEG:
                        xi0 = min(bxi, aeta)
                        if xi0 >= lo_xi:
                            candidates.append((xi0, aeta))
                    lower = max(lo_xi, aeta)
                    upper = min(bxi, beta, by)
                    if lower <= upper:
                        if by == _POS:
                            m = upper
                        else:
                            m = (ax + by) / 2
                            m = lower if m < lower else (upper if m > upper else m)
                        candidates.append((m, m))
                    for xi0, eta0 in candidates:
                        margin_x = xi0 - ax
                        margin_y = (by - eta0) if by != _POS else _POS
                        gain = min(margin_x, margin_y)
                        if gain > best:
                            best = as_fraction(gain)
                            best_cells = ((ax, bx), (ay, by), (axi, bxi), (aeta, beta))

    if best_cells is None:
        return Fraction(0), None
    witness = _strict_witness(d1, d2, best_cells, xs1 + ys1 + xs2 + ys2)
    return best, witness


def _strict_witness(d1, d2, cells, all_breaks) -> Optional[EarlierWitness]:
    (ax, bx), (ay, by), (axi, bxi), (aeta, beta) = cells
    breaks = sorted(set(all_breaks))
    if len(breaks) >= 2:
        delta = min(b - a for a, b in zip(breaks, breaks[1:])) / 4
    else:
        delta = Fraction(1, 4)
    top = (breaks[-1] if breaks else Fraction(0)) + 1

    def in_cell(t, cell):
        a, b = cell
        return (a == _NEG or a <= t) and (b == _POS or t < b)

    xs = [ax, ax + delta]
    ys = [
        by - delta if by != _POS else None,
        ay + delta if ay != _NEG else None,
        top if by == _POS else None,
    ]
    lo_xi = max(axi if axi != _NEG else ax, ax)
    mid = None
    if by != _POS:
        mid = (ax + by) / 2
    xis = [lo_xi, lo_xi + delta, (bxi - delta) if bxi != _POS else None]
    etas = [aeta if aeta != _NEG else None, (aeta + delta) if aeta != _NEG else None]
    if mid is not None:
        xis.extend([mid - delta / 2, mid])
        etas.extend([mid + delta / 2, mid + delta])
    best = None
    for x in xs:
        if x is None or not in_cell(x, (ax, bx)):
            continue
        for y in ys:
            if y is None or not in_cell(y, (ay, by)) or not x < y:
                continue
            value_left = _formula_value(d1, x, y)
            for xi in xis:
                if xi is None or not in_cell(xi, (axi, bxi)) or not x <= xi:
                    continue
                for eta in etas + [xi + delta]:
                    if eta is None or not in_cell(eta, (aeta, beta)):
                        continue
                    if not (xi < eta and eta <= y):
                        continue
                    value_right = _formula_value(d2, xi, eta)
                    if value_left <= value_right:
                        continue
                    achieved = min(xi - x, y - eta)
                    if best is None or achieved > best.achieved:
                        best = EarlierWitness(
                            x=as_fraction(x),
                            y=as_fraction(y),
                            xi=as_fraction(xi),
                            eta=as_fraction(eta),
                            value_left=value_left,
                            value_right=value_right,
                            achieved=as_fraction(achieved),
                        )
    return best


def earlier_bound_grid_oracle(d1: Diagram, d2: Diagram, level: int = 0) -> Fraction:
    """Grid-search approximation of :func:`earlier_bound` from below.

    One shared 1-D grid holds every break of both diagrams plus a margin
    point beyond each end, with each gap subdivided into 2**(level + 2)
    parts; the value is the max of min(xi - x, y - eta) over admissible
    grid 4-tuples.  The grids are nested, so the value is non-decreasing
    in ``level`` and never exceeds the exact bound.
    """
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    factor = 2 ** (level + 2)
    xs1, ys1 = _diagram_breaks(d1)
    xs2, ys2 = _diagram_breaks(d2)
    base = sorted(set(xs1 + ys1 + xs2 + ys2))
    if not base:
        base = [Fraction(0)]
    points = [base[0] - 1] + base + [base[-1] + 1]
    grid: List[Fraction] = []
    for a, b in zip(points, points[1:]):
        step = (b - a) / factor
        grid.extend(a + step * k for k in range(factor))
    grid.append(points[-1])

    n = len(grid)
    values1 = [[_formula_value(d1, grid[i], grid[j]) for j in range(n)] for i in range(n)]
    values2 = [[_formula_value(d2, grid[i], grid[j]) for j in range(n)] for i in range(n)]
    max_left = max(max(row) for row in values1)
    # first_below[i][c]: least j with values2[i][j] < c (rows are non-increasing in j,
    # so the pointer only moves forward as c decreases)
    first_below = []
    for i in range(n):
        row = values2[i]
        firsts = [n] * (max_left + 1)
        j = 0
        for c in range(max_left, 0, -1):
            while j < n and row[j] >= c:
                j += 1
            firsts[c] = j
        first_below.append(firsts)

    best = Fraction(0)
    for ix in range(n):
        for iy in range(ix + 1, n):
            c = values1[ix][iy]
            if c == 0:
                continue
            x, y = grid[ix], grid[iy]
            if y - x <= 2 * best:
                continue  # min(xi - x, y - eta) <= (y - x)/2 for nested tuples
            for ixi in range(ix, iy):
                jeta = first_below[ixi][c]
                if jeta <= ixi:
                    jeta = ixi + 1
                if jeta > iy:
                    continue
                gain = min(grid[ixi] - x, y - grid[jeta])
                if gain > best:
                    best = gain
    return best


class NotIsomorphicError(ValueError):
    """The two graphs admit no isomorphism."""


def exact_graph_pseudo_distance(sp1: SizePair, sp2: SizePair, cap: int = 9) -> Fraction:
    """Min over all graph isomorphisms of the sup-norm value difference.

    Exhaustive backtracking with degree pruning; refuses graphs larger
    than ``cap`` vertices and raises :class:`NotIsomorphicError` when no
    isomorphism exists.
    """
    n = sp1.n_vertices
    if n > cap or sp2.n_vertices > cap:
        raise ValueError(
            f"exact search is capped at {cap} vertices, "
            f"got {sp1.n_vertices} and {sp2.n_vertices}"
        )
    if sp2.n_vertices != n or sp2.n_edges != sp1.n_edges:
        raise NotIsomorphicError("graphs differ in vertex or edge count")
    degrees1 = sorted(sp1.degree(v) for v in sp1.vertex_ids)
    degrees2 = sorted(sp2.degree(v) for v in sp2.vertex_ids)
    if degrees1 != degrees2:
        raise NotIsomorphicError("graphs have different degree sequences")

    # BFS order: after the root every vertex has a previously mapped neighbor,
    # which makes the adjacency-consistency pruning bite early.
    start = min(sp1.vertex_ids, key=lambda v: (-sp1.degree(v), str(v)))
    order: List = [start]
    seen = {start}
    queue = [start]
    while queue:
        v = queue.pop(0)
        for u in sorted(sp1.neighbors(v), key=lambda w: (-sp1.degree(w), str(w))):
            if u not in seen:
                seen.add(u)
                order.append(u)
                queue.append(u)
    values1 = {v: as_fraction(sp1.value(v)) for v in sp1.vertex_ids}
    values2 = {w: as_fraction(sp2.value(w)) for w in sp2.vertex_ids}
    adjacency1 = {v: set(sp1.neighbors(v)) for v in sp1.vertex_ids}
    adjacency2 = {w: set(sp2.neighbors(w)) for w in sp2.vertex_ids}
    ids2 = sorted(sp2.vertex_ids, key=str)

    best: List[Optional[Fraction]] = [None]
    mapping: Dict = {}
    used = set()

    def descend(i: int, running: Fraction) -> None:
        if best[0] is not None and running >= best[0]:
            return
        if i == n:
            best[0] = running
            return
        v = order[i]
        for w in ids2:
            if w in used or sp2.degree(w) != sp1.degree(v):
                continue
            consistent = True
            for u, fu in mapping.items():
                if (u in adjacency1[v]) != (fu in adjacency2[w]):
                    consistent = False
                    break
            if not consistent:
                continue
            gap = abs(values1[v] - values2[w])
            next_running = running if running >= gap else gap
            if best[0] is not None and next_running >= best[0]:
                continue
            mapping[v] = w
            used.add(w)
            descend(i + 1, next_running)
            del mapping[v]
            used.discard(w)

    descend(0, Fraction(0))
    if best[0] is None:
        raise NotIsomorphicError("graphs are not isomorphic")
    return best[0]


@dataclass(frozen=True)
class BoundReport:
    """earlier_bound <= d_match <= exact chain for a pair of size pairs."""

    d_match: Fraction
    earlier: Fraction
    exact: Optional[Fraction]
    matching: Matching
    earlier_witness: Optional[EarlierWitness]
    note: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "earlier_bound": float(self.earlier),
            "d_match": float(self.d_match),
            "exact_pseudo_distance": None if self.exact is None else float(self.exact),
            "chain_ok": True,
            "note": self.note,
            "witnesses": {
                "matching": self.matching.to_json_dict(),
                "earlier": None if self.earlier_witness is None else self.earlier_witness.to_json_dict(),
            },
        }

    def dumps(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)


def bound_report(sp1: SizePair, sp2: SizePair, cap: int = 9) -> BoundReport:
    """Compute the full bound chain for two size pairs and assert it.

    ``exact`` is None when the graphs are not isomorphic or exceed the
    search cap (the reason lands in ``note``).  A violated chain is an
    internal error, not a data error, and raises RuntimeError.
    """
    diagram1 = extract_diagram(sp1)
    diagram2 = extract_diagram(sp2)
    d_match, matching = matching_distance(diagram1, diagram2)
    earlier, witness = earlier_bound(diagram1, diagram2)
    exact: Optional[Fraction] = None
    note: Optional[str] = None
    try:
        exact = exact_graph_pseudo_distance(sp1, sp2, cap=cap)
    except NotIsomorphicError as exc:
        note = str(exc)
    except ValueError as exc:
        note = str(exc)
    if earlier > d_match:
        raise RuntimeError(
            f"internal error: earlier bound {earlier} exceeds matching distance {d_match}"
        )
    if exact is not None and d_match > exact:
        raise RuntimeError(
            f"internal error: matching distance {d_match} exceeds exact distance {exact}"
        )
    return BoundReport(
        d_match=d_match,
        earlier=earlier,
        exact=exact,
        matching=matching,
        earlier_witness=witness,
        note=note,
    )
