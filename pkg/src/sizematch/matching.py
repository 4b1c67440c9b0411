"""Bottleneck matching distance between cornerpoint diagrams.

The ground distance d between extended points is

    d(p, q)     = min{ max(|px-qx|, |py-qy|),  max(pers(p), pers(q)) / 2 }
    d(p, diag)  = pers(p) / 2

with the conventions inf - inf = 0 and min{inf, c} = c: two cornerpoints
at infinity are compared by their abscissas, a point at infinity is at
infinite distance from everything else.  The matching distance is the
bottleneck cost over multi-bijections that send each proper point either
to a proper point of the other diagram or to the diagonal, plus the
mandatory pairing of the two cornerpoints at infinity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ._rational import as_fraction
from .core import SizePair
from .diagram import Diagram, ExtendedPoint, extract_diagram

__all__ = [
    "DIAGONAL",
    "MatchTarget",
    "Matching",
    "pseudo_distance_d",
    "matching_distance",
    "brute_force_matching_distance",
    "stability_probe",
]


class _Diagonal:
    """Sentinel for the diagonal  {x == y}  as a matching target."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIAGONAL"


DIAGONAL = _Diagonal()

# One side of a matching pair: a cornerpoint (proper or at infinity) or the
# diagonal sentinel.  Points at infinity only ever pair with each other.
MatchTarget = Union[ExtendedPoint, _Diagonal]


def _half_persistence(p: ExtendedPoint):
    return math.inf if p.is_at_infinity else p.persistence / 2


def pseudo_distance_d(p, q):
    """Ground distance between extended points and/or the diagonal."""
    if p is DIAGONAL and q is DIAGONAL:
        return Fraction(0)
    if p is DIAGONAL:
        return _half_persistence(q)
    if q is DIAGONAL:
        return _half_persistence(p)
    if p.is_at_infinity and q.is_at_infinity:
        return abs(p.x - q.x)
    if p.is_at_infinity or q.is_at_infinity:
        return math.inf
    direct = max(abs(p.x - q.x), abs(p.y - q.y))
    through_diagonal = max(p.persistence, q.persistence) / 2
    return min(direct, through_diagonal)


@dataclass(frozen=True)
class Matching:
    """A multi-bijection witness: pairs of (left, right) targets and its cost.

    Each side of a pair is an :class:`ExtendedPoint` or ``DIAGONAL``; the
    pair of cornerpoints at infinity is always present.  ``cost`` is the
    bottleneck value: the max of the ground distances of the pairs.
    """

    pairs: Tuple[Tuple[object, object], ...]
    cost: Fraction

    def to_json_dict(self) -> dict:
        def encode(side):
            if side is DIAGONAL:
                return "diag"
            if side.is_at_infinity:
                return "inf"
            return [float(side.x), float(side.y)]

        return {
            "cost": float(self.cost),
            "pairs": [{"left": encode(l), "right": encode(r)} for l, r in self.pairs],
        }

    @classmethod
    def from_json_dict(cls, data: dict, infinity_left=None, infinity_right=None) -> "Matching":
        """Rebuild a matching; 'inf' entries need the diagrams' abscissas."""
        if not isinstance(data, dict) or "pairs" not in data or "cost" not in data:
            raise ValueError("matching JSON: expected an object with 'cost' and 'pairs'")

        def decode(side, abscissa, label):
            if side == "diag":
                return DIAGONAL
            if side == "inf":
                if abscissa is None:
                    raise ValueError(
                        f"matching JSON: cannot rebuild the {label} point at infinity "
                        "without its abscissa"
                    )
                return ExtendedPoint.at_infinity(abscissa)
            if isinstance(side, (list, tuple)) and len(side) == 2:
                return ExtendedPoint(side[0], side[1])
            raise ValueError(f"matching JSON: bad pair side {side!r}")

        pairs = []
        for row in data["pairs"]:
            if not isinstance(row, dict) or "left" not in row or "right" not in row:
                raise ValueError(f"matching JSON: bad pair row {row!r}")
            pairs.append(
                (
                    decode(row["left"], infinity_left, "left"),
                    decode(row["right"], infinity_right, "right"),
                )
            )
        return cls(pairs=tuple(pairs), cost=as_fraction(data["cost"]))

    def dumps(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    def verify(self, d1: Diagram, d2: Diagram) -> None:
        """Raise ValueError unless this is a valid optimal-form witness for (d1, d2).

        Checks: the infinity pair is present exactly once and correct, the
        proper points of each diagram are covered exactly according to
        multiplicity, no diagonal-diagonal pairs, every pair's ground
        distance is finite and <= cost, and the max equals cost.
        """
        infinity_pairs = [
            (l, r)
            for l, r in self.pairs
            if not (l is DIAGONAL) and not (r is DIAGONAL) and l.is_at_infinity
        ]
        if len(infinity_pairs) != 1:
            raise ValueError("matching must contain exactly one pair of points at infinity")
        l_inf, r_inf = infinity_pairs[0]
        if not r_inf.is_at_infinity:
            raise ValueError("the point at infinity must be matched to the other one")
        if l_inf.x != d1.infinity_x or r_inf.x != d2.infinity_x:
            raise ValueError("infinity pair abscissas do not match the diagrams")
        left_cover: List[ExtendedPoint] = []
        right_cover: List[ExtendedPoint] = []
        worst = Fraction(0)
        for l, r in self.pairs:
            if l is DIAGONAL and r is DIAGONAL:
                raise ValueError("diagonal-diagonal pairs are not allowed in a witness")
            if (l, r) == (l_inf, r_inf):
                worst = max(worst, abs(l.x - r.x))
                continue
            if l is not DIAGONAL:
                if l.is_at_infinity:
                    raise ValueError("unexpected extra point at infinity on the left")
                left_cover.append(l)
            if r is not DIAGONAL:
                if r.is_at_infinity:
                    raise ValueError("unexpected extra point at infinity on the right")
                right_cover.append(r)
            ground = pseudo_distance_d(l, r)
            if ground == math.inf:
                raise ValueError(f"pair ({l!r}, {r!r}) has infinite ground distance")
            worst = max(worst, ground)
        key = lambda p: (p.x, p.y)
        if sorted(left_cover, key=key) != sorted(d1.expanded(), key=key):
            raise ValueError("left sides do not cover the first diagram's points exactly")
        if sorted(right_cover, key=key) != sorted(d2.expanded(), key=key):
            raise ValueError("right sides do not cover the second diagram's points exactly")
        if worst != self.cost:
            raise ValueError(f"stored cost {self.cost} differs from the max pair distance {worst}")


def _max_norm(p: ExtendedPoint, q: ExtendedPoint) -> Fraction:
    return max(abs(p.x - q.x), abs(p.y - q.y))


class _Instance:
    """Expanded proper points of both diagrams plus the pairwise costs.

    Direct edges that are strictly beaten by the route through the diagonal
    are dropped: any matching that used one can be rewired through two
    diagonal slots at no extra bottleneck cost, so feasibility thresholds
    are unchanged while witnesses keep only pairs whose ground distance is
    their max-norm.  realize() relies on that shape.
    """

    def __init__(self, d1: Diagram, d2: Diagram):
        self.left = d1.expanded()
        self.right = d2.expanded()
        self.half_left = [p.persistence / 2 for p in self.left]
        self.half_right = [q.persistence / 2 for q in self.right]
        self.norm: Dict[Tuple[int, int], Fraction] = {}
        for i, p in enumerate(self.left):
            for j, q in enumerate(self.right):
                norm = _max_norm(p, q)
                if norm <= max(self.half_left[i], self.half_right[j]):
                    self.norm[(i, j)] = norm

    def feasible(self, t, left_alive: Sequence[int], right_alive: Sequence[int]) -> bool:
        """Perfect matching test at threshold t on the still-unassigned points.

        Bipartite graph in the standard bottleneck form: one side holds the
        left points plus one diagonal slot per right point, the other the
        right points plus one diagonal slot per left point; slot-slot edges
        are always allowed, a point reaches its own slot iff half its
        persistence is <= t, and point-point edges need max-norm <= t.
        """
        nl, nr = len(left_alive), len(right_alive)
        size = nl + nr

        def neighbors(a: int) -> List[int]:
            out = []
            if a < nl:
                i = left_alive[a]
                for b, j in enumerate(right_alive):
                    norm = self.norm.get((i, j))
                    if norm is not None and norm <= t:
                        out.append(b)
                if self.half_left[i] <= t:
                    out.append(nr + a)
            else:
                j = right_alive[a - nl]
                if self.half_right[j] <= t:
                    out.append(a - nl)
                out.extend(range(nr, nr + nl))
            return out

        match_right = [-1] * size
        match_left = [-1] * size

        def augment(a: int, seen: List[bool]) -> bool:
            for b in neighbors(a):
                if not seen[b]:
                    seen[b] = True
                    if match_right[b] == -1 or augment(match_right[b], seen):
                        match_right[b] = a
                        match_left[a] = b
                        return True
            return False

        matched = 0
        for a in range(size):
            if augment(a, [False] * size):
                matched += 1
        return matched == size


def matching_distance(d1: Diagram, d2: Diagram) -> Tuple[Fraction, Matching]:
    """Bottleneck matching distance and an optimal witness.

    The optimal value is located by a feasibility search over the finite
    candidate set {0} | {half persistences} | {usable pairwise max-norms},
    then combined with the mandatory |infinity_x1 - infinity_x2| term.
    Ties between witnesses are broken toward the lexicographically
    smallest pairing (left points in (x, y) order, targets tried in (x, y)
    order with the diagonal last).
    """
    inst = _Instance(d1, d2)
    infinity_gap = abs(d1.infinity_x - d2.infinity_x)
    candidates = {Fraction(0)}
    candidates.update(inst.half_left)
    candidates.update(inst.half_right)
    candidates.update(inst.norm.values())
    thresholds = sorted(candidates)
    everyone_l = list(range(len(inst.left)))
    everyone_r = list(range(len(inst.right)))
    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if inst.feasible(thresholds[mid], everyone_l, everyone_r):
            hi = mid
        else:
            lo = mid + 1
    t_star = thresholds[lo]
    value = max(t_star, infinity_gap)

    order = sorted(everyone_l, key=lambda i: (inst.left[i].x, inst.left[i].y))
    assigned: Dict[int, Optional[int]] = {}
    taken = set()
    for pos, i in enumerate(order):
        rest = order[pos + 1 :]
        targets = sorted(
            (j for j in everyone_r if j not in taken and inst.norm.get((i, j), None) is not None
             and inst.norm[(i, j)] <= t_star),
            key=lambda j: (inst.right[j].x, inst.right[j].y),
        )
        choices: List[Optional[int]] = list(targets)
        if inst.half_left[i] <= t_star:
            choices.append(None)
        placed = False
        for choice in choices:
            trial_taken = taken | ({choice} if choice is not None else set())
            right_alive = [j for j in everyone_r if j not in trial_taken]
            if inst.feasible(t_star, rest, right_alive):
                assigned[i] = choice
                taken = trial_taken
                placed = True
                break
        if not placed:  # cannot happen at a feasible threshold
            raise RuntimeError("internal error: witness construction lost feasibility")

    pairs: List[Tuple[object, object]] = [
        (ExtendedPoint.at_infinity(d1.infinity_x), ExtendedPoint.at_infinity(d2.infinity_x))
    ]
    for i in order:
        j = assigned[i]
        pairs.append((inst.left[i], DIAGONAL if j is None else inst.right[j]))
    for j in everyone_r:
        if j not in taken:
            pairs.append((DIAGONAL, inst.right[j]))
    return value, Matching(pairs=tuple(pairs), cost=value)


def brute_force_matching_distance(d1: Diagram, d2: Diagram, cap: int = 8) -> Fraction:
    """Independent exhaustive oracle for the matching distance.

    Enumerates every assignment of the first diagram's points to points of
    the second one or the diagonal (leftovers go to the diagonal), with
    branch-and-bound pruning on the running bottleneck.  Refuses inputs
    with more than ``cap`` points (counting multiplicity) on either side.
    """
    left = d1.expanded()
    right = d2.expanded()
    if len(left) > cap or len(right) > cap:
        raise ValueError(
            f"brute force is capped at {cap} points per side, "
            f"got {len(left)} and {len(right)}"
        )
    infinity_gap = abs(d1.infinity_x - d2.infinity_x)
    half_left = [p.persistence / 2 for p in left]
    half_right = [q.persistence / 2 for q in right]
    best = [math.inf]

    def descend(i: int, used: int, running):
        if best[0] <= running:
            return
        if i == len(left):
            total = running
            for j, half in enumerate(half_right):
                if not used & (1 << j):
                    total = max(total, half)
                    if best[0] <= total:
                        return
            if total < best[0]:
                best[0] = total
            return
        p = left[i]
        for j, q in enumerate(right):
            if used & (1 << j):
                continue
            cost = max(running, min(_max_norm(p, q), max(half_left[i], half_right[j])))
            descend(i + 1, used | (1 << j), cost)
        descend(i + 1, used, max(running, half_left[i]))

    descend(0, 0, infinity_gap)
    result = best[0]
    return result if isinstance(result, Fraction) else as_fraction(result)


def stability_probe(sp: SizePair, perturbed_values, epsilon) -> Tuple[Fraction, bool]:
    """Perturb the vertex values and compare diagrams.

    ``perturbed_values`` maps every vertex id to a new value with
    ``max |old - new| <= epsilon`` (violations are rejected).  Returns
    ``(d_match, holds)`` where ``holds`` is ``d_match <= epsilon``.
    """
    epsilon = as_fraction(epsilon)
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    ids = set(sp.vertex_ids)
    if set(perturbed_values.keys()) != ids:
        raise ValueError("perturbed values must cover exactly the vertex set")
    worst = max(
        abs(as_fraction(sp.value(v)) - as_fraction(perturbed_values[v])) for v in ids
    )
    if worst > epsilon:
        raise ValueError(f"perturbation sup-norm {worst} exceeds epsilon {epsilon}")
    perturbed = SizePair(
        [(v, perturbed_values[v]) for v in sp.vertex_ids], sp.edges
    )
    original_diagram = extract_diagram(sp)
    perturbed_diagram = extract_diagram(perturbed)
    value, _ = matching_distance(original_diagram, perturbed_diagram)
    minima_gap = abs(original_diagram.infinity_x - perturbed_diagram.infinity_x)
    if minima_gap > epsilon:
        raise RuntimeError(
            "internal error: the minima moved farther than the perturbation allows"
        )
    return value, value <= epsilon
