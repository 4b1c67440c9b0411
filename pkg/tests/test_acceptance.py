"""Acceptance gate: eight checks, one per shipped guarantee.

Each criterion is a single test function, so a verbose pytest run emits
exactly one pass/fail line per criterion.  All comparisons are exact
(integer == integer, Fraction == Fraction): the pinned tolerance for every
numeric assertion in this file is zero.  Each criterion also carries a
pinned wall-clock budget, asserted after the work completes.
"""

import random
import time
from fractions import Fraction as F

from sizematch import (
    Diagram,
    bound_report,
    brute_force_matching_distance,
    discretize,
    evaluate_diagram,
    evaluate_diagram_on_grid,
    extract_diagram,
    matching_distance,
    max_field_gap,
    multiplicity,
    multiplicity_at_infinity,
    multiplicity_grid,
    realize,
    reduced_size_function,
    size_function_on_grid,
    SizePair,
    stability_probe,
)
from sizematch.core import _quarter_gap_grid
from sizematch.selftest import (
    perturbed_values,
    random_diagram,
    random_isomorphic_pair,
    random_size_pair,
)

EXACT = F(0)  # pinned tolerance: zero, every assertion is exact

BUDGET_SECONDS = {1: 10, 2: 30, 3: 60, 4: 60, 5: 60, 6: 60, 7: 120, 8: 10}


def _finish(criterion: int, summary: str, cases: int, start: float) -> None:
    elapsed = time.perf_counter() - start
    budget = BUDGET_SECONDS[criterion]
    print(
        f"[criterion {criterion}] PASS: {summary} "
        f"({cases} cases, {elapsed:.2f} s, budget {budget} s)",
        flush=True,
    )
    assert elapsed <= budget, f"criterion {criterion} exceeded its {budget} s budget"


def _probe_grid(sp: SizePair):
    grid = list(_quarter_gap_grid(sp.critical_values))
    return [grid[0] - 1] + grid + [grid[-1] + 1]


def test_criterion_1_diagram_represents_size_function():
    """The extracted diagram reproduces the size function at every grid pair."""
    start = time.perf_counter()
    rng = random.Random(1001)
    cases = 0
    for _ in range(200):
        sp = random_size_pair(rng, max_vertices=40)
        grid = _probe_grid(sp)
        direct = size_function_on_grid(sp, grid, grid)
        represented = evaluate_diagram_on_grid(extract_diagram(sp), grid, grid)
        assert direct == represented
        cases += 1
    _finish(1, "diagram representation identity, exact", cases, start)


def test_criterion_2_multiplicities_match_extraction():
    """Four-point multiplicities equal extracted multiplicities everywhere."""
    start = time.perf_counter()
    rng = random.Random(1002)
    cases = 0
    for _ in range(60):
        sp = random_size_pair(rng, max_vertices=12)
        diagram = extract_diagram(sp)
        expected = {(p.x, p.y): m for p, m in diagram.points}
        values = sorted(set(F(sp.value(v)) for v in sp.vertex_ids))
        coords = sorted(
            set(values)
            | {(a + b) / 2 for a, b in zip(values, values[1:])}
            | {values[0] - 1, values[-1] + 1}
        )
        grid = multiplicity_grid(sp, coords)
        for (x, y), got in grid.items():
            assert got == expected.get((x, y), 0)
            cases += 1
        for k in coords:
            want = 1 if k == diagram.infinity_x else 0
            assert multiplicity_at_infinity(sp, k) == want
            cases += 1
    _finish(2, "four-point counts equal extracted multiplicities", cases, start)


def test_criterion_3_stability_under_value_perturbation():
    """Matching distance never exceeds the sup-norm size of a perturbation."""
    start = time.perf_counter()
    rng = random.Random(1003)
    cases = 0
    for _ in range(500):
        sp = random_size_pair(rng, max_vertices=12)
        epsilon = F(rng.randint(0, 16), 8)
        moved = perturbed_values(rng, sp, epsilon)
        value, holds = stability_probe(sp, moved, epsilon)
        assert holds and value <= epsilon
        cases += 1
    _finish(3, "d_match <= perturbation sup-norm", cases, start)


def test_criterion_4_solver_equals_exhaustive_oracle():
    """The matching solver agrees exactly with full assignment enumeration."""
    start = time.perf_counter()
    rng = random.Random(1004)
    cases = 0
    for _ in range(300):
        d1 = random_diagram(rng, max_points=8, max_multiplicity=3)
        d2 = random_diagram(rng, max_points=8, max_multiplicity=3)
        solver, witness = matching_distance(d1, d2)
        brute = brute_force_matching_distance(d1, d2, cap=8)
        assert solver == brute
        witness.verify(d1, d2)
        cases += 1
    _finish(4, "solver == brute force, witness verified", cases, start)


def test_criterion_5_matching_distance_metric_axioms():
    """Identity, symmetry, and the triangle inequality hold exactly."""
    start = time.perf_counter()
    rng = random.Random(1005)
    cases = 0
    for _ in range(300):
        a = random_diagram(rng)
        b = random_diagram(rng)
        c = random_diagram(rng)
        assert matching_distance(a, a)[0] == 0
        ab = matching_distance(a, b)[0]
        ba = matching_distance(b, a)[0]
        assert ab == ba
        bc = matching_distance(b, c)[0]
        ac = matching_distance(a, c)[0]
        assert ac <= ab + bc
        cases += 1
    _finish(5, "metric axioms, exact rational arithmetic", cases, start)


def test_criterion_6_bound_chain_brackets_exact_distance():
    """earlier_bound <= d_match <= exact distance on isomorphic pairs."""
    start = time.perf_counter()
    rng = random.Random(1006)
    cases = 0
    for _ in range(100):
        sp1, sp2 = random_isomorphic_pair(rng, max_vertices=8)
        report = bound_report(sp1, sp2, cap=8)
        assert report.exact is not None, report.note
        assert report.earlier <= report.d_match <= report.exact
        cases += 1
    _finish(6, "lower and upper bounds bracket the exact distance", cases, start)


def test_criterion_7_realization_attains_matching_distance():
    """Realized fields extract back to their diagrams and their node gap
    equals the matching distance exactly, stable under grid refinement."""
    start = time.perf_counter()
    rng = random.Random(1007)
    cases = 0
    for _ in range(100):
        d1 = random_diagram(rng, max_points=5)
        d2 = random_diagram(rng, max_points=5)
        phi, psi, params = realize(d1, d2)
        assert extract_diagram(discretize(phi, 1)) == d1
        assert extract_diagram(discretize(psi, 1)) == d2
        assert extract_diagram(discretize(phi, 2)) == d1
        assert extract_diagram(discretize(psi, 2)) == d2
        gap = max_field_gap(phi, psi)
        value, _ = matching_distance(d1, d2)
        assert gap == params.d_match == value
        cases += 1
    _finish(7, "field gap == d_match, refinement-stable round trips", cases, start)


def test_criterion_8_frozen_fixture_identities():
    """Hand-computed integer identities on the path and star fixtures."""
    start = time.perf_counter()
    path = SizePair(
        [("a", 0), ("b", 2), ("c", 1), ("d", 3), ("e", 0)],
        [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")],
    )
    # two components below the first merge, one above the last, none left
    # of the global minimum
    assert reduced_size_function(path, F(1, 2), 1) == 2
    assert reduced_size_function(path, F(1, 2), 3) == 1
    assert reduced_size_function(path, F(-1, 2), 2) == 0
    d = extract_diagram(path)
    assert evaluate_diagram(d, F(1, 2), 1) == 2
    assert evaluate_diagram(d, F(1, 2), 3) == 1
    assert evaluate_diagram(d, F(-1, 2), 2) == 0
    assert multiplicity(path, 1, 2) == 1
    assert multiplicity(path, 0, 3) == 1
    assert multiplicity(path, F(3, 4), 2) == 0
    assert multiplicity_at_infinity(path, 0) == 1

    star = SizePair(
        [("c", 1), ("l1", 0), ("l2", 0), ("l3", 0)],
        [("c", "l1"), ("c", "l2"), ("c", "l3")],
    )
    # three components at (0, 1/2): one on the line at infinity plus a
    # double cornerpoint at (0, 1)
    assert reduced_size_function(star, 0, F(1, 2)) == 3
    assert multiplicity_at_infinity(star, 0) + multiplicity(star, 0, 1) == 3
    assert extract_diagram(star).total_multiplicity == 2
    _finish(8, "frozen path and star identities", 14, start)
