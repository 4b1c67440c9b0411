"""Bottleneck matching distance: ground distance, solver, oracle, stability."""

import math
import random
from fractions import Fraction as F

import pytest

from sizematch import (
    DIAGONAL,
    Diagram,
    ExtendedPoint,
    Matching,
    SizePair,
    brute_force_matching_distance,
    extract_diagram,
    matching_distance,
    pseudo_distance_d,
    stability_probe,
)
from sizematch.selftest import perturbed_values, random_diagram, random_size_pair

from test_core import path_fixture


# ------------------------------------------------------------ ground metric


def test_pseudo_distance_proper_pairs():
    assert pseudo_distance_d(ExtendedPoint(1, 3), ExtendedPoint(2, 4)) == 1
    # through the diagonal: persistences 2 and 0.2, so 1 beats max-norm 9
    assert pseudo_distance_d(ExtendedPoint(1, F(3, 2)), ExtendedPoint(10, F(51, 5))) == F(1, 4)


def test_pseudo_distance_diagonal():
    assert pseudo_distance_d(ExtendedPoint(1, 3), DIAGONAL) == 1
    assert pseudo_distance_d(DIAGONAL, ExtendedPoint(0, F(1, 2))) == F(1, 4)
    assert pseudo_distance_d(DIAGONAL, DIAGONAL) == 0


def test_pseudo_distance_infinity_conventions():
    a = ExtendedPoint.at_infinity(0)
    b = ExtendedPoint.at_infinity(2)
    assert pseudo_distance_d(a, b) == 2  # inf - inf treated as 0 in the y slot
    assert pseudo_distance_d(a, a) == 0
    assert pseudo_distance_d(a, ExtendedPoint(1, 2)) == math.inf
    assert pseudo_distance_d(a, DIAGONAL) == math.inf


def test_pseudo_distance_symmetry_seeded():
    rng = random.Random(60)
    for _ in range(60):
        pts = []
        for _ in range(2):
            x = F(rng.randint(-8, 8), 4)
            pts.append(ExtendedPoint(x, x + F(rng.randint(1, 9), 4)))
        p, q = pts
        assert pseudo_distance_d(p, q) == pseudo_distance_d(q, p)


# ------------------------------------------------------- solver worked cases


def test_distance_single_point_to_empty():
    d1 = Diagram(0, [((1, 3), 1)])
    d2 = Diagram(0, [])
    value, m = matching_distance(d1, d2)
    assert value == 1  # (1,3) retracts onto the diagonal at cost 1
    assert m.cost == 1
    assert (ExtendedPoint(1, 3), DIAGONAL) in m.pairs
    m.verify(d1, d2)


def test_distance_path_example():
    d1 = extract_diagram(path_fixture())
    d2 = Diagram(F(1, 2), [((F(6, 5), F(21, 10)), 1)])
    value, m = matching_distance(d1, d2)
    assert value == F(6, 5)
    m.verify(d1, d2)


def test_distance_infinity_gap_dominates():
    d1 = Diagram(0, [])
    d2 = Diagram(F(7, 2), [])
    value, m = matching_distance(d1, d2)
    assert value == F(7, 2)
    assert m.pairs == ((ExtendedPoint.at_infinity(0), ExtendedPoint.at_infinity(F(7, 2))),)


def test_distance_prefers_direct_over_diagonal():
    d1 = Diagram(0, [((2, 10), 1)])
    d2 = Diagram(0, [((F(5, 2), 10), 1)])
    value, m = matching_distance(d1, d2)
    assert value == F(1, 2)
    assert (ExtendedPoint(2, 10), ExtendedPoint(F(5, 2), 10)) in m.pairs


def test_distance_multiplicity_expansion():
    # one side stacks two copies; both must be matched separately
    d1 = Diagram(0, [((1, 5), 2)])
    d2 = Diagram(0, [((1, 5), 1)])
    value, m = matching_distance(d1, d2)
    assert value == 2  # second copy dies to the diagonal
    m.verify(d1, d2)


def test_identity_and_symmetry_exact():
    rng = random.Random(61)
    for _ in range(40):
        a = random_diagram(rng)
        b = random_diagram(rng)
        assert matching_distance(a, a)[0] == 0
        assert matching_distance(a, b)[0] == matching_distance(b, a)[0]


def test_triangle_inequality_exact():
    rng = random.Random(62)
    for trial in range(60):
        a = random_diagram(rng)
        b = random_diagram(rng)
        c = random_diagram(rng)
        ab = matching_distance(a, b)[0]
        bc = matching_distance(b, c)[0]
        ac = matching_distance(a, c)[0]
        assert ac <= ab + bc, f"trial {trial}: {ac} > {ab} + {bc}"


def test_solver_agrees_with_brute_force():
    rng = random.Random(63)
    for trial in range(120):
        d1 = random_diagram(rng, max_points=5)
        d2 = random_diagram(rng, max_points=5)
        solver, m = matching_distance(d1, d2)
        brute = brute_force_matching_distance(d1, d2)
        assert solver == brute, f"trial {trial}: {solver} != {brute}"
        m.verify(d1, d2)


def test_brute_force_cap():
    d = Diagram(0, [((1, 2), 9)])
    with pytest.raises(ValueError):
        brute_force_matching_distance(d, d, cap=8)
    assert brute_force_matching_distance(d, d, cap=9) == 0


def test_witness_is_deterministic_and_lex_minimal():
    d1 = Diagram(0, [((0, 4), 1), ((1, 3), 1)])
    d2 = Diagram(0, [((0, 4), 1), ((1, 3), 1)])
    _, m1 = matching_distance(d1, d2)
    _, m2 = matching_distance(d1, d2)
    assert m1 == m2
    # identical diagrams at distance 0: the witness must be the identity
    pairs = {(l, r) for l, r in m1.pairs if not (l is not DIAGONAL and l.is_at_infinity)}
    assert pairs == {
        (ExtendedPoint(0, 4), ExtendedPoint(0, 4)),
        (ExtendedPoint(1, 3), ExtendedPoint(1, 3)),
    }


def test_witness_cost_is_max_of_pair_costs():
    rng = random.Random(64)
    for _ in range(40):
        d1 = random_diagram(rng)
        d2 = random_diagram(rng)
        value, m = matching_distance(d1, d2)
        grounds = [pseudo_distance_d(l, r) for l, r in m.pairs]
        assert max(grounds) == value == m.cost


# ------------------------------------------------------------- verification


def test_verify_rejects_wrong_cost():
    d1 = Diagram(0, [((1, 3), 1)])
    d2 = Diagram(0, [])
    _, m = matching_distance(d1, d2)
    bad = Matching(pairs=m.pairs, cost=m.cost + 1)
    with pytest.raises(ValueError):
        bad.verify(d1, d2)


def test_verify_rejects_missing_point():
    d1 = Diagram(0, [((1, 3), 1)])
    d2 = Diagram(0, [])
    only_inf = Matching(
        pairs=((ExtendedPoint.at_infinity(0), ExtendedPoint.at_infinity(0)),),
        cost=F(1),
    )
    with pytest.raises(ValueError):
        only_inf.verify(d1, d2)


def test_verify_rejects_missing_infinity_pair():
    d1 = Diagram(0, [])
    d2 = Diagram(0, [])
    with pytest.raises(ValueError):
        Matching(pairs=(), cost=F(0)).verify(d1, d2)


def test_verify_rejects_diagonal_to_diagonal():
    d1 = Diagram(0, [])
    d2 = Diagram(0, [])
    m = Matching(
        pairs=(
            (ExtendedPoint.at_infinity(0), ExtendedPoint.at_infinity(0)),
            (DIAGONAL, DIAGONAL),
        ),
        cost=F(0),
    )
    with pytest.raises(ValueError):
        m.verify(d1, d2)


# --------------------------------------------------------------------- JSON


def test_matching_json_round_trip():
    # JSON carries plain floats, so the round trip is bit-exact exactly when
    # every coordinate is float-representable (here: dyadic rationals)
    d1 = extract_diagram(path_fixture())
    d2 = Diagram(F(1, 2), [((F(5, 4), F(17, 8)), 1)])
    _, m = matching_distance(d1, d2)
    data = m.to_json_dict()
    again = Matching.from_json_dict(data, infinity_left=d1.infinity_x, infinity_right=d2.infinity_x)
    again.verify(d1, d2)
    assert again.cost == m.cost
    assert again == m


def test_matching_json_needs_infinity_context():
    d1 = Diagram(0, [])
    d2 = Diagram(1, [])
    _, m = matching_distance(d1, d2)
    with pytest.raises(ValueError):
        Matching.from_json_dict(m.to_json_dict())


def test_matching_json_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Matching.from_json_dict({"cost": 0})
    with pytest.raises(ValueError):
        Matching.from_json_dict({"cost": 0, "pairs": [{"left": "diag"}]})
    with pytest.raises(ValueError):
        Matching.from_json_dict({"cost": 0, "pairs": [{"left": "what", "right": "diag"}]})


# ---------------------------------------------------------------- stability


def test_stability_probe_holds_within_epsilon():
    sp = path_fixture()
    moved = {"a": F(1, 4), "b": 2, "c": F(3, 4), "d": F(13, 4), "e": 0}
    value, holds = stability_probe(sp, moved, F(1, 4))
    assert holds
    assert value <= F(1, 4)


def test_stability_probe_rejects_oversized_perturbation():
    sp = path_fixture()
    moved = {"a": 1, "b": 2, "c": 1, "d": 3, "e": 0}
    with pytest.raises(ValueError):
        stability_probe(sp, moved, F(1, 2))


def test_stability_probe_rejects_wrong_key_set():
    sp = path_fixture()
    with pytest.raises(ValueError):
        stability_probe(sp, {"a": 0}, 1)


def test_stability_probe_rejects_negative_epsilon():
    sp = path_fixture()
    with pytest.raises(ValueError):
        stability_probe(sp, {v: sp.value(v) for v in sp.vertex_ids}, -1)


def test_stability_fuzz_seeded():
    rng = random.Random(65)
    for trial in range(80):
        sp = random_size_pair(rng, max_vertices=9)
        epsilon = F(rng.randint(0, 12), 8)
        moved = perturbed_values(rng, sp, epsilon)
        value, holds = stability_probe(sp, moved, epsilon)
        assert holds, f"trial {trial}: d_match {value} > {epsilon}"
