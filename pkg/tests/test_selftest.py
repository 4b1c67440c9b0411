"""The property-suite runner itself: generators, statuses, determinism."""

import random
from fractions import Fraction as F

from sizematch import SizePair, run_selftest
from sizematch.selftest import (
    SuiteResult,
    perturbed_values,
    random_diagram,
    random_isomorphic_pair,
    random_size_pair,
)


def test_generators_produce_valid_objects():
    rng = random.Random(90)
    for _ in range(50):
        sp = random_size_pair(rng)
        assert isinstance(sp, SizePair)
        assert 1 <= sp.n_vertices <= 10
        d = random_diagram(rng)
        for p, m in d.points:
            assert p.x >= d.infinity_x and m >= 1


def test_perturbed_values_stay_within_epsilon():
    rng = random.Random(91)
    for _ in range(50):
        sp = random_size_pair(rng)
        eps = F(rng.randint(0, 8), 8)
        moved = perturbed_values(rng, sp, eps)
        assert set(moved) == set(sp.vertex_ids)
        for v in sp.vertex_ids:
            assert abs(moved[v] - F(sp.value(v))) <= eps


def test_isomorphic_pair_preserves_shape():
    rng = random.Random(92)
    for _ in range(30):
        sp1, sp2 = random_isomorphic_pair(rng)
        assert sp1.n_vertices == sp2.n_vertices
        assert sp1.n_edges == sp2.n_edges
        assert sorted(sp1.degree(v) for v in sp1.vertex_ids) == sorted(
            sp2.degree(v) for v in sp2.vertex_ids
        )


def test_run_selftest_passes_and_is_deterministic():
    results, ok = run_selftest(seed=123, cap=6, scale=1)
    again, ok2 = run_selftest(seed=123, cap=6, scale=1)
    assert ok and ok2
    assert [r.name for r in results] == [r.name for r in again]
    assert [r.status for r in results] == [r.status for r in again]
    assert [r.cases for r in results] == [r.cases for r in again]
    assert all(isinstance(r, SuiteResult) and r.status == "pass" for r in results)


def test_run_selftest_cap_zero_skips():
    results, ok = run_selftest(seed=1, cap=0, scale=1)
    assert ok
    by_name = {r.name: r for r in results}
    assert by_name["oracle_equivalence"].status == "skip"
    assert by_name["bound_chain"].status == "skip"
    assert by_name["metric_axioms"].status == "pass"
