"""Seeded self-check suites, shared by the CLI `selftest` command and the tests.

Each suite draws its cases from its own deterministic RNG (derived from the
user seed), checks an exact property, and on failure shrinks the offending
instance greedily (drop a vertex / drop a point while the failure persists)
before reporting it.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from ._rational import as_fraction, number_to_json
from .core import (
    ModelViolationError,
    SizePair,
    _quarter_gap_grid,
    size_function_on_grid,
)
from .diagram import Diagram, evaluate_diagram_on_grid, extract_diagram
from .matching import (
    brute_force_matching_distance,
    matching_distance,
    stability_probe,
)
from .bounds import bound_report, earlier_bound_grid_oracle
from .realize import RectField, discretize, realize

__all__ = [
    "SuiteResult",
    "run_selftest",
    "random_size_pair",
    "random_diagram",
    "random_isomorphic_pair",
    "perturbed_values",
]


@dataclass
class SuiteResult:
    name: str
    status: str  # "pass" | "fail" | "skip"
    cases: int
    seconds: float
    message: str = ""
    counterexample: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.status != "fail"


# ---------------------------------------------------------------- generators


def random_size_pair(rng: random.Random, max_vertices: int = 10) -> SizePair:
    """Random connected graph with dyadic float values (plenty of ties)."""
    n = rng.randint(1, max_vertices)
    vertices = [(f"v{i}", rng.randint(0, 32) / 8) for i in range(n)]
    edges = []
    for i in range(1, n):
        edges.append((f"v{i}", f"v{rng.randrange(i)}"))
    present = {frozenset(e) for e in edges}
    for _ in range(rng.randint(0, 3)):
        if n < 2:
            break
        a, b = rng.sample(range(n), 2)
        key = frozenset((f"v{a}", f"v{b}"))
        if key not in present:
            present.add(key)
            edges.append((f"v{a}", f"v{b}"))
    return SizePair(vertices, edges)


def perturbed_values(rng: random.Random, sp: SizePair, epsilon) -> Dict:
    """Values moved by at most epsilon in sup norm (exact rationals)."""
    eps = as_fraction(epsilon)
    return {
        v: as_fraction(sp.value(v)) + eps * Fraction(rng.randint(-8, 8), 8)
        for v in sp.vertex_ids
    }


def random_diagram(
    rng: random.Random, max_points: int = 4, max_multiplicity: int = 2
) -> Diagram:
    """Random diagram with rational coordinates, localized above infinity_x."""
    infinity_x = Fraction(rng.randint(-8, 8), 4)
    target = rng.randint(0, max_points)
    entries = []
    total = 0
    while total < target:
        mult = min(rng.randint(1, max_multiplicity), target - total)
        x = infinity_x + Fraction(rng.randint(0, 10), 4)
        y = x + Fraction(rng.randint(1, 8), 4)
        entries.append(((x, y), mult))
        total += mult
    return Diagram(infinity_x, entries)


def random_isomorphic_pair(rng: random.Random, max_vertices: int = 6) -> Tuple[SizePair, SizePair]:
    """A graph and a relabeled copy with shifted-plus-jittered values."""
    sp1 = random_size_pair(rng, max_vertices)
    ids = list(sp1.vertex_ids)
    images = [f"w{i}" for i in range(len(ids))]
    rng.shuffle(images)
    mapping = dict(zip(ids, images))
    shift = Fraction(rng.randint(-4, 4), 2)
    vertices = [
        (mapping[v], as_fraction(sp1.value(v)) + shift + Fraction(rng.randint(-2, 2), 8))
        for v in ids
    ]
    edges = [(mapping[u], mapping[v]) for u, v in sp1.edges]
    return sp1, SizePair(vertices, edges)


# ------------------------------------------------------------------ helpers


def _grid_for(sp: SizePair) -> List[Fraction]:
    grid = list(_quarter_gap_grid(sp.critical_values))
    grid.insert(0, grid[0] - 1)
    grid.append(grid[-1] + 1)
    return grid


def _graph_dump(sp: SizePair) -> dict:
    return {
        "vertices": [[str(v), number_to_json(sp.value(v))] for v in sp.vertex_ids],
        "edges": [[str(u), str(v)] for u, v in sp.edges],
    }


def _shrink_graph(sp: SizePair, still_fails: Callable[[SizePair], bool]) -> SizePair:
    changed = True
    while changed and sp.n_vertices > 1:
        changed = False
        for victim in sp.vertex_ids:
            try:
                smaller = SizePair(
                    [(v, sp.value(v)) for v in sp.vertex_ids if v != victim],
                    [e for e in sp.edges if victim not in e],
                )
            except ModelViolationError:
                continue
            try:
                if still_fails(smaller):
                    sp = smaller
                    changed = True
                    break
            except Exception:
                sp = smaller
                changed = True
                break
    return sp


def _shrink_diagram_pair(d1, d2, still_fails):
    changed = True
    while changed:
        changed = False
        for side in (0, 1):
            source = (d1, d2)[side]
            for index in range(len(source.points)):
                points = list(source.points)
                point, mult = points[index]
                if mult > 1:
                    points[index] = (point, mult - 1)
                else:
                    points.pop(index)
                candidate = Diagram(source.infinity_x, points)
                trial = (candidate, d2) if side == 0 else (d1, candidate)
                try:
                    failing = still_fails(*trial)
                except Exception:
                    failing = True
                if failing:
                    d1, d2 = trial
                    changed = True
                    break
            if changed:
                break
    return d1, d2


# ------------------------------------------------------------------- suites


def _suite(name, total, body, *, skip=False, skip_reason=""):
    if skip:
        return SuiteResult(name, "skip", 0, 0.0, skip_reason)
    start = time.perf_counter()
    for case_index in range(total):
        try:
            body(case_index)
        except AssertionError as exc:
            elapsed = time.perf_counter() - start
            detail = exc.args[0] if exc.args else ""
            message = detail if isinstance(detail, str) else detail.get("message", "")
            counterexample = None if isinstance(detail, str) else detail.get("counterexample")
            return SuiteResult(name, "fail", case_index + 1, elapsed, message, counterexample)
        except Exception as exc:  # a check helper raised instead of asserting
            elapsed = time.perf_counter() - start
            return SuiteResult(
                name, "fail", case_index + 1, elapsed, f"{type(exc).__name__}: {exc}"
            )
    return SuiteResult(name, "pass", total, time.perf_counter() - start)


def _fail(message: str, counterexample: Optional[dict] = None):
    raise AssertionError({"message": message, "counterexample": counterexample})


def _representation_suite(seed: int, scale: int) -> SuiteResult:
    rng = random.Random(f"{seed}:representation")

    def identity_gap(sp: SizePair):
        grid = _grid_for(sp)
        direct = size_function_on_grid(sp, grid, grid)
        diagram = extract_diagram(sp)
        represented = evaluate_diagram_on_grid(diagram, grid, grid)
        for key, value in direct.items():
            if represented[key] != value:
                return key, value, represented[key]
        return None

    def body(_):
        sp = random_size_pair(rng)
        bad = identity_gap(sp)
        if bad is not None:
            shrunk = _shrink_graph(sp, lambda g: identity_gap(g) is not None)
            key, direct_value, repr_value = identity_gap(shrunk) or bad
            _fail(
                f"representation mismatch at {key}: direct {direct_value}, diagram {repr_value}",
                _graph_dump(shrunk),
            )
        diagram = extract_diagram(sp)
        if Diagram.loads(diagram.dumps()) != diagram:
            _fail("diagram JSON round-trip is not bit-exact", _graph_dump(sp))

    return _suite("representation_round_trips", 20 * scale, body)


def _metric_suite(seed: int, scale: int) -> SuiteResult:
    rng = random.Random(f"{seed}:metric")

    def body(_):
        a = random_diagram(rng)
        b = random_diagram(rng)
        c = random_diagram(rng)
        dump = {"a": a.to_json_dict(), "b": b.to_json_dict(), "c": c.to_json_dict()}
        daa, _ = matching_distance(a, a)
        if daa != 0:
            _fail(f"d(a, a) = {daa} != 0", dump)
        dab, mab = matching_distance(a, b)
        dba, _ = matching_distance(b, a)
        if dab != dba:
            _fail(f"symmetry violated: {dab} vs {dba}", dump)
        mab.verify(a, b)
        dac, _ = matching_distance(a, c)
        dbc, _ = matching_distance(b, c)
        if dac > dab + dbc:
            _fail(f"triangle violated: {dac} > {dab} + {dbc}", dump)

    return _suite("metric_axioms", 40 * scale, body)


def _stability_suite(seed: int, scale: int) -> SuiteResult:
    rng = random.Random(f"{seed}:stability")

    def body(_):
        sp = random_size_pair(rng)
        epsilon = Fraction(rng.randint(0, 8), 8)
        moved = perturbed_values(rng, sp, epsilon)
        value, holds = stability_probe(sp, moved, epsilon)
        if not holds:
            def still_fails(g):
                sub = {v: moved[v] for v in g.vertex_ids}
                return not stability_probe(g, sub, epsilon)[1]

            shrunk = _shrink_graph(sp, still_fails)
            _fail(
                f"stability violated: d_match {value} > epsilon {epsilon}",
                {
                    "graph": _graph_dump(shrunk),
                    "perturbed": [
                        [str(v), number_to_json(moved[v])] for v in shrunk.vertex_ids
                    ],
                    "epsilon": number_to_json(epsilon),
                },
            )

    return _suite("stability_fuzz", 40 * scale, body)


def _oracle_suite(seed: int, scale: int, cap: int) -> SuiteResult:
    rng = random.Random(f"{seed}:oracle")
    points = min(cap, 5)

    def disagree(d1, d2):
        solver, witness = matching_distance(d1, d2)
        brute = brute_force_matching_distance(d1, d2, cap=max(cap, 1))
        witness.verify(d1, d2)
        return solver != brute

    def body(_):
        d1 = random_diagram(rng, max_points=points)
        d2 = random_diagram(rng, max_points=points)
        if disagree(d1, d2):
            d1, d2 = _shrink_diagram_pair(d1, d2, disagree)
            solver, _ = matching_distance(d1, d2)
            brute = brute_force_matching_distance(d1, d2, cap=max(cap, 1))
            _fail(
                f"solver {solver} != brute force {brute}",
                {"d1": d1.to_json_dict(), "d2": d2.to_json_dict()},
            )

    return _suite(
        "oracle_equivalence",
        30 * scale,
        body,
        skip=cap == 0,
        skip_reason="cap=0: exhaustive oracle disabled",
    )


def _bound_chain_suite(seed: int, scale: int, cap: int) -> SuiteResult:
    rng = random.Random(f"{seed}:chain")
    vertices = min(cap, 6)

    def body(_):
        sp1, sp2 = random_isomorphic_pair(rng, max_vertices=max(vertices, 1))
        report = bound_report(sp1, sp2, cap=max(cap, 1))
        dump = {"graph1": _graph_dump(sp1), "graph2": _graph_dump(sp2)}
        d1 = extract_diagram(sp1)
        d2 = extract_diagram(sp2)
        coarse = earlier_bound_grid_oracle(d1, d2, 0)
        finer = earlier_bound_grid_oracle(d1, d2, 1)
        if not coarse <= finer <= report.earlier:
            _fail(
                f"grid oracle not monotone below the bound: {coarse}, {finer}, {report.earlier}",
                dump,
            )
        if report.exact is None:
            _fail(f"expected an exact distance for isomorphic graphs: {report.note}", dump)
        if not report.earlier <= report.d_match <= report.exact:
            _fail(
                f"bound chain violated: {report.earlier} <= {report.d_match} <= {report.exact}",
                dump,
            )

    return _suite(
        "bound_chain",
        10 * scale,
        body,
        skip=cap == 0,
        skip_reason="cap=0: isomorphism search disabled",
    )


def _realization_suite(seed: int, scale: int) -> SuiteResult:
    rng = random.Random(f"{seed}:realization")

    def body(_):
        d1 = random_diagram(rng, max_points=3)
        d2 = random_diagram(rng, max_points=3)
        dump = {"d1": d1.to_json_dict(), "d2": d2.to_json_dict()}
        phi, psi, params = realize(d1, d2)
        for name_, field_, target in (("phi", phi, d1), ("psi", psi, d2)):
            if RectField.loads(field_.dumps()) != field_:
                _fail(f"{name_} JSON round-trip is not bit-exact", dump)
            if extract_diagram(discretize(field_, 2)) != target:
                _fail(f"{name_} extraction changes under refinement", dump)

    return _suite("realization_round_trips", 8 * scale, body)


def run_selftest(seed: int = 0, cap: int = 8, scale: int = 1) -> Tuple[List[SuiteResult], bool]:
    """Run all suites; returns (results, all_ok)."""
    results = [
        _representation_suite(seed, scale),
        _metric_suite(seed, scale),
        _stability_suite(seed, scale),
        _oracle_suite(seed, scale, cap),
        _bound_chain_suite(seed, scale, cap),
        _realization_suite(seed, scale),
    ]
    return results, all(r.ok for r in results)
