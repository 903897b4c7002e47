"""Covering maps: verification, lifting, cover generators, degree refinement."""
from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from covertrace import (
    BeamMark,
    BeamSensor,
    ControlSignal,
    Dart,
    DegreeSensor,
    Environment,
    FilteredSensor,
    GraphMap,
    LabelSensor,
    PortedGraph,
    PreconditionError,
    ValidationError,
    VertexState,
    build_edges,
    cyclic_cover,
    degree_refinement,
    lift_environment,
    lift_sensor,
    lift_state_path,
    pullback_sensor,
    relabel_environment,
    trace_of,
    trajectory,
    universal_cover_truncation,
    verify_covering,
)
from covertrace.gallery import crossing_pair
from covertrace.generate import (
    random_ported_graph,
    random_signal,
    random_voltages,
)

from helpers import (
    figure_eight_env,
    path_middle_env,
    three_cycle,
    three_cycle_env,
)


def sig(*pieces) -> ControlSignal:
    return ControlSignal(pieces)


def six_cycle() -> PortedGraph:
    names = [f"y{i}" for i in range(6)]
    return PortedGraph(
        names,
        build_edges([(f"y{i}", f"y{(i + 1) % 6}", 0, 1) for i in range(6)]),
    )


def doubling_map() -> GraphMap:
    return GraphMap.from_vertex_map(
        six_cycle(), {f"y{i}": f"x{i % 3}" for i in range(6)}
    )


def six_cycle_env(sensor=None, width=2) -> Environment:
    return Environment(six_cycle(), "y0", sensor or DegreeSensor(), width)


def identity_map(g: PortedGraph) -> GraphMap:
    return GraphMap.from_vertex_map(g, {v: v for v in g.vertices})


def theta() -> PortedGraph:
    return PortedGraph(
        ["u", "v"],
        build_edges([("u", "v", 0, 0), ("u", "v", 1, 1), ("u", "v", 2, 2)]),
    )


def digon() -> PortedGraph:
    return PortedGraph(["u", "v"], build_edges([("u", "v", 0, 0), ("u", "v", 1, 1)]))


class TestVerifyCovering:
    def test_identity_is_positive(self):
        env = three_cycle_env()
        cert = verify_covering(identity_map(env.graph), env, env)
        assert cert.positive
        assert cert.failures == ()

    def test_doubling_is_positive(self):
        cert = verify_covering(doubling_map(), six_cycle_env(), three_cycle_env())
        assert cert.positive

    def test_collapsing_parallel_edges_fails_star_bijection(self):
        source = Environment(theta(), "u", DegreeSensor(), 3)
        target = Environment(digon(), "u", DegreeSensor(), 3)
        collapse = GraphMap(
            {"u": "u", "v": "v"},
            {
                Dart("u", 0): Dart("u", 0),
                Dart("v", 0): Dart("v", 0),
                Dart("u", 1): Dart("u", 1),
                Dart("v", 1): Dart("v", 1),
                Dart("u", 2): Dart("u", 1),
                Dart("v", 2): Dart("v", 1),
            },
        )
        cert = verify_covering(collapse, source, target)
        assert not cert.positive
        assert not cert.local_bijection
        assert cert.surjective and cert.lengths_preserved and cert.base_point

    def test_base_point_flag(self):
        wrong_base = Environment(six_cycle(), "y1", DegreeSensor(), 2)
        cert = verify_covering(doubling_map(), wrong_base, three_cycle_env())
        assert not cert.base_point and not cert.positive

    def test_partial_map_rejected(self):
        env = three_cycle_env()
        broken = GraphMap({"x0": "x0", "x1": "x1"}, {})
        with pytest.raises(ValidationError):
            verify_covering(broken, env, env)

    def test_head_mismatch_names_dart(self):
        env = three_cycle_env()
        g = env.graph
        dmap = {d: d for d in g.darts()}
        dmap[Dart("x0", 0)] = Dart("x0", 1)
        dmap[Dart("x1", 1)] = Dart("x2", 0)
        with pytest.raises(ValidationError, match="x0"):
            verify_covering(GraphMap({v: v for v in g.vertices}, dmap), env, env)

    def test_length_change_flagged(self):
        stretched = PortedGraph(
            ["x0", "x1", "x2"],
            [
                replace(e, length=Fraction(2)) if i == 0 else e
                for i, e in enumerate(three_cycle().edges)
            ],
        )
        env = Environment(stretched, "x0", DegreeSensor(), 2)
        cert = verify_covering(identity_map(stretched), env, three_cycle_env())
        assert not cert.lengths_preserved


class TestSensorPullback:
    def test_degree_pulls_back_to_degree(self):
        assert lift_sensor(
            doubling_map(), six_cycle_env(), three_cycle_env()
        ) == DegreeSensor()

    def test_one_mark_becomes_two(self):
        base = three_cycle_env(
            BeamSensor((BeamMark(0, Fraction(1, 2), "green"),)), 2
        )
        lifted = lift_sensor(doubling_map(), six_cycle_env(), base)
        assert isinstance(lifted, BeamSensor)
        found = {(m.edge, m.offset, m.label) for m in lifted.marks}
        assert found == {(0, Fraction(1, 2), "green"), (3, Fraction(1, 2), "green")}

    def test_identity_pullback_is_unchanged(self):
        g = three_cycle()
        ident = identity_map(g)
        for sensor in (
            DegreeSensor(),
            LabelSensor({"x0": 1, "x1": 2, "x2": 3}, (4, 5, 6)),
            BeamSensor((BeamMark(2, Fraction(1, 3), "b"),)),
            FilteredSensor(DegreeSensor(), {2: "v"}),
        ):
            assert pullback_sensor(ident, g, g, sensor) == sensor

    def test_rejects_non_covering(self):
        source = Environment(theta(), "u", DegreeSensor(), 3)
        target = Environment(digon(), "u", DegreeSensor(), 3)
        collapse = GraphMap(
            {"u": "u", "v": "v"},
            {
                Dart("u", 0): Dart("u", 0),
                Dart("v", 0): Dart("v", 0),
                Dart("u", 1): Dart("u", 1),
                Dart("v", 1): Dart("v", 1),
                Dart("u", 2): Dart("u", 1),
                Dart("v", 2): Dart("v", 1),
            },
        )
        with pytest.raises(PreconditionError):
            lift_sensor(collapse, source, target)


class TestLiftStatePath:
    def test_identity_lift(self):
        env = three_cycle_env()
        u = sig((0, 2), ("halt", 1))
        assert lift_state_path(identity_map(env.graph), env, env, u) == trajectory(env, u)

    def test_closed_loop_opens_upstairs(self):
        lift = lift_state_path(doubling_map(), six_cycle_env(), three_cycle_env(), sig((0, 3)))
        assert lift.final == VertexState("y3")

    def test_double_loop_closes_upstairs(self):
        lift = lift_state_path(doubling_map(), six_cycle_env(), three_cycle_env(), sig((0, 6)))
        assert lift.final == VertexState("y0")

    def test_lift_commutation(self):
        rng = random.Random(41)
        pairs = [
            (identity_map(three_cycle()), three_cycle_env(), three_cycle_env()),
            (doubling_map(), six_cycle_env(), three_cycle_env()),
        ]
        fig8 = figure_eight_env()
        cover, proj = cyclic_cover(fig8, 2, (1, 0))
        pairs.append((proj, cover, fig8))
        for _ in range(200):
            f, src, dst = rng.choice(pairs)
            u = random_signal(rng, dst.alphabet_width, max_pieces=4)
            lifted = lift_state_path(f, src, dst, u)
            base = trajectory(dst, u)
            assert lifted.duration == base.duration
            for t, state in lifted.breakpoints():
                assert f.state(dst.graph, state) == base.at(t)
            t = u.duration * Fraction(rng.randint(0, 7), 7)
            assert f.state(dst.graph, lifted.at(t)) == base.at(t)

    def test_pullback_traces_match_base(self):
        rng = random.Random(42)
        base = three_cycle_env(
            BeamSensor((BeamMark(0, Fraction(1, 2), "green"),)), 2
        )
        lifted_env = lift_environment(doubling_map(), six_cycle_env(), base)
        for _ in range(100):
            u = random_signal(rng, 2, max_pieces=4)
            assert trace_of(lifted_env, u) == trace_of(base, u)


class TestCyclicCover:
    def test_order_one_is_isomorphic_copy(self):
        env = three_cycle_env()
        cover, proj = cyclic_cover(env, 1, (0, 0, 0))
        assert len(cover.graph.vertices) == 3
        assert len(cover.graph.edges) == 3
        assert cover.initial == "x0@0"
        assert verify_covering(proj, cover, env).positive

    def test_unit_voltages_give_six_cycle(self):
        env = three_cycle_env()
        cover, proj = cyclic_cover(env, 2, (1, 1, 1))
        assert len(cover.graph.vertices) == 6
        assert len(cover.graph.edges) == 6
        assert all(cover.graph.degree(v) == 2 for v in cover.graph.vertices)
        assert verify_covering(proj, cover, env).positive

    def test_figure_eight_two_fold(self):
        env = figure_eight_env()
        cover, proj = cyclic_cover(env, 2, (1, 0))
        assert len(cover.graph.vertices) == 2
        assert len(cover.graph.edges) == 4
        assert verify_covering(proj, cover, env).positive

    def test_trivial_voltages_keep_base_component(self):
        # zero voltages split the derived graph; only the base component is kept
        env = three_cycle_env()
        cover, proj = cyclic_cover(env, 2, (0, 0, 0))
        assert len(cover.graph.vertices) == 3
        assert verify_covering(proj, cover, env).positive

    def test_dart_keyed_voltages(self):
        env = three_cycle_env()
        g = env.graph
        volts = {}
        for idx in range(3):
            d = g.forward_dart(idx)
            volts[d] = 1
            volts[g.reverse(d)] = -1
        cover, proj = cyclic_cover(env, 2, volts)
        assert len(cover.graph.vertices) == 6
        assert verify_covering(proj, cover, env).positive

    def test_inconsistent_voltages_rejected(self):
        env = three_cycle_env()
        g = env.graph
        d = g.forward_dart(0)
        volts = {d: 1, g.reverse(d): 1, g.forward_dart(1): 0, g.forward_dart(2): 0}
        with pytest.raises(ValidationError):
            cyclic_cover(env, 3, volts)

    def test_wrong_voltage_count_rejected(self):
        with pytest.raises(ValidationError):
            cyclic_cover(three_cycle_env(), 2, (1, 1))

    def test_bad_order_rejected(self):
        with pytest.raises(ValidationError):
            cyclic_cover(three_cycle_env(), 0, ())

    def test_random_covers_always_verify(self):
        rng = random.Random(43)
        for _ in range(30):
            g = random_ported_graph(rng, unit_lengths=bool(rng.getrandbits(1)))
            env = Environment(g, g.vertices[0], DegreeSensor())
            k = rng.randint(1, 4)
            cover, proj = cyclic_cover(env, k, random_voltages(rng, g, k))
            assert verify_covering(proj, cover, env).positive


class TestUniversalCoverTruncation:
    def test_cycle_unrolls_to_path(self):
        env = three_cycle_env()
        cover, proj, boundary = universal_cover_truncation(env, 2)
        g = cover.graph
        assert len(g.vertices) == 5
        assert sorted(g.degree(v) for v in g.vertices) == [1, 1, 2, 2, 2]
        assert len(boundary) == 2
        assert g.degree(cover.initial) == 2
        assert all(g.degree(v) == 1 for v in boundary)
        for v in boundary:
            assert g.has_dart(Dart(v, 0))
        cert = verify_covering(proj, cover, env, skip_star_at=boundary)
        assert cert.positive

    def test_tree_is_its_own_cover(self):
        env = path_middle_env()
        cover, proj, boundary = universal_cover_truncation(env, 2)
        assert boundary == frozenset()
        assert len(cover.graph.vertices) == 3
        assert len(cover.graph.edges) == 2
        assert verify_covering(proj, cover, env).positive

    def test_figure_eight_ball(self):
        env = figure_eight_env()
        cover, proj, boundary = universal_cover_truncation(env, 2)
        g = cover.graph
        assert len(g.vertices) == 17
        assert len(boundary) == 12
        assert g.degree(cover.initial) == 4
        interior = [v for v in g.vertices if v not in boundary and v != cover.initial]
        assert all(g.degree(v) == 4 for v in interior)
        cert = verify_covering(proj, cover, env, skip_star_at=boundary)
        assert cert.positive

    def test_nonpositive_radius_rejected(self):
        with pytest.raises(PreconditionError):
            universal_cover_truncation(three_cycle_env(), 0)

    def test_traces_agree_below_radius(self):
        rng = random.Random(44)
        for env in (three_cycle_env(), figure_eight_env()):
            cover, proj, boundary = universal_cover_truncation(env, 4)
            for _ in range(60):
                u = random_signal(rng, env.alphabet_width, max_pieces=3)
                if u.duration >= 4:
                    u = u.restrict_before(Fraction(7, 2))
                assert trace_of(cover, u) == trace_of(env, u)


class TestDegreeRefinement:
    def test_regular_graphs_share_one_row(self):
        k4 = PortedGraph(
            ["a", "b", "c", "d"],
            build_edges(
                [
                    ("a", "b", 0, 0),
                    ("a", "c", 1, 0),
                    ("a", "d", 2, 0),
                    ("b", "c", 1, 1),
                    ("b", "d", 2, 1),
                    ("c", "d", 2, 2),
                ]
            ),
        )
        t1 = degree_refinement(Environment(k4, "a", DegreeSensor(), 3))
        t2 = degree_refinement(Environment(theta(), "u", DegreeSensor(), 3))
        assert t1 == t2 == ((3, ((0, 3),)),)

    def test_cycle_and_double_cover_agree(self):
        assert degree_refinement(three_cycle_env()) == degree_refinement(six_cycle_env())

    def test_stars_differ(self):
        def star(n):
            g = PortedGraph(
                ["z"] + [f"l{i}" for i in range(n)],
                build_edges([("z", f"l{i}", i, 0) for i in range(n)]),
            )
            return Environment(g, "z", DegreeSensor(), n)

        assert degree_refinement(star(3)) != degree_refinement(star(4))

    def test_crossing_pair_differs(self):
        a, b = crossing_pair()
        assert degree_refinement(a) != degree_refinement(b)

    def test_invariant_under_relabelling(self):
        rng = random.Random(45)
        for _ in range(20):
            g = random_ported_graph(rng)
            env = Environment(g, g.vertices[0], DegreeSensor())
            names = list(g.vertices)
            shuffled = names[:]
            rng.shuffle(shuffled)
            renamed = relabel_environment(env, dict(zip(names, shuffled)))
            assert degree_refinement(renamed) == degree_refinement(env)
