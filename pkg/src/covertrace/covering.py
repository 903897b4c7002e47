"""Covering maps between ported graphs, lifts, and cover constructions.

A covering here is a structure-preserving graph map that is a port-preserving
bijection on every vertex star, preserves lengths, and sends base point to
base point.  Ports can always be relabelled to make an abstract covering
port-preserving, so port preservation is folded into the star condition of the
certificate rather than assumed up front: candidate maps that scramble ports
are reported as failing, not rejected.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .environments import Environment, Trajectory, trajectory
from .errors import PreconditionError, ValidationError
from .graphs import Dart, Edge, GraphState, PortedGraph, VertexState
from .rationals import as_fraction
from .sensors import (
    BeamMark,
    BeamSensor,
    DegreeSensor,
    FilteredSensor,
    LabelSensor,
    SensorSpec,
)
from .signals import ControlSignal


@dataclass(frozen=True, init=False)
class GraphMap:
    """A candidate map between ported graphs: total on vertices and darts."""

    vertex_map: tuple
    dart_map: tuple

    def __init__(self, vertex_map, dart_map):
        vitems = vertex_map.items() if isinstance(vertex_map, dict) else vertex_map
        ditems = dart_map.items() if isinstance(dart_map, dict) else dart_map
        object.__setattr__(
            self, "vertex_map", tuple(sorted(vitems, key=lambda kv: str(kv[0])))
        )
        object.__setattr__(
            self,
            "dart_map",
            tuple(sorted(((Dart(*d), Dart(*e)) for d, e in ditems), key=lambda kv: (str(kv[0][0]), kv[0][1]))),
        )

    @classmethod
    def from_vertex_map(cls, source: PortedGraph, vertex_map: Mapping) -> "GraphMap":
        """Port-preserving dart map induced by a vertex map."""
        darts = {d: Dart(vertex_map[d.vertex], d.port) for d in source.darts()}
        return cls(dict(vertex_map), darts)

    def vertex(self, v):
        return dict(self.vertex_map)[v]

    def dart(self, d: Dart) -> Dart:
        return dict(self.dart_map)[d]

    def state(self, target: PortedGraph, state: GraphState) -> GraphState:
        if isinstance(state, VertexState):
            return target.vertex_state(self.vertex(state.vertex))
        return target.state_on(self.dart(state.dart), state.offset)

    def to_json(self) -> dict:
        return {
            "vertex_map": [[src, dst] for src, dst in self.vertex_map],
            "dart_map": [
                [[d.vertex, d.port], [e.vertex, e.port]] for d, e in self.dart_map
            ],
        }

    @classmethod
    def from_json(cls, data, source: Optional[PortedGraph] = None) -> "GraphMap":
        if not isinstance(data, dict) or "vertex_map" not in data:
            raise ValidationError("graph map JSON must carry vertex_map")
        raw_v = data["vertex_map"]
        vitems = raw_v.items() if isinstance(raw_v, dict) else [(s, d) for s, d in raw_v]
        if "dart_map" in data:
            ditems = [
                (Dart(dv, dp), Dart(ev, ep)) for (dv, dp), (ev, ep) in data["dart_map"]
            ]
            return cls(dict(vitems), ditems)
        if source is None:
            raise ValidationError("dart_map omitted and no source graph to derive it from")
        return cls.from_vertex_map(source, dict(vitems))


@dataclass(frozen=True)
class CoveringCertificate:
    """Outcome of verify_covering: one flag per condition plus diagnostics."""

    surjective: bool
    local_bijection: bool
    lengths_preserved: bool
    base_point: bool
    failures: tuple

    @property
    def positive(self) -> bool:
        return (
            self.surjective
            and self.local_bijection
            and self.lengths_preserved
            and self.base_point
        )

    def to_json(self) -> dict:
        return {
            "covering": self.positive,
            "conditions": {
                "surjective": self.surjective,
                "local_bijection": self.local_bijection,
                "lengths_preserved": self.lengths_preserved,
                "base_point": self.base_point,
            },
            "failures": list(self.failures),
        }


def _check_structure(f: GraphMap, source: PortedGraph, target: PortedGraph) -> None:
    vmap = dict(f.vertex_map)
    dmap = dict(f.dart_map)
    for v in source.vertices:
        if v not in vmap:
            raise ValidationError(f"vertex {v!r} unmapped")
        if vmap[v] not in set(target.vertices):
            raise ValidationError(f"vertex {v!r} maps outside the target")
    for d in source.darts():
        if d not in dmap:
            raise ValidationError(f"dart {d!r} unmapped")
        image = dmap[d]
        if not target.has_dart(image):
            raise ValidationError(f"dart {d!r} maps to unknown dart {image!r}")
        if vmap[d.vertex] != image.vertex:
            raise ValidationError(f"dart {d!r}: image tail disagrees with vertex map")
        if vmap[source.head(d)] != target.head(image):
            raise ValidationError(f"dart {d!r}: image head disagrees with vertex map")
        if dmap[source.reverse(d)] != target.reverse(image):
            raise ValidationError(f"dart {d!r}: image does not respect reversal")


def verify_covering(
    f: GraphMap,
    source: Environment,
    target: Environment,
    skip_star_at: Iterable = (),
) -> CoveringCertificate:
    """Check the covering conditions and report a certificate.

    Structural violations (partial maps, broken incidence or reversal) are
    rejected with a diagnostic; the certificate then grades surjectivity, the
    port-preserving star bijections (skipped at `skip_star_at`, used for
    truncated covers with boundary), length preservation, and the base point.
    """
    sg, tg = source.graph, target.graph
    _check_structure(f, sg, tg)
    vmap = dict(f.vertex_map)
    dmap = dict(f.dart_map)
    skip = set(skip_star_at)
    failures = []

    hit_vertices = set(vmap.values())
    surjective = hit_vertices == set(tg.vertices)
    if surjective and not skip:
        surjective = {dmap[d] for d in sg.darts()} == set(tg.darts())
    if not surjective:
        failures.append("not surjective")

    local_bijection = True
    for v in sg.vertices:
        if v in skip:
            continue
        images = [dmap[d] for d in sg.darts_at(v)]
        expect = tg.darts_at(vmap[v])
        ports_ok = all(dmap[d].port == d.port for d in sg.darts_at(v))
        if sorted(images) != sorted(expect) or not ports_ok:
            local_bijection = False
            failures.append(f"star at {v!r} is not a port-preserving bijection")

    lengths_preserved = True
    for d in sg.darts():
        if sg.length(d) != tg.length(dmap[d]):
            lengths_preserved = False
            failures.append(f"dart {d!r} changes length")
            break

    base_point = vmap.get(source.initial) == target.initial
    if not base_point:
        failures.append("base point not preserved")

    return CoveringCertificate(
        surjective, local_bijection, lengths_preserved, base_point, tuple(failures)
    )


def _require_covering(f, source, target, skip_star_at=()):
    cert = verify_covering(f, source, target, skip_star_at)
    if not cert.positive:
        raise PreconditionError(f"map is not a verified covering: {cert.failures}")
    return cert


def pullback_sensor(
    f: GraphMap, source_graph: PortedGraph, target_graph: PortedGraph, sensor: SensorSpec
) -> SensorSpec:
    """Pull a sensor on the target back along the map: h' = h after f.
    Beam marks reappear once on every preimage edge."""
    if isinstance(sensor, DegreeSensor):
        return DegreeSensor()
    if isinstance(sensor, LabelSensor):
        vmap = dict(f.vertex_map)
        vertex_labels = {v: dict(sensor.vertex_labels)[vmap[v]] for v in source_graph.vertices}
        dmap = dict(f.dart_map)
        edge_labels = []
        for idx in range(len(source_graph.edges)):
            image = dmap[source_graph.forward_dart(idx)]
            edge_labels.append(sensor.edge_labels[target_graph.edge_of(image)])
        return LabelSensor(vertex_labels, edge_labels)
    if isinstance(sensor, BeamSensor):
        dmap = dict(f.dart_map)
        marks = []
        for idx in range(len(source_graph.edges)):
            fwd = source_graph.forward_dart(idx)
            image = dmap[fwd]
            image_idx = target_graph.edge_of(image)
            image_forward = image == target_graph.forward_dart(image_idx)
            length = source_graph.edges[idx].length
            for mark in sensor.marks_on(image_idx):
                pos = mark.offset if image_forward else length - mark.offset
                marks.append(BeamMark(idx, pos, mark.label))
        return BeamSensor(marks)
    if isinstance(sensor, FilteredSensor):
        return FilteredSensor(
            pullback_sensor(f, source_graph, target_graph, sensor.base), dict(sensor.relabel)
        )
    raise ValidationError(f"unknown sensor {sensor!r}")


def lift_sensor(f: GraphMap, source: Environment, target: Environment) -> SensorSpec:
    """Pullback of the target sensor along a verified covering."""
    _require_covering(f, source, target)
    return pullback_sensor(f, source.graph, target.graph, target.sensor)


def lift_environment(f: GraphMap, source: Environment, target: Environment) -> Environment:
    """The source environment re-equipped with the pulled-back sensor and the
    target's alphabet width."""
    _require_covering(f, source, target)
    sensor = pullback_sensor(f, source.graph, target.graph, target.sensor)
    return Environment(source.graph, source.initial, sensor, target.alphabet_width)


def lift_state_path(
    f: GraphMap, source: Environment, target: Environment, signal: ControlSignal
) -> Trajectory:
    """The unique lift of the target trajectory of `signal`: run the same
    signal upstairs.  Port preservation makes the projection commute."""
    _require_covering(f, source, target)
    return trajectory(source, signal)


# --- cover constructions -------------------------------------------------


def _normalize_voltages(env: Environment, k: int, voltages) -> list:
    """Per-edge voltage in Z_k from a dart-keyed mapping (checked antisymmetric)
    or an edge-ordered sequence."""
    graph = env.graph
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValidationError(f"cover order must be a positive integer, got {k!r}")
    per_edge = [None] * len(graph.edges)
    if isinstance(voltages, Mapping):
        for d, value in voltages.items():
            d = Dart(*d)
            if not graph.has_dart(d):
                raise ValidationError(f"voltage on unknown dart {d!r}")
            idx = graph.edge_of(d)
            forward = d == graph.forward_dart(idx)
            value = value % k
            oriented = value if forward else (-value) % k
            if per_edge[idx] is not None and per_edge[idx] != oriented:
                raise ValidationError(f"inconsistent voltages on edge {idx}")
            per_edge[idx] = oriented
        missing = [i for i, v in enumerate(per_edge) if v is None]
        if missing:
            raise ValidationError(f"edges without a voltage: {missing}")
    else:
        values = list(voltages)
        if len(values) != len(graph.edges):
            raise ValidationError(
                f"{len(values)} voltages for {len(graph.edges)} edges"
            )
        per_edge = [v % k for v in values]
    return per_edge


def cyclic_cover(env: Environment, k: int, voltages):
    """Degree-k cyclic cover from voltages in Z_k.

    Builds the derived graph on vertex copies (v, i), keeps the component of
    the lifted base point (the full derived graph may fall apart when the
    voltages do not generate Z_k), pulls the sensor back, and returns the cover
    with its projection.  k = 1 returns an isomorphic copy.
    """
    per_edge = _normalize_voltages(env, k, voltages)
    graph = env.graph

    def name(v, i):
        return f"{v}@{i}"

    component = set()
    stack = [(env.initial, 0)]
    while stack:
        node = stack.pop()
        if node in component:
            continue
        component.add(node)
        v, i = node
        for idx, e in enumerate(graph.edges):
            if e.tail == v:
                stack.append((e.head, (i + per_edge[idx]) % k))
            if e.head == v:
                stack.append((e.tail, (i - per_edge[idx]) % k))

    vertices = [name(v, i) for v in graph.vertices for i in range(k) if (v, i) in component]
    edges = []
    for idx, e in enumerate(graph.edges):
        for i in range(k):
            if (e.tail, i) not in component:
                continue
            edges.append(
                Edge(
                    name(e.tail, i),
                    name(e.head, (i + per_edge[idx]) % k),
                    e.port_at_tail,
                    e.port_at_head,
                    e.length,
                )
            )
    cover_graph = PortedGraph(vertices, edges)

    vertex_map = {}
    for v in graph.vertices:
        for i in range(k):
            if (v, i) in component:
                vertex_map[name(v, i)] = v
    projection = GraphMap.from_vertex_map(cover_graph, vertex_map)
    sensor = pullback_sensor(projection, cover_graph, graph, env.sensor)
    cover = Environment(cover_graph, name(env.initial, 0), sensor, env.alphabet_width)
    return cover, projection


def deck_rotation(env: Environment, cover: Environment, k: int) -> dict:
    """Vertex renaming (v, i) -> (v, i+1 mod k) on a cyclic cover's names."""
    rotation = {}
    for v in cover.graph.vertices:
        base, _, layer = v.rpartition("@")
        rotation[v] = f"{base}@{(int(layer) + 1) % k}"
    return rotation


def universal_cover_truncation(env: Environment, radius):
    """Tree of reduced edge-walks from the base point, cut past `radius`.

    Nodes whose walk length reaches the radius are not expanded; such cut
    leaves keep their single backward dart, renumbered to port 0 so the tree
    is a valid ported graph, and are reported as boundary.  Away from the
    boundary the projection satisfies the covering conditions, and any signal
    of duration under the radius never sees the boundary.
    Returns (cover environment, projection, boundary vertex set).
    """
    radius = as_fraction(radius)
    if radius <= 0:
        raise PreconditionError(f"radius must be positive, got {radius}")
    graph = env.graph

    names = {}
    info = {}

    def new_node(base_vertex, dist, back_dart):
        node = f"t{len(names)}"
        names[node] = base_vertex
        info[node] = {"dist": dist, "back": back_dart, "edges": {}}
        return node

    root = new_node(env.initial, Fraction(0), None)
    edges = []
    boundary = set()
    queue = [root]
    while queue:
        node = queue.pop(0)
        base = names[node]
        dist = info[node]["dist"]
        back = info[node]["back"]
        child_darts = [
            d for d in graph.darts_at(base) if back is None or d != graph.reverse(back)
        ]
        if dist >= radius:
            if child_darts:
                boundary.add(node)
            continue
        for d in child_darts:
            child = new_node(graph.head(d), dist + graph.length(d), d)
            info[node]["edges"][d.port] = (child, d)
            queue.append(child)

    # edges run parent -> child; boundary children get port 0 on their side
    for node, data in info.items():
        for port, (child, d) in data["edges"].items():
            back_port = graph.reverse(d).port
            child_is_boundary = child in boundary
            edges.append(
                Edge(
                    node,
                    child,
                    port,
                    0 if child_is_boundary else back_port,
                    graph.length(d),
                )
            )

    cover_graph = PortedGraph(list(names), edges)
    vertex_map = dict(names)
    dart_map = {}
    for node, data in info.items():
        for port, (child, d) in data["edges"].items():
            child_is_boundary = child in boundary
            dart_map[Dart(node, port)] = d
            dart_map[Dart(child, 0 if child_is_boundary else graph.reverse(d).port)] = graph.reverse(d)
    projection = GraphMap(vertex_map, dart_map)
    sensor = pullback_sensor(projection, cover_graph, graph, env.sensor)
    cover = Environment(cover_graph, root, sensor, env.alphabet_width)
    return cover, projection, frozenset(boundary)


def relabel_environment(env: Environment, vertex_renaming: Mapping) -> Environment:
    """Pure vertex renaming: same ports, lengths, sensor data, moved names.
    With a renaming that is a graph automorphism this realizes the isometry."""
    renaming = dict(vertex_renaming)
    graph = env.graph
    new_edges = [
        Edge(renaming[e.tail], renaming[e.head], e.port_at_tail, e.port_at_head, e.length)
        for e in graph.edges
    ]
    new_graph = PortedGraph([renaming[v] for v in graph.vertices], new_edges)
    sensor = env.sensor
    if isinstance(sensor, LabelSensor):
        sensor = LabelSensor(
            {renaming[v]: label for v, label in sensor.vertex_labels}, sensor.edge_labels
        )
    elif isinstance(sensor, FilteredSensor) and isinstance(sensor.base, LabelSensor):
        sensor = FilteredSensor(
            LabelSensor(
                {renaming[v]: label for v, label in sensor.base.vertex_labels},
                sensor.base.edge_labels,
            ),
            dict(sensor.relabel),
        )
    return Environment(new_graph, renaming[env.initial], sensor, env.alphabet_width)


# --- degree refinement ---------------------------------------------------


def degree_refinement(env: Environment) -> tuple:
    """Canonical degree refinement table.

    Vertices start coloured by degree and are iteratively recoloured by the
    multiset of neighbour colours over their darts until stable.  Colours are
    content-addressed (hashes of their construction history) so tables from
    different graphs are directly comparable; two finite connected graphs share
    a universal cover exactly when their tables agree.  Rows list, per class:
    the degree and the dart counts into each class.
    """
    graph = env.graph

    def digest(payload: str) -> str:
        return hashlib.sha256(payload.encode()).hexdigest()

    colour = {v: digest(f"deg:{graph.degree(v)}") for v in graph.vertices}
    while True:
        refined = {}
        for v in graph.vertices:
            neighbours = sorted(colour[graph.head(d)] for d in graph.darts_at(v))
            refined[v] = digest(colour[v] + "|" + ",".join(neighbours))
        if len(set(refined.values())) == len(set(colour.values())):
            colour = refined
            break
        colour = refined

    classes = sorted(set(colour.values()))
    index = {c: i for i, c in enumerate(classes)}
    table = []
    for c in classes:
        representative = next(v for v in graph.vertices if colour[v] == c)
        counts = {}
        for d in graph.darts_at(representative):
            counts[index[colour[graph.head(d)]]] = counts.get(index[colour[graph.head(d)]], 0) + 1
        table.append(
            (graph.degree(representative), tuple(sorted(counts.items())))
        )
    return tuple(table)
