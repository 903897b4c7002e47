"""Graphviz DOT export for ported graphs and environments.

Output is deterministic: vertices and edges appear in graph order.  Edge
labels show the two ports and the length; sensor data appears on node and
edge labels where it exists.
"""
from __future__ import annotations

from .environments import Environment
from .graphs import PortedGraph, VertexState
from .sensors import BLANK, EDGE, SensorSpec, mark_positions


def _quote(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _edge_label(graph: PortedGraph, sensor, idx: int) -> str:
    e = graph.edges[idx]
    parts = [f"{e.port_at_tail}:{e.port_at_head}"]
    if e.length != 1:
        parts.append(f"len {e.length}")
    if sensor is not None:
        interior = sensor.interior_value(graph, idx)
        if interior not in (EDGE, BLANK):
            parts.append(str(interior))
        for pos, label in mark_positions(sensor, graph, idx):
            parts.append(f"{label}@{pos}")
    return " ".join(parts)


def graph_to_dot(graph: PortedGraph, sensor: SensorSpec = None, initial=None, name: str = "G") -> str:
    lines = [f"graph {_quote(name)} {{"]
    for v in graph.vertices:
        attrs = []
        if sensor is not None:
            attrs.append(f"label={_quote(f'{v} [{sensor.value(graph, VertexState(v))}]')}")
        if v == initial:
            attrs.append("shape=doublecircle")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(v)}{suffix};")
    for idx, e in enumerate(graph.edges):
        label = _edge_label(graph, sensor, idx)
        lines.append(f"  {_quote(e.tail)} -- {_quote(e.head)} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def environment_to_dot(env: Environment, name: str = "G") -> str:
    return graph_to_dot(env.graph, env.sensor, env.initial, name)
