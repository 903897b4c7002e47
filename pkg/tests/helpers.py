"""Shared builders and independent oracles for the test suite."""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from covertrace import (
    ControlSignal,
    DegreeSensor,
    Environment,
    PortedGraph,
    build_edges,
)


def three_cycle() -> PortedGraph:
    """Unit triangle; port 0 at each vertex points counterclockwise."""
    return PortedGraph(
        ["x0", "x1", "x2"],
        build_edges([("x0", "x1", 0, 1), ("x1", "x2", 0, 1), ("x2", "x0", 0, 1)]),
    )


def three_cycle_env(sensor=None, width=2) -> Environment:
    return Environment(three_cycle(), "x0", sensor or DegreeSensor(), width)


def path_middle() -> PortedGraph:
    """Two unit edges meeting at m; the comparison partner of the 3-cycle."""
    return PortedGraph(
        ["m", "l", "r"], build_edges([("m", "l", 0, 0), ("m", "r", 1, 0)])
    )


def path_middle_env(width=2) -> Environment:
    return Environment(path_middle(), "m", DegreeSensor(), width)


def figure_eight() -> PortedGraph:
    """One vertex with two unit loops, ports (0,1) and (2,3)."""
    return PortedGraph(
        ["o"], build_edges([("o", "o", 0, 1), ("o", "o", 2, 3)])
    )


def figure_eight_env(width=4) -> Environment:
    return Environment(figure_eight(), "o", DegreeSensor(), width)


def grid_distance(a: ControlSignal, b: ControlSignal) -> Fraction:
    """Independent signal-distance oracle: evaluate both signals on a uniform
    grid finer than every breakpoint, so each cell is constant, and sum cell
    widths where the symbols differ.  Adds the duration gap."""
    horizon = min(a.duration, b.duration)
    denominators = [1]
    for u in (a, b):
        denominators.extend(t.denominator for t in u.breakpoints())
    step = Fraction(1, lcm(*denominators))
    total = Fraction(0)
    t = Fraction(0)
    while t < horizon:
        if a.symbol_at(t) != b.symbol_at(t):
            total += step
        t += step
    return total + abs(a.duration - b.duration)


def dense_trajectory_distance(traj_a, traj_b, steps: int = 60) -> Fraction:
    """Lower-bound oracle for the trajectory metric: max point distance over a
    dense rational time grid plus the duration gap."""
    graph = traj_a.graph
    horizon = min(traj_a.duration, traj_b.duration)
    best = Fraction(0)
    for i in range(steps + 1):
        t = horizon * Fraction(i, steps)
        d = graph.point_distance(traj_a.at(t), traj_b.at(t))
        best = max(best, d)
    return best + abs(traj_a.duration - traj_b.duration)
