"""Plain symbolic reference implementations: linear-scan minimum, pass-based adjacent sort, unoptimized A*.

Nothing here touches networks or associative memory; the compiled programs
are checked against these.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from src.config import ASTAR_LARGE_F, ASTAR_MAX_NODES
from src.errors import CapacityError
from src.models import GraphInstance

logger = logging.getLogger(__name__)


def oracle_min(array: Sequence[float]) -> float:
    """m <- a_1, then m <- min(m, a_i) for i = 2..n."""
    if len(array) == 0:
        raise ValueError("oracle_min needs a nonempty array")
    m = float(array[0])
    for value in array[1:]:
        m = min(m, float(value))
    return m


@dataclass
class OracleSortTrace:
    """One array snapshot and the (i, p) pair after every step, stop step included."""

    snapshots: list[tuple[float, ...]] = field(default_factory=list)
    schedule: list[tuple[int, int]] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.snapshots)


def oracle_sort(array: Sequence[float]) -> tuple[list[float], OracleSortTrace]:
    """Adjacent sort with the (i, p) schedule: pair steps while i < p, then p <- p - 1, i <- 1."""
    if len(array) == 0:
        raise ValueError("oracle_sort needs a nonempty array")
    a = [float(v) for v in array]
    i, p = 1, len(a)
    trace = OracleSortTrace()
    while True:
        if i < p:
            lo, hi = a[i - 1], a[i]
            a[i - 1], a[i] = min(lo, hi), max(lo, hi)
            i += 1
        elif p > 1:
            p, i = p - 1, 1
        else:
            trace.snapshots.append(tuple(a))
            trace.schedule.append((i, p))
            break
        trace.snapshots.append(tuple(a))
        trace.schedule.append((i, p))
    return a, trace


@dataclass
class OracleNode:
    state: int
    parent: int
    action: int
    G: float
    H: float
    F: float
    open: int = 1
    valid: int = 1


@dataclass
class OracleAStarResult:
    status: str
    path: list[int]
    path_names: list[str]
    cost: float | None
    records: list[OracleNode]
    selection_order: list[int]
    solution: int = -1

    @property
    def found(self) -> bool:
        return self.status == "found"


def oracle_astar(
    instance: GraphInstance,
    max_nodes: int = ASTAR_MAX_NODES,
    large_f: float = ASTAR_LARGE_F,
) -> OracleAStarResult:
    """Unoptimized A*: explicit record list, no closed list, ties go to the lowest record index."""
    start = instance.states[instance.start]
    records = [OracleNode(state=start.id, parent=-1, action=-1, G=0.0, H=start.h, F=start.h)]
    selection: list[int] = []

    while True:
        best, best_f = -1, large_f
        for idx, node in enumerate(records):
            if node.valid == 1 and node.open == 1 and node.F < best_f:
                best, best_f = idx, node.F
        if best < 0:
            logger.info(f"oracle A*: frontier exhausted after {len(records)} records")
            return OracleAStarResult("failed", [], [], None, records, selection)

        node = records[best]
        node.open = 0
        selection.append(best)
        if node.state == instance.goal:
            path = _follow_parents(records, best)
            return OracleAStarResult(
                status="found",
                path=path,
                path_names=[instance.states[s].name for s in path],
                cost=node.G,
                records=records,
                selection_order=selection,
                solution=best,
            )

        for action, (succ, cost) in enumerate(instance.states[node.state].actions):
            if len(records) >= max_nodes:
                raise CapacityError(f"oracle A* needs more than {max_nodes} node records")
            h = instance.states[succ].h
            g = node.G + cost
            records.append(OracleNode(state=succ, parent=best, action=action, G=g, H=h, F=g + h))


def _follow_parents(records: list[OracleNode], index: int) -> list[int]:
    path = []
    while index >= 0:
        path.append(records[index].state)
        index = records[index].parent
    return path[::-1]


def enumerate_paths(instance: GraphInstance) -> list[tuple[list[int], float]]:
    """Every simple start->goal path with its cost, by depth-first search."""
    found: list[tuple[list[int], float]] = []

    def visit(state: int, path: list[int], cost: float) -> None:
        if state == instance.goal:
            found.append((list(path), cost))
            return
        for succ, edge in instance.states[state].actions:
            if succ not in path:
                path.append(succ)
                visit(succ, path, cost + edge)
                path.pop()

    visit(instance.start, [instance.start], 0.0)
    return found
