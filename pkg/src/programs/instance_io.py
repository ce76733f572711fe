"""Text format for search problems.

    # comment
    state <id> <name> <h>
    edge <from> <to> <cost>
    start <name>
    goal <name>

Edges are attached to their source state in file order; that order is the
action order.
"""

from __future__ import annotations

import logging
from pathlib import Path

from src.errors import InstanceFormatError
from src.models import GraphInstance, GraphState

logger = logging.getLogger(__name__)


def parse_instance(text: str) -> GraphInstance:
    states: dict[int, tuple[str, float]] = {}
    edges: list[tuple[str, str, float, int]] = []
    start = goal = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *args = line.split()
        try:
            if kind == "state" and len(args) == 3:
                sid = int(args[0])
                if sid in states:
                    raise InstanceFormatError(f"line {lineno}: duplicate state id {sid}")
                states[sid] = (args[1], float(args[2]))
            elif kind == "edge" and len(args) == 3:
                edges.append((args[0], args[1], float(args[2]), lineno))
            elif kind == "start" and len(args) == 1:
                start = args[0]
            elif kind == "goal" and len(args) == 1:
                goal = args[0]
            else:
                raise InstanceFormatError(f"line {lineno}: cannot parse {raw.strip()!r}")
        except ValueError as e:
            raise InstanceFormatError(f"line {lineno}: {e}") from e

    if not states:
        raise InstanceFormatError("Instance declares no states")
    if start is None or goal is None:
        raise InstanceFormatError("Instance needs both a start and a goal line")
    if sorted(states) != list(range(len(states))):
        raise InstanceFormatError(f"State ids must be 0..{len(states) - 1}, got {sorted(states)}")

    ids = {name: sid for sid, (name, _) in states.items()}
    if len(ids) != len(states):
        raise InstanceFormatError("State names must be unique")
    actions: dict[int, list[tuple[int, float]]] = {sid: [] for sid in states}
    for src, dst, cost, lineno in edges:
        if src not in ids or dst not in ids:
            raise InstanceFormatError(f"line {lineno}: edge refers to unknown state")
        actions[ids[src]].append((ids[dst], cost))
    for name in (start, goal):
        if name not in ids:
            raise InstanceFormatError(f"Unknown start/goal state {name!r}")

    try:
        return GraphInstance(
            states=tuple(
                GraphState(id=sid, name=states[sid][0], h=states[sid][1], actions=tuple(actions[sid]))
                for sid in range(len(states))
            ),
            start=ids[start],
            goal=ids[goal],
        )
    except ValueError as e:
        raise InstanceFormatError(str(e)) from e


def format_instance(instance: GraphInstance) -> str:
    lines = [f"state {s.id} {s.name} {_num(s.h)}" for s in instance.states]
    for s in instance.states:
        for succ, cost in s.actions:
            lines.append(f"edge {s.name} {instance.name_of(succ)} {_num(cost)}")
    lines.append(f"start {instance.name_of(instance.start)}")
    lines.append(f"goal {instance.name_of(instance.goal)}")
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> GraphInstance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceFormatError(f"Cannot read instance file {path}: {e}") from e
    instance = parse_instance(text)
    logger.info(f"Loaded instance {path.name}: {instance.state_count} states")
    return instance


def _num(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))
