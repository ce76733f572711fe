"""Unoptimized A* compiled for one fixed search problem.

Memory has three regions: the problem description (start/goal header and
one record per state), a block of control cells, and the search-node
records. A symbolic phase machine executes the search step by step with the
exact module structure of the compiled program; its recorded steps become
the entries of the controller table and of the six module tables.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from enum import IntEnum

import numpy as np

from src.config import (
    ASTAR_LARGE_F,
    ASTAR_MAX_NODES,
    ASTAR_NODE_LIMIT,
    ASTAR_READ_HEADS,
    ASTAR_WRITE_HEADS,
    CANONICAL_INSTANCE_PATH,
    DEFAULT_GATE_BOUND,
    DEFAULT_MAX_STEPS,
)
from src.errors import CapacityError, CompileError, LayoutError, TableConflictError, TraceIntegrityError
from src.machine.engine import run
from src.memory.associative import new_memory
from src.models import (
    ExecutionTrace,
    GraphInstance,
    GraphState,
    MemoryConfig,
    MemoryState,
    MNCProgram,
    TableEntry,
)
from src.network.relu_builder import build_affine, build_gate_wrap, build_table
from src.oracles.reference import oracle_astar
from src.programs.base import BaseProgram, format_value, require_halted
from src.programs.instance_io import load_instance, parse_instance

logger = logging.getLogger(__name__)


class Phase(IntEnum):
    INIT_ROOT = 0
    START_OPEN_SCAN = 1
    SCAN_OPEN_NODE = 2
    FINISH_OPEN_SCAN = 3
    GOAL_TEST = 4
    EXPAND_ACTION = 5


MODULE_NAMES = tuple(p.name.lower() for p in Phase)

STATE_FIELDS = {"id": 0, "h": 1, "deg": 2, "succ0": 3, "cost0": 4, "succ1": 5, "cost1": 6}
STATE_STRIDE = 8
NODE_FIELDS = {"state": 0, "parent": 1, "action": 2, "G": 3, "H": 4, "F": 5, "open": 6, "valid": 7}
NODE_STRIDE = 10
CONTROL_CELLS = (
    "phase",
    "next_free",
    "scan_pos",
    "best_node",
    "best_f",
    "selected",
    "action_idx",
    "action_count",
    "open_count",
    "solution_ptr",
    "flag",
    "zero",
    "scratch",
)
# Cells the controller reads every step, in input order.
CONTROLLER_INPUTS = (
    "phase",
    "scan_pos",
    "action_idx",
    "next_free",
    "open_count",
    "best_node",
    "selected",
    "flag",
)

FLAG_RUNNING = 1.0
FLAG_FOUND = -1.0
FLAG_FAILED = -2.0


# ── Layout ──────────────────────────────────────────────────


@dataclass(frozen=True)
class AStarLayout:
    memory_size: int
    problem_base: int
    state_count: int
    node_base: int
    max_nodes: int
    addr_phase: int
    addr_next_free: int
    addr_scan_pos: int
    addr_best_node: int
    addr_best_f: int
    addr_selected: int
    addr_action_idx: int
    addr_action_count: int
    addr_open_count: int
    addr_solution_ptr: int
    addr_flag: int
    addr_zero: int
    addr_scratch: int
    state_stride: int = STATE_STRIDE
    node_stride: int = NODE_STRIDE

    @property
    def addr_start(self) -> int:
        return self.problem_base

    @property
    def addr_goal(self) -> int:
        return self.problem_base + 1

    def state_addr(self, state_id: int, name: str) -> int:
        return self.problem_base + 2 + self.state_stride * int(state_id) + STATE_FIELDS[name]

    def node_addr(self, index: int, name: str) -> int:
        return self.node_base + self.node_stride * int(index) + NODE_FIELDS[name]

    def control(self, name: str) -> int:
        return getattr(self, f"addr_{name}")

    @property
    def controller_inputs(self) -> tuple[int, ...]:
        return tuple(self.control(name) for name in CONTROLLER_INPUTS)

    def regions(self) -> dict[str, range]:
        control = [self.control(name) for name in CONTROL_CELLS]
        return {
            "problem": range(self.problem_base, self.problem_base + 2 + self.state_stride * self.state_count),
            "control": range(min(control), max(control) + 1),
            "nodes": range(self.node_base, self.node_base + self.node_stride * self.max_nodes),
        }

    def validate(self) -> None:
        control = [self.control(name) for name in CONTROL_CELLS]
        if len(set(control)) != len(control):
            raise LayoutError("Control cells overlap")
        if self.state_stride <= len(STATE_FIELDS) or self.node_stride <= len(NODE_FIELDS):
            raise LayoutError("Record strides must leave at least one gap cell")
        regions = list(self.regions().items())
        for i, (name_a, a) in enumerate(regions):
            if a.start < 0 or a.stop > self.memory_size:
                raise CapacityError(f"Region {name_a} {a} does not fit in {self.memory_size} cells")
            for name_b, b in regions[i + 1 :]:
                if a.start < b.stop and b.start < a.stop:
                    raise LayoutError(f"Regions {name_a} and {name_b} overlap")


def astar_layout_for(
    instance: GraphInstance,
    max_nodes: int | None = None,
    memory_size: int | None = None,
    large_f: float = ASTAR_LARGE_F,
) -> AStarLayout:
    """Problem region at 0, control cells on the next multiple of 8, node records after a gap.

    Without max_nodes the node region is sized from a reference search of
    the instance, with at least ASTAR_MAX_NODES records.
    """
    if max_nodes is None:
        needed = len(oracle_astar(instance, max_nodes=ASTAR_NODE_LIMIT, large_f=large_f).records)
        max_nodes = max(ASTAR_MAX_NODES, needed)
    problem_end = 2 + STATE_STRIDE * instance.state_count
    control_base = _align(problem_end + 1, 8)
    node_base = _align(control_base + len(CONTROL_CELLS) + 1, 8)
    needed_size = node_base + NODE_STRIDE * max_nodes
    size = needed_size if memory_size is None else memory_size
    layout = AStarLayout(
        memory_size=size,
        problem_base=0,
        state_count=instance.state_count,
        node_base=node_base,
        max_nodes=max_nodes,
        **{f"addr_{name}": control_base + k for k, name in enumerate(CONTROL_CELLS)},
    )
    layout.validate()
    return layout


def _align(value: int, step: int) -> int:
    return step * math.ceil(value / step)


# ── Instances ───────────────────────────────────────────────


def canonical_instance() -> GraphInstance:
    """Seven states S, A, B, C, D, E, G; unique optimum S->B->D->G of cost 8, D reached via A and B."""
    names = ["S", "A", "B", "C", "D", "E", "G"]
    h = [6, 5, 4, 5, 3, 2, 0]
    edges = {
        "S": [("A", 2), ("B", 4)],
        "A": [("C", 3), ("D", 4)],
        "B": [("D", 1), ("E", 5)],
        "C": [("G", 6)],
        "D": [("G", 3)],
        "E": [("G", 2)],
    }
    ids = {name: k for k, name in enumerate(names)}
    states = tuple(
        GraphState(
            id=k,
            name=name,
            h=float(h[k]),
            actions=tuple((ids[dst], float(cost)) for dst, cost in edges.get(name, [])),
        )
        for k, name in enumerate(names)
    )
    return GraphInstance(states=states, start=ids["S"], goal=ids["G"])


def random_instance(rng: np.random.Generator, state_count: int = 6) -> GraphInstance:
    """Random DAG from state 0 to state n-1 with integer costs and admissible integer heuristics.

    One instance in five has every edge into the goal removed, so the search
    ends in the failure state and dead-end states show up.
    """
    if state_count < 2:
        raise ValueError("A random instance needs at least two states")
    goal = state_count - 1
    cut_goal = rng.random() < 0.2
    actions: list[list[tuple[int, float]]] = [[] for _ in range(state_count)]
    for sid in range(goal):
        later = np.arange(sid + 1, state_count)
        degree = min(int(rng.integers(1, 3)), later.size)
        for succ in rng.choice(later, size=degree, replace=False):
            if cut_goal and succ == goal:
                continue
            actions[sid].append((int(succ), float(rng.integers(1, 10))))

    distance = [math.inf] * state_count
    distance[goal] = 0.0
    for sid in range(goal - 1, -1, -1):
        distance[sid] = min((cost + distance[succ] for succ, cost in actions[sid]), default=math.inf)
    factor = rng.uniform(0.5, 1.0)

    names = ["S", *(f"N{k}" for k in range(1, goal)), "G"]
    states = tuple(
        GraphState(
            id=sid,
            name=names[sid],
            h=float(math.floor(distance[sid] * factor)) if math.isfinite(distance[sid]) else 0.0,
            actions=tuple(actions[sid]),
        )
        for sid in range(state_count)
    )
    return GraphInstance(states=states, start=0, goal=goal)


# ── Memory ──────────────────────────────────────────────────


def load_astar_memory(
    instance: GraphInstance,
    layout: AStarLayout,
    large_f: float = ASTAR_LARGE_F,
) -> MemoryState:
    """Programmatic initialization of the problem and control regions; node records start empty."""
    if instance.state_count != layout.state_count:
        raise LayoutError(f"Layout holds {layout.state_count} states, instance has {instance.state_count}")
    memory = new_memory(layout.memory_size)
    memory[layout.addr_start] = float(instance.start)
    memory[layout.addr_goal] = float(instance.goal)
    for state in instance.states:
        memory[layout.state_addr(state.id, "id")] = float(state.id)
        memory[layout.state_addr(state.id, "h")] = float(state.h)
        memory[layout.state_addr(state.id, "deg")] = float(len(state.actions))
        for a, (succ, cost) in enumerate(state.actions):
            memory[layout.state_addr(state.id, f"succ{a}")] = float(succ)
            memory[layout.state_addr(state.id, f"cost{a}")] = float(cost)

    initial = {
        "phase": float(Phase.INIT_ROOT),
        "best_node": -1.0,
        "best_f": large_f,
        "selected": -1.0,
        "solution_ptr": -1.0,
        "flag": FLAG_RUNNING,
    }
    for name, value in initial.items():
        memory[layout.control(name)] = value
    return memory


@dataclass(frozen=True)
class AStarNode:
    index: int
    state: int
    parent: int
    action: int
    G: float
    H: float
    F: float
    open: int
    valid: int


def node_records(memory: MemoryState, layout: AStarLayout) -> list[AStarNode]:
    """Decode every record with its valid flag set, in record order."""
    nodes = []
    for k in range(layout.max_nodes):
        if memory[layout.node_addr(k, "valid")] != 1.0:
            continue
        fields = {name: memory[layout.node_addr(k, name)] for name in NODE_FIELDS}
        nodes.append(
            AStarNode(
                index=k,
                state=int(fields["state"]),
                parent=int(fields["parent"]),
                action=int(fields["action"]),
                G=float(fields["G"]),
                H=float(fields["H"]),
                F=float(fields["F"]),
                open=int(fields["open"]),
                valid=int(fields["valid"]),
            )
        )
    return nodes


@dataclass(frozen=True)
class AStarPath:
    found: bool
    states: tuple[int, ...] = ()
    costs: tuple[float, ...] = ()

    @property
    def cost(self) -> float | None:
        return self.costs[-1] if self.found else None


def extract_path(memory: MemoryState, layout: AStarLayout) -> AStarPath:
    """Follow parent links from the solution record back to the root."""
    pointer = int(memory[layout.addr_solution_ptr])
    if memory[layout.addr_flag] == FLAG_FAILED or pointer < 0:
        return AStarPath(found=False)

    chain: list[tuple[int, float]] = []
    seen: set[int] = set()
    while pointer >= 0:
        if pointer >= layout.max_nodes or pointer in seen:
            raise TraceIntegrityError(f"Broken parent chain at record {pointer}")
        if memory[layout.node_addr(pointer, "valid")] != 1.0:
            raise TraceIntegrityError(f"Parent chain reaches invalid record {pointer}")
        seen.add(pointer)
        chain.append((int(memory[layout.node_addr(pointer, "state")]), float(memory[layout.node_addr(pointer, "G")])))
        pointer = int(memory[layout.node_addr(pointer, "parent")])
    chain.reverse()
    return AStarPath(found=True, states=tuple(s for s, _ in chain), costs=tuple(g for _, g in chain))


# ── Phase machine ───────────────────────────────────────────


@dataclass(frozen=True)
class PhaseStep:
    index: int
    phase: Phase
    control_input: tuple[float, ...]
    gates: tuple[float, ...]
    read_addresses: tuple[float, ...]
    read_values: tuple[float, ...]
    module_outputs: tuple[float, ...]
    write_addresses: tuple[float, ...]


class _PhaseSemantics:
    """Address selection and module maps for each phase.

    Module maps look only at their read values, so equal reads always give
    equal outputs and the module tables cannot conflict.
    """

    def __init__(self, layout: AStarLayout, large_f: float):
        self.layout = layout
        self.large_f = large_f

    def addresses(self, phase: Phase, memory: MemoryState) -> tuple[list[int], list[int]]:
        L = self.layout
        c = L.control
        if phase == Phase.INIT_ROOT:
            start = int(memory[L.addr_start])
            root = [L.node_addr(0, name) for name in NODE_FIELDS]
            return [L.addr_start, L.state_addr(start, "h")], [*root, c("next_free"), c("open_count"), c("phase")]
        if phase == Phase.START_OPEN_SCAN:
            return [], [c("scan_pos"), c("best_node"), c("best_f"), c("phase")]
        if phase == Phase.SCAN_OPEN_NODE:
            k = int(memory[c("scan_pos")])
            reads = [L.node_addr(k, "valid"), L.node_addr(k, "open"), L.node_addr(k, "F")]
            reads += [c("best_f"), c("best_node"), c("scan_pos"), c("next_free")]
            return reads, [c("best_node"), c("best_f"), c("scan_pos"), c("phase")]
        if phase == Phase.FINISH_OPEN_SCAN:
            best = int(memory[c("best_node")])
            reads = [c("best_node"), c("open_count")]
            if best < 0:
                return reads, [c("flag"), c("solution_ptr")]
            return reads, [c("selected"), L.node_addr(best, "open"), c("open_count"), c("phase")]
        if phase == Phase.GOAL_TEST:
            selected = int(memory[c("selected")])
            state = int(memory[L.node_addr(selected, "state")])
            reads = [L.node_addr(selected, "state"), L.addr_goal, L.state_addr(state, "deg"), c("selected")]
            return reads, [c("solution_ptr"), c("flag"), c("action_idx"), c("action_count"), c("phase")]
        if phase == Phase.EXPAND_ACTION:
            selected = int(memory[c("selected")])
            action = int(memory[c("action_idx")])
            child = int(memory[c("next_free")])
            if child >= L.max_nodes:
                raise CapacityError(f"Search needs more than {L.max_nodes} node records")
            state = int(memory[L.node_addr(selected, "state")])
            succ = int(memory[L.state_addr(state, f"succ{action}")])
            reads = [
                c("selected"),
                L.node_addr(selected, "G"),
                L.state_addr(state, f"succ{action}"),
                L.state_addr(state, f"cost{action}"),
                L.state_addr(succ, "h"),
                c("action_idx"),
                c("action_count"),
                c("next_free"),
                c("open_count"),
            ]
            writes = [L.node_addr(child, name) for name in NODE_FIELDS]
            writes += [c("next_free"), c("open_count"), c("action_idx"), c("phase")]
            return reads, writes
        raise CompileError(f"Unknown phase code {phase}")

    def module(self, phase: Phase, x: list[float]) -> list[float]:
        if phase == Phase.INIT_ROOT:
            start, h = x[0], x[1]
            return [start, -1.0, -1.0, 0.0, h, 0.0 + h, 1.0, 1.0, 1.0, 1.0, float(Phase.START_OPEN_SCAN)]
        if phase == Phase.START_OPEN_SCAN:
            return [0.0, -1.0, self.large_f, float(Phase.SCAN_OPEN_NODE)]
        if phase == Phase.SCAN_OPEN_NODE:
            valid, is_open, f, best_f, best_node, k, next_free = x[:7]
            if valid == 1.0 and is_open == 1.0 and f < best_f:
                best_node, best_f = k, f
            after = Phase.SCAN_OPEN_NODE if k + 1.0 < next_free else Phase.FINISH_OPEN_SCAN
            return [best_node, best_f, k + 1.0, float(after)]
        if phase == Phase.FINISH_OPEN_SCAN:
            best, open_count = x[0], x[1]
            if best < 0:
                return [FLAG_FAILED, -1.0]
            return [best, 0.0, open_count - 1.0, float(Phase.GOAL_TEST)]
        if phase == Phase.GOAL_TEST:
            state, goal, degree, selected = x[:4]
            if state == goal:
                return [selected, FLAG_FOUND, 0.0, degree, float(Phase.GOAL_TEST)]
            after = Phase.EXPAND_ACTION if degree > 0 else Phase.START_OPEN_SCAN
            return [-1.0, FLAG_RUNNING, 0.0, degree, float(after)]
        if phase == Phase.EXPAND_ACTION:
            selected, g, succ, cost, h, action, count, next_free, open_count = x[:9]
            child_g = g + cost
            after = Phase.EXPAND_ACTION if action + 1.0 < count else Phase.START_OPEN_SCAN
            return [
                succ,
                selected,
                action,
                child_g,
                h,
                child_g + h,
                1.0,
                1.0,
                next_free + 1.0,
                open_count + 1.0,
                action + 1.0,
                float(after),
            ]
        raise CompileError(f"Unknown phase code {phase}")


def phase_machine(
    instance: GraphInstance,
    layout: AStarLayout,
    n_r: int = ASTAR_READ_HEADS,
    n_w: int = ASTAR_WRITE_HEADS,
    large_f: float = ASTAR_LARGE_F,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> list[PhaseStep]:
    """Run the search symbolically on hard-addressed memory and record every step."""
    _check_heads(n_r, n_w)
    semantics = _PhaseSemantics(layout, large_f)
    memory = load_astar_memory(instance, layout, large_f)
    steps: list[PhaseStep] = []

    while memory[layout.addr_flag] >= 0:
        if len(steps) >= max_steps:
            raise CompileError(f"Phase machine did not finish within {max_steps} steps")
        phase = Phase(int(memory[layout.addr_phase]))
        control = tuple(float(memory[a]) for a in layout.controller_inputs)
        reads, writes = semantics.addresses(phase, memory)
        reads = reads + [layout.addr_zero] * (n_r - len(reads))
        values = [float(memory[a]) for a in reads]
        outputs = semantics.module(phase, values)
        outputs = outputs + [0.0] * (n_w - len(outputs))
        writes = writes + [layout.addr_scratch] * (n_w - len(writes))
        for a, v in zip(writes, outputs, strict=True):
            memory[a] = v

        gates = [0.0] * len(Phase)
        gates[phase] = 1.0
        steps.append(
            PhaseStep(
                index=len(steps),
                phase=phase,
                control_input=control,
                gates=tuple(gates),
                read_addresses=tuple(float(a) for a in reads),
                read_values=tuple(values),
                module_outputs=tuple(outputs),
                write_addresses=tuple(float(a) for a in writes),
            )
        )

    logger.info(
        f"Phase machine: {len(steps)} steps, "
        f"{int(memory[layout.addr_next_free])} node records, flag {memory[layout.addr_flag]}"
    )
    return steps


def _check_heads(n_r: int, n_w: int) -> None:
    if n_r < ASTAR_READ_HEADS:
        raise LayoutError(f"Expanding an action needs {ASTAR_READ_HEADS} read heads, got n_r = {n_r}")
    if n_w < ASTAR_WRITE_HEADS:
        raise LayoutError(f"Expanding an action needs {ASTAR_WRITE_HEADS} write heads, got n_w = {n_w}")


# ── Compiler ────────────────────────────────────────────────


def compile_phase_steps(
    steps: list[PhaseStep],
    layout: AStarLayout,
    n_r: int = ASTAR_READ_HEADS,
    n_w: int = ASTAR_WRITE_HEADS,
    memory_config: MemoryConfig | None = None,
    gate_bound: float = DEFAULT_GATE_BOUND,
    name: str = "astar",
) -> MNCProgram:
    """Turn recorded steps into a table controller and six gate-wrapped table modules.

    A key seen twice with different values is a TableConflictError naming
    both step indices.
    """
    K = len(Phase)
    controller_rows: dict[tuple, tuple[tuple, int]] = {}
    module_rows: list[dict[tuple, tuple[tuple, int]]] = [{} for _ in range(K)]

    for step in steps:
        if len(step.read_values) != n_r or len(step.module_outputs) != n_w:
            raise CompileError(f"Step {step.index} does not match n_r = {n_r}, n_w = {n_w}")
        _collect(
            controller_rows,
            step.control_input,
            (*step.gates, *step.read_addresses, *step.write_addresses),
            step.index,
            "controller",
        )
        _collect(
            module_rows[step.phase],
            step.read_values,
            step.module_outputs,
            step.index,
            f"module {MODULE_NAMES[step.phase]}",
        )

    controller = build_table(
        [TableEntry(key, value) for key, (value, _) in controller_rows.items()],
        key_width=len(layout.controller_inputs),
        value_width=K + n_r + n_w,
    )
    modules = []
    for k, rows in enumerate(module_rows):
        if rows:
            core = build_table([TableEntry(key, value) for key, (value, _) in rows.items()], n_r, n_w)
        else:
            core = build_affine(np.zeros((n_w, n_r)), np.zeros(n_w))
        modules.append(build_gate_wrap(core, gate_bound))
        logger.debug(f"[{name}] module {MODULE_NAMES[k]}: {len(rows)} table entries")

    logger.info(
        f"[{name}] compiled {len(steps)} steps into {len(controller_rows)} controller entries and "
        f"{sum(len(r) for r in module_rows)} module entries"
    )
    return MNCProgram(
        name=name,
        capacity=layout.memory_size,
        n_r=n_r,
        n_w=n_w,
        control_read_addresses=layout.controller_inputs,
        controller=controller,
        modules=tuple(modules),
        module_names=MODULE_NAMES,
        memory_config=memory_config or MemoryConfig(capacity=layout.memory_size),
        halt_cell=layout.addr_flag,
        gate_bound=gate_bound,
        layout=layout,
    )


def _collect(rows: dict, key: tuple, value: tuple, index: int, what: str) -> None:
    for k in key:
        if not (math.isfinite(k) and float(k).is_integer()):
            raise CompileError(f"{what}: step {index} has non-integer key component {k!r}")
    if not all(math.isfinite(v) for v in value):
        raise CompileError(f"{what}: step {index} produces non-finite values {value}")
    previous = rows.get(key)
    if previous is None:
        rows[key] = (value, index)
    elif previous[0] != value:
        raise TableConflictError(
            f"{what}: key {key} maps to different values at steps {previous[1]} and {index}",
            steps=(previous[1], index),
        )


def compile_astar(
    instance: GraphInstance,
    layout: AStarLayout | None = None,
    n_r: int = ASTAR_READ_HEADS,
    n_w: int = ASTAR_WRITE_HEADS,
    memory_config: MemoryConfig | None = None,
    gate_bound: float = DEFAULT_GATE_BOUND,
    large_f: float = ASTAR_LARGE_F,
) -> MNCProgram:
    if large_f > gate_bound:
        raise CompileError(f"Initial best F {large_f} exceeds the gate bound {gate_bound}")
    layout = layout or astar_layout_for(instance, large_f=large_f)
    steps = phase_machine(instance, layout, n_r, n_w, large_f)
    return compile_phase_steps(steps, layout, n_r, n_w, memory_config, gate_bound)


def table_sizes(steps: list[PhaseStep]) -> dict[str, int]:
    """Distinct table entries of the controller and of each module."""
    sizes = {"controller": len({s.control_input for s in steps})}
    for phase in Phase:
        sizes[MODULE_NAMES[phase]] = len({s.read_values for s in steps if s.phase == phase})
    return sizes


def compare_with_phase_steps(trace: ExecutionTrace, steps: list[PhaseStep]) -> list[str]:
    """Field-by-field comparison of a machine trace with the phase machine; empty when identical."""
    problems = []
    if trace.steps != len(steps):
        problems.append(f"machine ran {trace.steps} steps, phase machine {len(steps)}")
    for record, expected in zip(trace.records, steps):
        pairs = {
            "control input": (record.control_input, expected.control_input),
            "gates": (record.gates, expected.gates),
            "read addresses": (record.read_addresses, expected.read_addresses),
            "read values": (record.read_values, expected.read_values),
            "write addresses": (record.write_addresses, expected.write_addresses),
            "write values": (record.write_values, expected.module_outputs),
        }
        for label, (got, want) in pairs.items():
            if got != want:
                problems.append(f"step {expected.index} ({expected.phase.name}): {label} {got} != {want}")
        if problems:
            break
    return problems


# ── Program ─────────────────────────────────────────────────


class AStarProgram(BaseProgram):
    """One compiled program per instance; compiled programs are cached."""

    NAME = "astar"

    def __init__(self, *args, large_f: float = ASTAR_LARGE_F, **kwargs):
        super().__init__(*args, **kwargs)
        self.large_f = large_f
        self._compiled: dict[GraphInstance, MNCProgram] = {}

    def default_instance(self) -> GraphInstance:
        if CANONICAL_INSTANCE_PATH.exists():
            return load_instance(CANONICAL_INSTANCE_PATH)
        return canonical_instance()

    def layout_for(self, instance: GraphInstance) -> AStarLayout:
        return astar_layout_for(instance, memory_size=self.capacity, large_f=self.large_f)

    def program_for(self, instance: GraphInstance | None = None) -> MNCProgram:
        instance = instance or self.default_instance()
        program = self._compiled.get(instance)
        if program is None:
            layout = self.layout_for(instance)
            program = compile_astar(
                instance,
                layout,
                memory_config=self.memory_config(layout.memory_size),
                gate_bound=self.gate_bound,
                large_f=self.large_f,
            )
            self._compiled[instance] = program
        return program

    def compile(self) -> MNCProgram:
        return self.program_for(self.default_instance())

    def parse_input(self, text: str) -> GraphInstance:
        if text == "canonical":
            return self.default_instance()
        if "\n" in text:
            return parse_instance(text)
        return load_instance(text)

    def load(self, instance: GraphInstance) -> MemoryState:
        return load_astar_memory(instance, self.program_for(instance).layout, self.large_f)

    def execute(
        self,
        instance,
        max_steps=DEFAULT_MAX_STEPS,
        *,
        check=False,
        snapshots=False,
        control_via_attention=False,
    ) -> ExecutionTrace:
        program = self.program_for(instance)
        memory = load_astar_memory(instance, program.layout, self.large_f)
        return run(
            program,
            memory,
            max_steps,
            check=check,
            snapshots=snapshots,
            control_via_attention=control_via_attention,
        )

    def extract(self, trace: ExecutionTrace, instance: GraphInstance | None = None) -> AStarPath:
        instance = instance or self.default_instance()
        require_halted(trace)
        return extract_path(trace.final_memory, self.program_for(instance).layout)

    def describe_result(self, result: AStarPath, trace: ExecutionTrace, instance: GraphInstance | None = None) -> str:
        instance = instance or self.default_instance()
        if not result.found:
            return f"no path (failure state), steps = {trace.steps}"
        names = "→".join(instance.name_of(s) for s in result.states)
        return f"path = {names}, cost = {format_value(result.cost)}"

    def random_instance(self, rng: np.random.Generator) -> GraphInstance:
        return random_instance(rng, state_count=int(rng.integers(3, 8)))

    def inspect_extra(self, instance: GraphInstance | None = None) -> list[str]:
        instance = instance or self.default_instance()
        program = self.program_for(instance)
        steps = phase_machine(instance, program.layout, program.n_r, program.n_w, self.large_f)
        return [f"table entries: {name}={count}" for name, count in table_sizes(steps).items()]

    def differential(self, instance: GraphInstance, trace: ExecutionTrace) -> list[str]:
        program = self.program_for(instance)
        layout: AStarLayout = program.layout
        problems = compare_with_phase_steps(
            trace, phase_machine(instance, layout, program.n_r, program.n_w, self.large_f)
        )

        oracle = oracle_astar(instance, max_nodes=layout.max_nodes, large_f=self.large_f)
        path = self.extract(trace, instance)
        if path.found != oracle.found:
            problems.append(f"found = {path.found}, oracle found = {oracle.found}")
        elif path.found and (list(path.states) != oracle.path or path.cost != oracle.cost):
            problems.append(f"path {path.states} cost {path.cost} != oracle {oracle.path} cost {oracle.cost}")

        records = node_records(trace.final_memory, layout)
        expected = [asdict(node) for node in oracle.records]
        got = [{k: v for k, v in asdict(node).items() if k != "index"} for node in records]
        if got != expected:
            problems.append(f"node records differ from the oracle's ({len(got)} vs {len(expected)} records)")
        return problems
