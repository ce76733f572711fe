"""Pass-based adjacent sort driven by the pair index i and the pass limit p.

Each pass runs pair steps for i = 1..p-1, then one transition step that
shrinks p and resets i. The run stops at i = p = 1 after n(n+1)/2 steps.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from src.config import DEFAULT_GATE_BOUND, SORT_ARRAY_CAPACITY, SORT_MEMORY_SIZE
from src.errors import CapacityError, LayoutError
from src.memory.associative import new_memory
from src.models import ExecutionTrace, MemoryConfig, MemoryState, MNCProgram
from src.network.relu_builder import (
    build_affine,
    build_and,
    build_equals,
    build_gate_wrap,
    build_indicator_ge,
    build_max2,
    build_min2,
    on_linear,
    stack_parallel,
)
from src.oracles.reference import oracle_sort
from src.programs.base import (
    BaseProgram,
    check_array_domain,
    format_value,
    parse_array,
    random_array,
    require_halted,
)
from src.programs.controller import AddressMap, build_phase_controller, inhibition_bound

logger = logging.getLogger(__name__)

MODULE_NAMES = ("process", "next", "stop")

# Controller input is (i, p, 0).
_I = 0


@dataclass(frozen=True)
class SortLayout:
    array_base: int
    array_capacity: int
    addr_i: int
    addr_p: int
    addr_n: int
    addr_zero: int
    addr_flag: int
    addr_scratch: int

    @property
    def reserved(self) -> dict[str, int]:
        return {k: v for k, v in asdict(self).items() if k.startswith("addr_")}

    def validate(self, S: int) -> None:
        cells = list(self.reserved.values())
        if len(set(cells)) != len(cells):
            raise LayoutError(f"Reserved cells overlap: {self.reserved}")
        if self.array_capacity < 1:
            raise LayoutError("Array region needs at least one cell")
        region = range(self.array_base, self.array_base + self.array_capacity)
        if any(c in region for c in cells):
            raise LayoutError("Reserved cells fall inside the array region")
        if self.array_base + self.array_capacity > S or max(cells) >= S or min(cells + [self.array_base]) < 0:
            raise CapacityError(f"Layout does not fit in a memory of {S} cells")


def default_sort_layout(array_capacity: int = SORT_ARRAY_CAPACITY) -> SortLayout:
    return SortLayout(
        array_base=8,
        array_capacity=array_capacity,
        addr_i=0,
        addr_p=1,
        addr_n=2,
        addr_zero=3,
        addr_flag=4,
        addr_scratch=5,
    )


def compile_sort(
    S: int,
    layout: SortLayout,
    memory_config: MemoryConfig | None = None,
    gate_bound: float = DEFAULT_GATE_BOUND,
) -> MNCProgram:
    layout.validate(S)
    cfg = memory_config or MemoryConfig(capacity=S)
    if cfg.capacity != S:
        raise CapacityError(f"Memory config capacity {cfg.capacity} differs from S = {S}")
    base = layout.array_base
    wrap = inhibition_bound(gate_bound, S)
    zero = layout.addr_zero

    gates = [
        # i < p
        on_linear([-1.0, 1.0, 0.0], 0.0, build_indicator_ge(1)),
        # i = p and p > 1
        build_and(
            [
                on_linear([-1.0, 1.0, 0.0], 0.0, build_equals(0)),
                on_linear([0.0, 1.0, 0.0], 0.0, build_indicator_ge(2)),
            ]
        ),
        # i = p = 1
        build_and(
            [
                on_linear([1.0, 0.0, 0.0], 0.0, build_equals(1)),
                on_linear([0.0, 1.0, 0.0], 0.0, build_equals(1)),
            ]
        ),
    ]
    pair = [(base - 1, {_I: 1.0}), (base, {_I: 1.0}), layout.addr_i]
    addresses = [
        AddressMap(3, reads=pair, writes=pair),
        AddressMap(
            3,
            reads=[layout.addr_p, zero, zero],
            writes=[layout.addr_p, layout.addr_i, layout.addr_scratch],
        ),
        AddressMap(
            3,
            reads=[zero, zero, zero],
            writes=[layout.addr_flag, layout.addr_scratch, layout.addr_scratch],
        ),
    ]
    controller = build_phase_controller(gates, addresses, n_c=3, control_bound=wrap)

    cores = [
        stack_parallel(
            [build_min2(), build_max2(), build_affine([[1.0]], [1.0])],
            selections=[(0, 1), (0, 1), (2,)],
            input_dim=3,
        ),
        build_affine([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], [-1.0, 1.0, 0.0]),
        build_affine(np.zeros((3, 3)), [-1.0, 0.0, 0.0]),
    ]
    modules = tuple(build_gate_wrap(core, wrap) for core in cores)

    return MNCProgram(
        name="sort",
        capacity=S,
        n_r=3,
        n_w=3,
        control_read_addresses=(layout.addr_i, layout.addr_p, zero),
        controller=controller,
        modules=modules,
        module_names=MODULE_NAMES,
        memory_config=cfg,
        halt_cell=layout.addr_flag,
        gate_bound=gate_bound,
        layout=layout,
    )


def load_sort_instance(program: MNCProgram, array: Sequence[float]) -> MemoryState:
    layout: SortLayout = program.layout
    values = check_array_domain(array, layout.array_capacity, program.gate_bound)
    n = values.shape[0]
    memory = new_memory(program.capacity)
    memory[layout.array_base : layout.array_base + n] = values
    memory[layout.addr_i] = 1.0
    memory[layout.addr_p] = float(n)
    memory[layout.addr_n] = float(n)
    memory[layout.addr_flag] = 1.0
    return memory


def extract_sorted(trace: ExecutionTrace, layout: SortLayout, n: int) -> list[float]:
    require_halted(trace)
    return [float(v) for v in trace.final_memory[layout.array_base : layout.array_base + n]]


def expected_sort_steps(n: int) -> int:
    return n * (n + 1) // 2


class SortProgram(BaseProgram):
    NAME = "sort"

    def compile(self) -> MNCProgram:
        S = self.capacity or SORT_MEMORY_SIZE
        layout = default_sort_layout()
        if self.capacity is not None:
            layout = default_sort_layout(array_capacity=S - layout.array_base)
        return compile_sort(S, layout, self.memory_config(S), self.gate_bound)

    def parse_input(self, text: str) -> list[float]:
        return parse_array(text)

    def load(self, instance: Sequence[float]) -> MemoryState:
        return load_sort_instance(self.program, instance)

    def extract(self, trace: ExecutionTrace, instance=None) -> list[float]:
        layout: SortLayout = self.program.layout
        n = int(trace.final_memory[layout.addr_n])
        return extract_sorted(trace, layout, n)

    def describe_result(self, result: list[float], trace: ExecutionTrace, instance=None) -> str:
        return f"sorted = [{', '.join(format_value(v) for v in result)}], steps = {trace.steps}"

    def random_instance(self, rng: np.random.Generator) -> list[float]:
        # Quadratic step count; keep verify runs short.
        return random_array(rng, min(16, self.program.layout.array_capacity))

    def differential(self, instance: Sequence[float], trace: ExecutionTrace) -> list[str]:
        problems = []
        expected, _ = oracle_sort(instance)
        got = self.extract(trace)
        if got != expected:
            problems.append(f"sorted {got} != oracle {expected}")
        n = len(instance)
        if trace.steps != expected_sort_steps(n):
            problems.append(f"{trace.steps} steps, expected n(n+1)/2 = {expected_sort_steps(n)}")
        return problems
