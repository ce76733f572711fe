"""Linear-scan minimum: init, update and stop modules over one contiguous array region."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from src.config import DEFAULT_GATE_BOUND, MIN_ARRAY_CAPACITY, MIN_MEMORY_SIZE
from src.errors import CapacityError, LayoutError
from src.memory.associative import new_memory
from src.models import ExecutionTrace, MemoryConfig, MemoryState, MNCProgram
from src.network.relu_builder import (
    build_affine,
    build_and,
    build_equals,
    build_gate_wrap,
    build_indicator_ge,
    build_min2,
    on_linear,
    stack_parallel,
)
from src.oracles.reference import oracle_min
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

MODULE_NAMES = ("init", "update", "stop")

# Positions in the controller input (i, n, 0).
_I = 0


@dataclass(frozen=True)
class MinLayout:
    array_base: int
    array_capacity: int
    addr_i: int
    addr_n: int
    addr_m: int
    addr_zero: int
    addr_flag: int
    addr_out: int
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
        clash = [c for c in cells if c in region]
        if clash:
            raise LayoutError(f"Reserved cells {clash} fall inside the array region")
        if self.array_base + self.array_capacity > S or max(cells) >= S or min(cells + [self.array_base]) < 0:
            raise CapacityError(f"Layout does not fit in a memory of {S} cells")


def default_min_layout(array_capacity: int = MIN_ARRAY_CAPACITY) -> MinLayout:
    return MinLayout(
        array_base=8,
        array_capacity=array_capacity,
        addr_i=0,
        addr_n=1,
        addr_m=2,
        addr_zero=3,
        addr_flag=4,
        addr_out=5,
        addr_scratch=6,
    )


def compile_min(
    S: int,
    layout: MinLayout,
    memory_config: MemoryConfig | None = None,
    gate_bound: float = DEFAULT_GATE_BOUND,
) -> MNCProgram:
    layout.validate(S)
    cfg = memory_config or MemoryConfig(capacity=S)
    if cfg.capacity != S:
        raise CapacityError(f"Memory config capacity {cfg.capacity} differs from S = {S}")
    base = layout.array_base
    wrap = inhibition_bound(gate_bound, S)

    gates = [
        on_linear([1.0, 0.0, 0.0], 0.0, build_equals(1)),
        build_and(
            [
                on_linear([1.0, 0.0, 0.0], 0.0, build_indicator_ge(2)),
                on_linear([-1.0, 1.0, 0.0], 0.0, build_indicator_ge(0)),
            ]
        ),
        on_linear([1.0, -1.0, 0.0], 0.0, build_equals(1)),
    ]
    addresses = [
        AddressMap(
            3,
            reads=[base, layout.addr_i, layout.addr_zero],
            writes=[layout.addr_m, layout.addr_i],
        ),
        AddressMap(
            3,
            reads=[layout.addr_m, (base - 1, {_I: 1.0}), layout.addr_i],
            writes=[layout.addr_m, layout.addr_i],
        ),
        AddressMap(
            3,
            reads=[layout.addr_m, layout.addr_zero, layout.addr_zero],
            writes=[layout.addr_flag, layout.addr_out],
        ),
    ]
    controller = build_phase_controller(gates, addresses, n_c=3, control_bound=wrap)

    cores = [
        build_affine([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [0.0, 1.0]),
        stack_parallel(
            [build_min2(), build_affine([[1.0]], [1.0])],
            selections=[(0, 1), (2,)],
            input_dim=3,
        ),
        build_affine([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [-1.0, 0.0]),
    ]
    modules = tuple(build_gate_wrap(core, wrap) for core in cores)

    return MNCProgram(
        name="min",
        capacity=S,
        n_r=3,
        n_w=2,
        control_read_addresses=(layout.addr_i, layout.addr_n, layout.addr_zero),
        controller=controller,
        modules=modules,
        module_names=MODULE_NAMES,
        memory_config=cfg,
        halt_cell=layout.addr_flag,
        gate_bound=gate_bound,
        layout=layout,
    )


def load_min_instance(program: MNCProgram, array: Sequence[float]) -> MemoryState:
    layout: MinLayout = program.layout
    values = check_array_domain(array, layout.array_capacity, program.gate_bound)
    n = values.shape[0]
    memory = new_memory(program.capacity)
    memory[layout.array_base : layout.array_base + n] = values
    memory[layout.addr_i] = 1.0
    memory[layout.addr_n] = float(n)
    memory[layout.addr_flag] = 1.0
    return memory


def extract_min(trace: ExecutionTrace, layout: MinLayout) -> float:
    require_halted(trace)
    return float(trace.final_memory[layout.addr_out])


class MinProgram(BaseProgram):
    NAME = "min"

    def compile(self) -> MNCProgram:
        S = self.capacity or MIN_MEMORY_SIZE
        layout = default_min_layout()
        if self.capacity is not None:
            layout = default_min_layout(array_capacity=S - layout.array_base)
        return compile_min(S, layout, self.memory_config(S), self.gate_bound)

    def parse_input(self, text: str) -> list[float]:
        return parse_array(text)

    def load(self, instance: Sequence[float]) -> MemoryState:
        return load_min_instance(self.program, instance)

    def extract(self, trace: ExecutionTrace, instance=None) -> float:
        return extract_min(trace, self.program.layout)

    def describe_result(self, result: float, trace: ExecutionTrace, instance=None) -> str:
        return f"min = {format_value(result)}, steps = {trace.steps}"

    def random_instance(self, rng: np.random.Generator) -> list[float]:
        return random_array(rng, self.program.layout.array_capacity)

    def differential(self, instance: Sequence[float], trace: ExecutionTrace) -> list[str]:
        problems = []
        got, expected = self.extract(trace), oracle_min(instance)
        if got != expected:
            problems.append(f"min {got!r} != oracle {expected!r}")
        if trace.steps != len(instance) + 1:
            problems.append(f"{trace.steps} steps, expected n + 1 = {len(instance) + 1}")
        return problems
