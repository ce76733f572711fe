"""Data models for the Modular Neural Computer."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from src.errors import StructuralError

# V[a] = M(a); a plain float64 vector of length S.
MemoryState = np.ndarray


class Activation(str, Enum):
    RELU = "relu"
    IDENTITY = "identity"


class TerminationStatus(str, Enum):
    HALTED = "halted"
    MAX_STEPS_EXCEEDED = "max_steps_exceeded"


@dataclass(frozen=True)
class MemoryConfig:
    """Capacity S, softmax temperature tau and write strength alpha."""

    capacity: int
    tau: float = 1e-4
    alpha: float = 1.0
    strict_addresses: bool = False

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"Memory capacity must be >= 1, got {self.capacity}")
        if not self.tau > 0:
            raise ValueError(f"Temperature must be > 0, got {self.tau}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"Write strength must be in (0, 1], got {self.alpha}")


@dataclass(frozen=True, eq=False)
class Layer:
    """One affine map followed by an activation: act(W @ h + b)."""

    weight: np.ndarray
    bias: np.ndarray
    activation: Activation = Activation.RELU

    def __post_init__(self):
        weight = np.array(self.weight, dtype=np.float64, ndmin=2)
        bias = np.array(self.bias, dtype=np.float64).reshape(-1)
        if weight.ndim != 2:
            raise StructuralError(f"Weight must be a matrix, got shape {weight.shape}")
        if weight.shape[0] != bias.shape[0]:
            raise StructuralError(
                f"Bias length {bias.shape[0]} does not match {weight.shape[0]} output units"
            )
        if not (np.all(np.isfinite(weight)) and np.all(np.isfinite(bias))):
            raise StructuralError("Weights and biases must be finite")
        weight.setflags(write=False)
        bias.setflags(write=False)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "activation", Activation(self.activation))

    @property
    def input_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def output_dim(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True, eq=False)
class MLPNetwork:
    """Layered affine + ReLU network with explicit weights."""

    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise StructuralError("A network needs at least one layer")
        for k in range(1, len(layers)):
            if layers[k].input_dim != layers[k - 1].output_dim:
                raise StructuralError(
                    f"Layer {k} expects {layers[k].input_dim} inputs but layer {k - 1} "
                    f"produces {layers[k - 1].output_dim}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0].input_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].output_dim

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class TableEntry:
    """One integer key and the value a table network must return for it."""

    key: tuple[int, ...]
    value: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class MNCProgram:
    """A compiled algorithm: controller, K gated modules and the memory contract."""

    name: str
    capacity: int
    n_r: int
    n_w: int
    control_read_addresses: tuple[int, ...]
    controller: MLPNetwork
    modules: tuple[MLPNetwork, ...]
    module_names: tuple[str, ...]
    memory_config: MemoryConfig
    halt_cell: int
    gate_bound: float
    layout: Any = None

    def __post_init__(self):
        expected = self.K + self.n_r + self.n_w
        if self.controller.input_dim != len(self.control_read_addresses):
            raise StructuralError(
                f"Controller takes {self.controller.input_dim} inputs but "
                f"{len(self.control_read_addresses)} control addresses are declared"
            )
        if self.controller.output_dim != expected:
            raise StructuralError(
                f"Controller emits {self.controller.output_dim} values, expected K + n_r + n_w = {expected}"
            )
        for name, module in zip(self.module_names, self.modules):
            if module.input_dim != 1 + self.n_r or module.output_dim != self.n_w:
                raise StructuralError(
                    f"Module {name} maps {module.input_dim} -> {module.output_dim}, "
                    f"expected {1 + self.n_r} -> {self.n_w}"
                )
        if len(self.module_names) != len(self.modules):
            raise StructuralError("Every module needs a name")
        for addr in (*self.control_read_addresses, self.halt_cell):
            if not 0 <= addr < self.capacity:
                raise StructuralError(f"Reserved address {addr} outside memory of size {self.capacity}")

    @property
    def K(self) -> int:
        return len(self.modules)


@dataclass(frozen=True)
class StepRecord:
    """Everything one execution step observed and produced."""

    step: int
    control_input: tuple[float, ...]
    gates: tuple[float, ...]
    read_addresses: tuple[float, ...]
    read_values: tuple[float, ...]
    module_outputs: tuple[tuple[float, ...], ...]
    write_values: tuple[float, ...]
    write_addresses: tuple[float, ...]
    halted: bool
    snapshot: Optional[tuple[float, ...]] = None

    @property
    def active_module(self) -> int | None:
        hot = [k for k, g in enumerate(self.gates) if g == 1.0]
        return hot[0] if len(hot) == 1 else None


@dataclass(eq=False)
class ExecutionTrace:
    """Ordered step records plus the final memory of one run."""

    program: str
    records: list[StepRecord] = field(default_factory=list)
    final_memory: MemoryState = field(default_factory=lambda: np.zeros(0))
    status: TerminationStatus = TerminationStatus.HALTED

    @property
    def steps(self) -> int:
        return len(self.records)

    @property
    def halted(self) -> bool:
        return self.status == TerminationStatus.HALTED


@dataclass(frozen=True)
class GraphState:
    """One state of a search problem: id, name, heuristic and ordered (successor, cost) actions."""

    id: int
    name: str
    h: float
    actions: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class GraphInstance:
    """A fixed search problem: states indexed by id, plus start and goal ids."""

    states: tuple[GraphState, ...]
    start: int
    goal: int

    def __post_init__(self):
        for idx, state in enumerate(self.states):
            if state.id != idx:
                raise ValueError(f"State ids must be 0..n-1 in order, got {state.id} at {idx}")
            if len(state.actions) > 2:
                raise ValueError(f"State {state.name} has {len(state.actions)} actions, at most 2 allowed")
            for succ, cost in state.actions:
                if not 0 <= succ < len(self.states):
                    raise ValueError(f"State {state.name} points at unknown successor {succ}")
                if not cost > 0:
                    raise ValueError(f"Edge {state.name}->{succ} has non-positive cost {cost}")
            if state.h < 0:
                raise ValueError(f"State {state.name} has negative heuristic {state.h}")
        for sid in (self.start, self.goal):
            if not 0 <= sid < len(self.states):
                raise ValueError(f"Unknown start/goal state id {sid}")

    @property
    def state_count(self) -> int:
        return len(self.states)

    def name_of(self, state_id: int) -> str:
        return self.states[state_id].name

    def id_of(self, name: str) -> int:
        for state in self.states:
            if state.name == name:
                return state.id
        raise KeyError(name)

    def cost(self, src: int, dst: int) -> float:
        for succ, cost in self.states[src].actions:
            if succ == dst:
                return cost
        raise KeyError((src, dst))
