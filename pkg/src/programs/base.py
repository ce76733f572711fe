"""Base class shared by every compiled case-study program."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from src.config import (
    DEFAULT_ALPHA,
    DEFAULT_GATE_BOUND,
    DEFAULT_MAX_STEPS,
    DEFAULT_TAU,
    VERIFY_FLOAT_GRID,
    VERIFY_FLOAT_RANGE,
    VERIFY_INT_RANGE,
)
from src.errors import InstanceFormatError, TraceIntegrityError
from src.machine.engine import run
from src.models import ExecutionTrace, MemoryConfig, MemoryState, MNCProgram
from src.network.relu_builder import network_stats

logger = logging.getLogger(__name__)


class BaseProgram(ABC):
    """Compile once, then load instances, run them and read the answer back."""

    NAME: str = ""

    def __init__(
        self,
        tau: float = DEFAULT_TAU,
        alpha: float = DEFAULT_ALPHA,
        gate_bound: float = DEFAULT_GATE_BOUND,
        capacity: int | None = None,
        strict_addresses: bool = False,
    ):
        self.tau = tau
        self.alpha = alpha
        self.gate_bound = gate_bound
        self.capacity = capacity
        self.strict_addresses = strict_addresses
        self._program: MNCProgram | None = None

    def memory_config(self, capacity: int) -> MemoryConfig:
        return MemoryConfig(
            capacity=capacity,
            tau=self.tau,
            alpha=self.alpha,
            strict_addresses=self.strict_addresses,
        )

    @property
    def program(self) -> MNCProgram:
        if self._program is None:
            self._program = self.compile()
            stats = network_stats(self._program.controller)
            logger.info(
                f"[{self.NAME}] compiled: S={self._program.capacity} K={self._program.K} "
                f"n_r={self._program.n_r} n_w={self._program.n_w} "
                f"controller hidden units={stats['hidden_units']}"
            )
        return self._program

    @abstractmethod
    def compile(self) -> MNCProgram:
        ...

    @abstractmethod
    def parse_input(self, text: str) -> Any:
        """Turn the CLI's textual input into an instance."""

    @abstractmethod
    def load(self, instance: Any) -> MemoryState:
        ...

    @abstractmethod
    def extract(self, trace: ExecutionTrace, instance: Any = None) -> Any:
        ...

    @abstractmethod
    def describe_result(self, result: Any, trace: ExecutionTrace, instance: Any = None) -> str:
        """One-line human-readable result."""

    @abstractmethod
    def random_instance(self, rng: np.random.Generator) -> Any:
        ...

    @abstractmethod
    def differential(self, instance: Any, trace: ExecutionTrace) -> list[str]:
        """Compare a halted run against the symbolic reference; return mismatch descriptions."""

    def default_instance(self) -> Any:
        return None

    def program_for(self, instance: Any = None) -> MNCProgram:
        """The compiled program that runs instance; one shared program unless a subclass compiles per instance."""
        return self.program

    def inspect_extra(self, instance: Any = None) -> list[str]:
        return []

    def execute(
        self,
        instance: Any,
        max_steps: int = DEFAULT_MAX_STEPS,
        *,
        check: bool = False,
        snapshots: bool = False,
        control_via_attention: bool = False,
    ) -> ExecutionTrace:
        """Load the instance into fresh memory and run the compiled program to halt."""
        memory = self.load(instance)
        return run(
            self.program,
            memory,
            max_steps,
            check=check,
            snapshots=snapshots,
            control_via_attention=control_via_attention,
        )


def parse_array(text: str) -> list[float]:
    """Comma- or whitespace-separated numbers."""
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise InstanceFormatError("Empty array literal")
    try:
        return [float(tok) for tok in tokens]
    except ValueError as e:
        raise InstanceFormatError(f"Cannot parse array literal {text!r}: {e}") from e


def random_array(rng: np.random.Generator, max_length: int) -> list[float]:
    """Integers in VERIFY_INT_RANGE, or doubles on the VERIFY_FLOAT_GRID within VERIFY_FLOAT_RANGE."""
    n = int(rng.integers(1, max_length + 1))
    if rng.random() < 0.5:
        lo, hi = VERIFY_INT_RANGE
        return [float(v) for v in rng.integers(lo, hi + 1, size=n)]
    lo, hi = VERIFY_FLOAT_RANGE
    steps = rng.integers(int(lo / VERIFY_FLOAT_GRID), int(hi / VERIFY_FLOAT_GRID) + 1, size=n)
    return [float(s) * VERIFY_FLOAT_GRID for s in steps]


def check_array_domain(array, capacity: int, gate_bound: float) -> np.ndarray:
    """Length 1..capacity, finite, and |a| <= B - 1 so gated-off cores stay inside the bound."""
    values = np.asarray(array, dtype=np.float64).reshape(-1)
    if not 1 <= values.shape[0] <= capacity:
        raise ValueError(f"Array length {values.shape[0]} outside 1..{capacity}")
    if not np.all(np.isfinite(values)):
        raise ValueError("Array holds non-finite values")
    if np.any(np.abs(values) > gate_bound - 1.0):
        raise ValueError(f"Array values must lie within {gate_bound - 1.0} of zero")
    return values


def format_value(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def require_halted(trace: ExecutionTrace) -> None:
    if not trace.halted:
        raise TraceIntegrityError(f"[{trace.program}] trace did not halt ({trace.status.value})")
