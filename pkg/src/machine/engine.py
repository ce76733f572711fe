"""Fixed-graph execution engine: one controller, K gated modules, scalar associative memory."""

from __future__ import annotations

import logging
import math

import numpy as np

from src.config import GATE_TOL
from src.errors import GateBoundError, GateContractError, NonTerminationError, ProgramHaltedError
from src.memory.associative import check_address, hard_addressing, read, validate_memory, write
from src.models import ExecutionTrace, MemoryState, MNCProgram, StepRecord, TerminationStatus
from src.network.relu_builder import evaluate

logger = logging.getLogger(__name__)


def step(
    program: MNCProgram,
    memory: MemoryState,
    index: int = 0,
    *,
    check: bool = False,
    snapshot: bool = False,
    control_via_attention: bool = False,
) -> tuple[MemoryState, StepRecord]:
    """Execute one step and return the next memory together with its record.

    Control read -> controller -> functional reads -> all modules -> additive
    merge -> writes in head order.
    """
    cfg = program.memory_config
    validate_memory(memory, cfg)
    K, n_r = program.K, program.n_r

    if control_via_attention:
        control = np.array([read(memory, a, cfg) for a in program.control_read_addresses])
    else:
        control = memory[list(program.control_read_addresses)]

    out = evaluate(program.controller, control)
    gates = out[:K]
    read_addrs = out[K : K + n_r]
    write_addrs = out[K + n_r :]
    for q in (*read_addrs, *write_addrs):
        check_address(q, cfg.capacity, cfg.strict_addresses)

    values = np.array([read(memory, q, cfg) for q in read_addrs])
    outputs = np.vstack(
        [evaluate(module, np.concatenate(([gates[k]], values))) for k, module in enumerate(program.modules)]
    )
    merged = merge_outputs(outputs)

    over = np.abs(merged) > program.gate_bound
    if np.any(over):
        raise GateBoundError(
            f"[{program.name}] step {index}: merged outputs {merged[over].tolist()} "
            f"exceed gate bound {program.gate_bound}"
        )

    new_memory = memory
    for q, v in zip(write_addrs, merged):
        new_memory = write(new_memory, q, v, cfg)

    record = StepRecord(
        step=index,
        control_input=_floats(control),
        gates=_floats(gates),
        read_addresses=_floats(read_addrs),
        read_values=_floats(values),
        module_outputs=tuple(_floats(row) for row in outputs),
        write_values=_floats(merged),
        write_addresses=_floats(write_addrs),
        halted=bool(new_memory[program.halt_cell] < 0),
        snapshot=_floats(new_memory) if snapshot else None,
    )

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            f"[{program.name}] step {index}: gates={record.gates} "
            f"r={record.read_addresses} w={record.write_addresses} y={record.write_values}"
        )

    if check:
        violations = check_step(record, K)
        if hard_addressing(cfg.tau):
            violations += check_frame(memory, new_memory, write_addrs)
        if violations:
            raise GateContractError(
                f"[{program.name}] step {index}: {len(violations)} contract violation(s): {violations[0]}",
                violations,
            )
    return new_memory, record


def run(
    program: MNCProgram,
    memory: MemoryState,
    max_steps: int,
    *,
    check: bool = False,
    snapshots: bool = False,
    control_via_attention: bool = False,
) -> ExecutionTrace:
    """Step until the halt cell goes negative; NonTerminationError after max_steps."""
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    memory = np.array(memory, dtype=np.float64)
    if memory[program.halt_cell] < 0:
        raise ProgramHaltedError(
            f"[{program.name}] halt cell {program.halt_cell} is already negative; refusing to step"
        )

    trace = ExecutionTrace(program=program.name)
    for t in range(max_steps):
        memory, record = step(
            program,
            memory,
            t,
            check=check,
            snapshot=snapshots,
            control_via_attention=control_via_attention,
        )
        trace.records.append(record)
        if record.halted:
            trace.final_memory = memory
            trace.status = TerminationStatus.HALTED
            logger.info(f"[{program.name}] halted after {trace.steps} steps")
            return trace

    trace.final_memory = memory
    trace.status = TerminationStatus.MAX_STEPS_EXCEEDED
    logger.error(f"[{program.name}] no halt within {max_steps} steps")
    raise NonTerminationError(f"[{program.name}] did not halt within {max_steps} steps", trace)


def merge_outputs(outputs: np.ndarray) -> np.ndarray:
    """Componentwise sum of module outputs, accumulated in module order."""
    merged = np.zeros(outputs.shape[1])
    for row in outputs:
        merged = merged + row
    return merged


def check_step(record: StepRecord, K: int) -> list[str]:
    """One-hot gates, the additive merge law and inhibition of inactive modules."""
    violations: list[str] = []
    gates = record.gates
    if len(gates) != K:
        violations.append(f"expected {K} gates, got {len(gates)}")
    for k, g in enumerate(gates):
        if min(abs(g), abs(g - 1.0)) > GATE_TOL:
            violations.append(f"one-hot: gate {k} = {g!r} is neither 0 nor 1")
    if abs(sum(gates) - 1.0) > GATE_TOL:
        violations.append(f"one-hot: gates sum to {sum(gates)!r}")

    outputs = np.array(record.module_outputs, dtype=np.float64)
    if outputs.shape[0] and not np.array_equal(merge_outputs(outputs), np.array(record.write_values)):
        violations.append(f"merge: write values {record.write_values} are not the sum of module outputs")

    for k, (g, row) in enumerate(zip(gates, record.module_outputs)):
        if abs(g) <= GATE_TOL and any(u != 0.0 for u in row):
            violations.append(f"inhibition: module {k} is gated off but returned {row}")
    return violations


def check_frame(before: MemoryState, after: MemoryState, write_addresses) -> list[str]:
    """Cells no write head touched must be bitwise unchanged."""
    touched = np.zeros(before.shape[0], dtype=bool)
    for q in write_addresses:
        touched[math.floor(q)] = True
        touched[math.ceil(q)] = True
    untouched = ~touched
    # Compare bit patterns so a zero that flips sign counts as a change.
    changed = np.flatnonzero(untouched & (_bits(before) != _bits(after)))
    if changed.size:
        return [f"frame: cells {changed.tolist()} changed without being written"]
    return []


def _bits(memory: MemoryState) -> np.ndarray:
    return np.ascontiguousarray(memory, dtype=np.float64).view(np.int64)


def _floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)
