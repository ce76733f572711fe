"""Line-delimited JSON trace files: a header, one line per step, a final line.

Floats are written with repr, which is the shortest string that round-trips
the double, so a reloaded trace is bit-identical and re-serializes to the
same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from src.errors import TraceFormatError
from src.models import ExecutionTrace, StepRecord, TerminationStatus

FORMAT_VERSION = 1


def record_to_dict(record: StepRecord) -> dict:
    data = {
        "kind": "step",
        "step": record.step,
        "control_input": list(record.control_input),
        "gates": list(record.gates),
        "read_addrs": list(record.read_addresses),
        "read_values": list(record.read_values),
        "module_outputs": [list(row) for row in record.module_outputs],
        "write_addrs": list(record.write_addresses),
        "write_values": list(record.write_values),
        "halted": record.halted,
    }
    if record.snapshot is not None:
        data["memory"] = list(record.snapshot)
    return data


def record_from_dict(data: dict) -> StepRecord:
    snapshot = data.get("memory")
    return StepRecord(
        step=int(data["step"]),
        control_input=_floats(data["control_input"]),
        gates=_floats(data["gates"]),
        read_addresses=_floats(data["read_addrs"]),
        read_values=_floats(data["read_values"]),
        module_outputs=tuple(_floats(row) for row in data["module_outputs"]),
        write_values=_floats(data["write_values"]),
        write_addresses=_floats(data["write_addrs"]),
        halted=bool(data["halted"]),
        snapshot=_floats(snapshot) if snapshot is not None else None,
    )


def dumps_trace(trace: ExecutionTrace) -> str:
    lines = [
        json.dumps({"kind": "header", "version": FORMAT_VERSION, "program": trace.program}),
        *(json.dumps(record_to_dict(r)) for r in trace.records),
        json.dumps(
            {
                "kind": "final",
                "status": trace.status.value,
                "steps": trace.steps,
                "final_memory": [float(v) for v in trace.final_memory],
            }
        ),
    ]
    return "\n".join(lines) + "\n"


def loads_trace(text: str) -> ExecutionTrace:
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise TraceFormatError("A trace needs at least a header and a final line")
    try:
        objects = [json.loads(line) for line in lines]
    except json.JSONDecodeError as e:
        raise TraceFormatError(f"Invalid trace line: {e}") from e

    header, *steps, final = objects
    if header.get("kind") != "header" or final.get("kind") != "final":
        raise TraceFormatError("Trace must start with a header line and end with a final line")
    if header.get("version") != FORMAT_VERSION:
        raise TraceFormatError(f"Unsupported trace version {header.get('version')}")

    try:
        records = [record_from_dict(obj) for obj in steps]
        status = TerminationStatus(final["status"])
        final_memory = np.array(final["final_memory"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise TraceFormatError(f"Malformed trace record: {e}") from e
    if final.get("steps") != len(records):
        raise TraceFormatError(f"Final line declares {final.get('steps')} steps, found {len(records)}")

    return ExecutionTrace(
        program=header["program"],
        records=records,
        final_memory=final_memory,
        status=status,
    )


def write_trace(trace: ExecutionTrace, path: str | Path) -> None:
    Path(path).write_text(dumps_trace(trace), encoding="utf-8")


def read_trace(path: str | Path) -> ExecutionTrace:
    return loads_trace(Path(path).read_text(encoding="utf-8"))


def _floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)
