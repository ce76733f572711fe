"""Tests for JSON Lines trace files."""

import json

import numpy as np
import pytest

from src.errors import TraceFormatError
from src.machine.trace_io import dumps_trace, loads_trace, read_trace, write_trace
from src.models import TerminationStatus
from src.programs.minimum import MinProgram
from src.programs.sort import SortProgram


def _make_trace(snapshots: bool = False):
    return SortProgram().execute([0.1, -7.25, 3, 1e-300], check=True, snapshots=snapshots)


class TestRoundTrip:
    def test_reload_is_identical(self):
        trace = _make_trace(snapshots=True)
        reloaded = loads_trace(dumps_trace(trace))
        assert reloaded.program == "sort"
        assert reloaded.status == TerminationStatus.HALTED
        assert reloaded.records == trace.records
        assert np.array_equal(reloaded.final_memory, trace.final_memory)

    def test_reserializes_to_same_bytes(self):
        text = dumps_trace(_make_trace())
        assert dumps_trace(loads_trace(text)) == text

    def test_runs_are_deterministic(self):
        first = MinProgram().execute([4, 9, -2, 6], check=True)
        second = MinProgram().execute([4, 9, -2, 6], check=True)
        assert dumps_trace(first) == dumps_trace(second)

    def test_file_round_trip(self, tmp_path):
        trace = _make_trace()
        path = tmp_path / "run.jsonl"
        write_trace(trace, path)
        assert path.read_text(encoding="utf-8").count("\n") == trace.steps + 2
        assert read_trace(path).records == trace.records

    def test_snapshots_only_when_requested(self):
        lines = dumps_trace(_make_trace()).splitlines()
        assert "memory" not in json.loads(lines[1])


class TestMalformed:
    def test_too_short(self):
        with pytest.raises(TraceFormatError):
            loads_trace('{"kind": "header", "version": 1, "program": "x"}\n')

    def test_not_json(self):
        with pytest.raises(TraceFormatError):
            loads_trace("header\nfinal\n")

    def test_wrong_version(self):
        text = dumps_trace(_make_trace()).replace('"version": 1', '"version": 99', 1)
        with pytest.raises(TraceFormatError):
            loads_trace(text)

    def test_missing_field(self):
        lines = dumps_trace(_make_trace()).splitlines()
        step = json.loads(lines[1])
        del step["gates"]
        lines[1] = json.dumps(step)
        with pytest.raises(TraceFormatError):
            loads_trace("\n".join(lines))

    def test_step_count_mismatch(self):
        lines = dumps_trace(_make_trace()).splitlines()
        del lines[1]
        with pytest.raises(TraceFormatError):
            loads_trace("\n".join(lines))
