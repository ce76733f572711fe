"""Tests for the compiled linear-scan minimum."""

import dataclasses

import numpy as np
import pytest

from src.errors import CapacityError, InstanceFormatError, LayoutError
from src.network.relu_builder import evaluate
from src.oracles.reference import oracle_min
from src.programs.minimum import MinProgram, compile_min, default_min_layout


def _make_program(**options) -> MinProgram:
    return MinProgram(**options)


class TestController:
    @pytest.mark.parametrize(
        "control, expected",
        [((1, 5, 0), [1, 0, 0]), ((3, 5, 0), [0, 1, 0]), ((5, 5, 0), [0, 1, 0]), ((6, 5, 0), [0, 0, 1])],
    )
    def test_gates_are_one_hot(self, control, expected):
        program = _make_program().program
        out = evaluate(program.controller, control)
        assert out[: program.K].tolist() == expected

    def test_update_reads_element_i(self):
        program = _make_program().program
        layout = program.layout
        out = evaluate(program.controller, (3, 5, 0))
        reads = out[program.K : program.K + program.n_r]
        assert reads.tolist() == [layout.addr_m, layout.array_base + 2, layout.addr_i]


class TestRun:
    def test_small_array(self):
        builder = _make_program()
        trace = builder.execute([5, 2, 8], check=True)
        assert builder.extract(trace) == 2.0
        assert trace.steps == 4
        assert builder.describe_result(2.0, trace) == "min = 2, steps = 4"

    def test_single_element(self):
        builder = _make_program()
        trace = builder.execute([7], check=True)
        assert builder.extract(trace) == 7.0
        assert trace.steps == 2

    def test_gate_sequence(self):
        trace = _make_program().execute([4, -1, 3, 0], check=True)
        assert [r.active_module for r in trace.records] == [0, 1, 1, 1, 2]

    def test_running_minimum_invariant(self):
        builder = _make_program()
        array = [9, 4, 6, -3, 5, -3, 10]
        trace = builder.execute(array, check=True, snapshots=True)
        layout = builder.program.layout
        for record in trace.records[:-1]:
            i = int(record.snapshot[layout.addr_i])
            assert record.snapshot[layout.addr_m] == min(array[: i - 1])

    def test_fractional_values(self):
        builder = _make_program()
        trace = builder.execute([0.5, -0.25, 0.375], check=True)
        assert builder.extract(trace) == -0.25

    def test_full_capacity(self):
        builder = _make_program()
        array = list(range(32, 0, -1))
        trace = builder.execute(array, check=True)
        assert builder.extract(trace) == 1.0
        assert trace.steps == 33

    def test_custom_capacity(self):
        builder = _make_program(capacity=16)
        assert builder.program.layout.array_capacity == 8
        trace = builder.execute([3, 1, 2], check=True)
        assert builder.extract(trace) == 1.0

    def test_random_against_oracle(self):
        builder = _make_program()
        rng = np.random.default_rng(42)
        for _ in range(40):
            array = builder.random_instance(rng)
            trace = builder.execute(array, check=True)
            assert builder.extract(trace) == oracle_min(array)
            assert builder.differential(array, trace) == []

    def test_gate_bound_below_memory_size(self):
        builder = _make_program(gate_bound=40.0)
        array = [(5 * v) % 11 - 5 for v in range(32)]
        trace = builder.execute(array, check=True)
        assert trace.steps == 33
        assert builder.extract(trace) == -5.0

    def test_strict_addresses(self):
        builder = _make_program(strict_addresses=True)
        trace = builder.execute([6, 3, 8, -1], check=True)
        assert builder.extract(trace) == -1.0
        assert builder.differential([6, 3, 8, -1], trace) == []

    def test_control_read_through_attention(self):
        builder = _make_program()
        array = [4, -7, 2]
        direct = builder.execute(array, check=True)
        attended = builder.execute(array, check=True, control_via_attention=True)
        assert attended.records == direct.records
        assert builder.extract(attended) == -7.0


class TestInputs:
    def test_parse(self):
        assert _make_program().parse_input("3, -1.5 4") == [3.0, -1.5, 4.0]

    def test_parse_empty(self):
        with pytest.raises(InstanceFormatError):
            _make_program().parse_input("  ")

    def test_parse_garbage(self):
        with pytest.raises(InstanceFormatError):
            _make_program().parse_input("1, x")

    def test_empty_array(self):
        with pytest.raises(ValueError):
            _make_program().load([])

    def test_too_long(self):
        with pytest.raises(ValueError):
            _make_program().load([1.0] * 33)

    def test_value_outside_gate_bound(self):
        with pytest.raises(ValueError):
            _make_program(gate_bound=100.0).load([1.0, 99.5])


class TestLayout:
    def test_overlapping_cells(self):
        layout = dataclasses.replace(default_min_layout(), addr_out=0)
        with pytest.raises(LayoutError):
            compile_min(48, layout)

    def test_reserved_cell_in_array(self):
        layout = dataclasses.replace(default_min_layout(), addr_scratch=10)
        with pytest.raises(LayoutError):
            compile_min(48, layout)

    def test_does_not_fit(self):
        with pytest.raises(CapacityError):
            compile_min(20, default_min_layout())
