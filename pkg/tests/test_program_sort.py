"""Tests for the compiled pass-based adjacent sort."""

from collections import Counter

import numpy as np
import pytest

from src.network.relu_builder import evaluate
from src.oracles.reference import oracle_sort
from src.programs.sort import SortProgram, expected_sort_steps


def _make_program(**options) -> SortProgram:
    return SortProgram(**options)


def _array_of(snapshot, layout, n) -> list[float]:
    return list(snapshot[layout.array_base : layout.array_base + n])


class TestController:
    @pytest.mark.parametrize(
        "control, expected",
        [((2, 4, 0), [1, 0, 0]), ((1, 4, 0), [1, 0, 0]), ((4, 4, 0), [0, 1, 0]), ((1, 1, 0), [0, 0, 1])],
    )
    def test_gates_are_one_hot(self, control, expected):
        program = _make_program().program
        out = evaluate(program.controller, control)
        assert out[: program.K].tolist() == expected

    def test_process_addresses_follow_i(self):
        program = _make_program().program
        layout = program.layout
        out = evaluate(program.controller, (3, 5, 0))
        reads = out[program.K : program.K + program.n_r].tolist()
        writes = out[program.K + program.n_r :].tolist()
        pair = [layout.array_base + 2, layout.array_base + 3, layout.addr_i]
        assert reads == pair
        assert writes == pair

    def test_inactive_addresses_vanish_under_small_gate_bound(self):
        program = _make_program(gate_bound=30.0).program
        layout = program.layout
        out = evaluate(program.controller, (30, 30, 0))
        assert out[: program.K].tolist() == [0, 1, 0]
        reads = out[program.K : program.K + program.n_r].tolist()
        writes = out[program.K + program.n_r :].tolist()
        assert reads == [layout.addr_p, layout.addr_zero, layout.addr_zero]
        assert writes == [layout.addr_p, layout.addr_i, layout.addr_scratch]


class TestRun:
    def test_three_elements(self):
        builder = _make_program()
        trace = builder.execute([3, 1, 2], check=True)
        result = builder.extract(trace)
        assert result == [1.0, 2.0, 3.0]
        assert trace.steps == 6
        assert builder.describe_result(result, trace) == "sorted = [1, 2, 3], steps = 6"

    def test_two_elements(self):
        builder = _make_program()
        trace = builder.execute([2, 1], check=True)
        assert builder.extract(trace) == [1.0, 2.0]
        assert trace.steps == 3

    def test_single_element(self):
        builder = _make_program()
        trace = builder.execute([5], check=True)
        assert builder.extract(trace) == [5.0]
        assert trace.steps == 1

    def test_duplicates_and_fractions(self):
        builder = _make_program()
        trace = builder.execute([0.5, -2, 0.5, -0.125, 7], check=True)
        assert builder.extract(trace) == [-2.0, -0.125, 0.5, 0.5, 7.0]

    def test_step_counts(self):
        builder = _make_program()
        for n in (1, 4, 9, 16):
            trace = builder.execute(list(range(n, 0, -1)), check=True)
            assert trace.steps == expected_sort_steps(n)

    def test_schedule_and_snapshots_match_reference(self):
        builder = _make_program()
        layout = builder.program.layout
        array = [4, -1, 7, 3, 3, 0]
        trace = builder.execute(array, check=True, snapshots=True)
        _, reference = oracle_sort(array)
        assert trace.steps == reference.steps
        for record, expected, (i, p) in zip(trace.records, reference.snapshots, reference.schedule):
            assert tuple(_array_of(record.snapshot, layout, len(array))) == expected
            assert (record.snapshot[layout.addr_i], record.snapshot[layout.addr_p]) == (i, p)

    def test_multiset_preserved_every_step(self):
        builder = _make_program()
        layout = builder.program.layout
        array = [5, 1, 5, -4, 2, 0, 1]
        trace = builder.execute(array, check=True, snapshots=True)
        for record in trace.records:
            assert Counter(_array_of(record.snapshot, layout, len(array))) == Counter(array)

    def test_each_pass_fixes_the_suffix(self):
        builder = _make_program()
        layout = builder.program.layout
        array = [6, 2, 9, -1, 4, 4, 0]
        trace = builder.execute(array, check=True, snapshots=True)
        for record in trace.records:
            if record.active_module != 1:
                continue
            values = _array_of(record.snapshot, layout, len(array))
            p = int(record.snapshot[layout.addr_p])
            assert values[p:] == sorted(values[p:])
            assert max(values[:p]) <= min(values[p:])

    def test_random_against_oracle(self):
        builder = _make_program()
        rng = np.random.default_rng(8)
        for _ in range(25):
            array = builder.random_instance(rng)
            trace = builder.execute(array, check=True)
            assert builder.differential(array, trace) == []

    def test_gate_bound_below_memory_size(self):
        # Addresses reach past B = 30; inactive phases must still contribute nothing.
        builder = _make_program(gate_bound=30.0)
        array = [v % 7 for v in range(30, 0, -1)]
        trace = builder.execute(array, max_steps=2000, check=True)
        assert trace.steps == expected_sort_steps(30) == 465
        assert builder.extract(trace) == sorted(float(v) for v in array)

    def test_strict_addresses(self):
        builder = _make_program(strict_addresses=True)
        trace = builder.execute([4, -2, 9, 0], check=True)
        assert builder.extract(trace) == [-2.0, 0.0, 4.0, 9.0]


class TestInputs:
    def test_empty_array(self):
        with pytest.raises(ValueError):
            _make_program().load([])

    def test_too_long(self):
        with pytest.raises(ValueError):
            _make_program().load([0.0] * 33)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            _make_program().load([1.0, float("nan")])
