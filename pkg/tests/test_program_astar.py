"""Tests for the compiled A* search."""

import dataclasses

import numpy as np
import pytest

from src.config import CANONICAL_INSTANCE_PATH
from src.errors import (
    CapacityError,
    CompileError,
    InstanceFormatError,
    LayoutError,
    TableConflictError,
    TraceIntegrityError,
)
from src.machine.engine import run
from src.models import GraphInstance, GraphState
from src.oracles.reference import oracle_astar
from src.programs.astar import (
    FLAG_FAILED,
    FLAG_FOUND,
    AStarProgram,
    Phase,
    astar_layout_for,
    canonical_instance,
    compare_with_phase_steps,
    compile_astar,
    compile_phase_steps,
    extract_path,
    load_astar_memory,
    node_records,
    phase_machine,
    random_instance,
    table_sizes,
)
from src.programs.instance_io import format_instance, load_instance, parse_instance


def _make_instance(h, edges, start=0, goal=None) -> GraphInstance:
    """Instance with states named S, A, B, ... and edges given as (src, dst, cost) ids."""
    names = ["S", *(chr(ord("A") + k) for k in range(len(h) - 1))]
    actions = {sid: [] for sid in range(len(h))}
    for src, dst, cost in edges:
        actions[src].append((dst, float(cost)))
    states = tuple(
        GraphState(id=sid, name=names[sid], h=float(h[sid]), actions=tuple(actions[sid])) for sid in range(len(h))
    )
    return GraphInstance(states=states, start=start, goal=len(h) - 1 if goal is None else goal)


@pytest.fixture(scope="module")
def canonical_run():
    builder = AStarProgram()
    instance = canonical_instance()
    trace = builder.execute(instance, check=True, snapshots=True)
    return builder, instance, trace


def _layout_of(canonical_run):
    builder, instance, _ = canonical_run
    return builder.program_for(instance).layout


class TestLayout:
    def test_canonical_layout(self):
        layout = astar_layout_for(canonical_instance())
        assert layout.addr_phase == 64
        assert layout.node_base == 80
        assert layout.max_nodes == 16
        assert layout.memory_size == 240

    def test_memory_too_small(self):
        with pytest.raises(CapacityError):
            astar_layout_for(canonical_instance(), memory_size=100)

    def test_overlapping_control_cells(self):
        layout = dataclasses.replace(astar_layout_for(canonical_instance()), addr_flag=64)
        with pytest.raises(LayoutError):
            layout.validate()

    def test_initial_memory(self):
        instance = canonical_instance()
        layout = astar_layout_for(instance)
        memory = load_astar_memory(instance, layout)
        assert memory[layout.addr_goal] == 6.0
        assert memory[layout.state_addr(4, "h")] == 3.0
        assert memory[layout.state_addr(1, "succ1")] == 4.0
        assert memory[layout.addr_flag] == 1.0
        assert memory[layout.addr_best_f] == 1e6
        assert not memory[layout.node_base :].any()


class TestCanonical:
    def test_path_and_cost(self, canonical_run):
        builder, instance, trace = canonical_run
        path = builder.extract(trace, instance)
        assert path.found
        assert [instance.name_of(s) for s in path.states] == ["S", "B", "D", "G"]
        assert path.cost == 8.0
        assert builder.describe_result(path, trace, instance) == "path = S→B→D→G, cost = 8"

    def test_step_count_and_flag(self, canonical_run):
        _, _, trace = canonical_run
        assert trace.steps == 47
        assert trace.final_memory[_layout_of(canonical_run).addr_flag] == FLAG_FOUND

    def test_node_records(self, canonical_run):
        _, instance, trace = canonical_run
        records = node_records(trace.final_memory, _layout_of(canonical_run))
        assert len(records) == 8
        assert [instance.name_of(r.state) for r in records] == ["S", "A", "B", "C", "D", "D", "E", "G"]
        assert all(r.F == r.G + r.H for r in records)
        # D is generated twice, once through A and once through B.
        assert [(r.parent, r.G) for r in records if instance.name_of(r.state) == "D"] == [(1, 6.0), (2, 5.0)]
        assert [r.index for r in records if r.open == 0] == [0, 1, 2, 5, 7]

    def test_selection_order(self, canonical_run):
        _, _, trace = canonical_run
        layout = _layout_of(canonical_run)
        selected = [
            int(r.snapshot[layout.addr_selected])
            for r in trace.records
            if r.active_module == Phase.FINISH_OPEN_SCAN
        ]
        assert selected == [0, 1, 2, 5, 7]
        assert selected == oracle_astar(canonical_instance()).selection_order

    def test_open_count_matches_records(self, canonical_run):
        _, _, trace = canonical_run
        layout = _layout_of(canonical_run)
        for record in trace.records:
            memory = np.array(record.snapshot)
            open_records = sum(1 for r in node_records(memory, layout) if r.open == 1)
            assert memory[layout.addr_open_count] == open_records

    def test_records_consistent_after_every_step(self, canonical_run):
        _, _, trace = canonical_run
        layout = _layout_of(canonical_run)
        for record in trace.records:
            nodes = node_records(np.array(record.snapshot), layout)
            valid = {r.index for r in nodes}
            for r in nodes:
                assert r.F == r.G + r.H
                if r.index == 0:
                    assert r.parent == -1
                else:
                    assert 0 <= r.parent < r.index
                    assert r.parent in valid

    def test_machine_replays_phase_machine(self, canonical_run):
        _, instance, trace = canonical_run
        steps = phase_machine(instance, _layout_of(canonical_run))
        assert compare_with_phase_steps(trace, steps) == []

    def test_phase_sequence(self, canonical_run):
        _, _, trace = canonical_run
        phases = [r.active_module for r in trace.records]
        assert phases[:6] == [0, 1, 2, 3, 4, 5]
        assert phases[-1] == Phase.GOAL_TEST

    def test_differential(self, canonical_run):
        builder, instance, trace = canonical_run
        assert builder.differential(instance, trace) == []

    def test_table_sizes(self, canonical_run):
        _, instance, _ = canonical_run
        sizes = table_sizes(phase_machine(instance, astar_layout_for(instance)))
        assert sizes["controller"] == 47
        assert sizes["init_root"] == 1
        assert sizes["goal_test"] == 5

    def test_broken_parent_chain(self, canonical_run):
        _, _, trace = canonical_run
        layout = _layout_of(canonical_run)
        memory = trace.final_memory.copy()
        memory[layout.node_addr(7, "parent")] = 7.0
        with pytest.raises(TraceIntegrityError):
            extract_path(memory, layout)


class TestEdgeCases:
    def test_unreachable_goal(self):
        instance = _make_instance(h=[0, 0, 0], edges=[(0, 1, 1)])
        builder = AStarProgram()
        trace = builder.execute(instance, check=True)
        path = builder.extract(trace, instance)
        assert not path.found
        assert path.cost is None
        assert trace.final_memory[builder.program_for(instance).layout.addr_flag] == FLAG_FAILED
        assert builder.describe_result(path, trace, instance) == f"no path (failure state), steps = {trace.steps}"
        assert builder.differential(instance, trace) == []

    def test_start_is_goal(self):
        instance = _make_instance(h=[0, 0], edges=[(0, 1, 3)], goal=0)
        builder = AStarProgram()
        trace = builder.execute(instance, check=True)
        path = builder.extract(trace, instance)
        assert path.found
        assert path.states == (0,)
        assert path.cost == 0.0
        assert trace.steps == 5

    def test_dead_end_state(self):
        instance = _make_instance(h=[1, 0, 0, 0], edges=[(0, 1, 1), (0, 2, 4), (2, 3, 1)])
        builder = AStarProgram()
        trace = builder.execute(instance, check=True)
        assert builder.differential(instance, trace) == []
        assert builder.extract(trace, instance).cost == 5.0

    def test_strict_addresses(self):
        builder = AStarProgram(strict_addresses=True)
        instance = canonical_instance()
        trace = builder.execute(instance, check=True)
        assert builder.extract(trace, instance).cost == 8.0
        assert builder.differential(instance, trace) == []

    def test_fractional_costs_are_not_table_keys(self):
        instance = _make_instance(h=[0, 0, 0], edges=[(0, 1, 0.5), (1, 2, 0.25), (0, 2, 1)])
        with pytest.raises(CompileError):
            compile_astar(instance)

    def test_extra_heads_are_padded(self):
        instance = canonical_instance()
        layout = astar_layout_for(instance)
        program = compile_astar(instance, layout, n_r=11, n_w=14)
        trace = run(program, load_astar_memory(instance, layout), 200, check=True)
        assert trace.steps == 47
        assert extract_path(trace.final_memory, layout).cost == 8.0

    def test_too_few_read_heads(self):
        with pytest.raises(LayoutError):
            compile_astar(canonical_instance(), n_r=8)

    def test_too_few_write_heads(self):
        with pytest.raises(LayoutError):
            compile_astar(canonical_instance(), n_w=11)

    def test_node_region_too_small(self):
        instance = canonical_instance()
        with pytest.raises(CapacityError):
            compile_astar(instance, astar_layout_for(instance, max_nodes=4))

    def test_large_f_above_gate_bound(self):
        with pytest.raises(CompileError):
            compile_astar(canonical_instance(), gate_bound=1e5)

    def test_conflicting_steps_rejected(self):
        instance = canonical_instance()
        layout = astar_layout_for(instance)
        steps = phase_machine(instance, layout)
        first = steps[0]
        altered = tuple(v + 1.0 if k == 0 else v for k, v in enumerate(first.module_outputs))
        tampered = steps + [dataclasses.replace(first, index=len(steps), module_outputs=altered)]
        with pytest.raises(TableConflictError) as exc:
            compile_phase_steps(tampered, layout)
        assert exc.value.steps == (0, len(steps))


class TestInstances:
    def test_canonical_file_matches_builtin(self):
        assert load_instance(CANONICAL_INSTANCE_PATH) == canonical_instance()

    def test_format_then_parse(self):
        instance = canonical_instance()
        assert parse_instance(format_instance(instance)) == instance

    def test_parse_input_accepts_text(self):
        text = "state 0 S 1\nstate 1 G 0\nedge S G 2\nstart S\ngoal G\n"
        instance = AStarProgram().parse_input(text)
        assert instance.state_count == 2
        assert instance.cost(0, 1) == 2.0

    @pytest.mark.parametrize(
        "text",
        [
            "state 0 S 1\nstart S\n",
            "state 0 S 1\nstate 1 G 0\nedge S X 1\nstart S\ngoal G\n",
            "state 0 S 1\nstate 2 G 0\nstart S\ngoal G\n",
            "state 0 S 1\nstate 1 G 0\nedge S G -1\nstart S\ngoal G\n",
            "state 0 S 1\nstate 1 G 0\nedge S G 1\nedge S G 2\nedge S S 1\nstart S\ngoal G\n",
            "node 0 S\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(InstanceFormatError):
            parse_instance(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceFormatError):
            load_instance(tmp_path / "absent.txt")


class TestRandom:
    def test_random_instances_match_oracle(self):
        builder = AStarProgram()
        rng = np.random.default_rng(17)
        for _ in range(12):
            instance = builder.random_instance(rng)
            trace = builder.execute(instance, check=True)
            assert builder.differential(instance, trace) == []

    def test_random_heuristics_are_admissible(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            instance = random_instance(rng, state_count=6)
            for state in instance.states:
                sub = dataclasses.replace(instance, start=state.id)
                best = oracle_astar(sub, max_nodes=1024)
                if best.found:
                    assert state.h <= best.cost
