"""Tests for the differential suite."""

import threading

from src.programs import astar
from src.programs.astar import AStarProgram
from src.programs.minimum import MinProgram
from src.programs.sort import SortProgram
from src.verify import run_verify


class TestRunVerify:
    def test_min_summary(self):
        summary = run_verify(MinProgram(), seed=5, count=20)
        assert summary["program"] == "min"
        assert summary["total"] == 20
        assert summary["passed"] == 20
        assert summary["failures"] == []

    def test_sort_threaded(self):
        summary = run_verify(SortProgram(), seed=1, count=8, threads=4)
        assert summary["passed"] == summary["total"] == 8

    def test_astar_compiles_before_workers_start(self, monkeypatch):
        compiled_on = []
        real_compile = astar.compile_astar

        def recording_compile(*args, **kwargs):
            compiled_on.append(threading.current_thread() is threading.main_thread())
            return real_compile(*args, **kwargs)

        monkeypatch.setattr(astar, "compile_astar", recording_compile)
        builder = AStarProgram()
        summary = run_verify(builder, seed=2, count=6, threads=3)
        assert summary["passed"] == summary["total"] == 7
        assert compiled_on and all(compiled_on)
        assert len(builder._compiled) == len(compiled_on)

    def test_same_seed_same_instances(self):
        first = run_verify(MinProgram(), seed=9, count=5)
        second = run_verify(MinProgram(), seed=9, count=5)
        assert first == second
