"""Registry of all compiled programs."""

from __future__ import annotations

from src.programs.astar import AStarProgram
from src.programs.base import BaseProgram
from src.programs.minimum import MinProgram
from src.programs.sort import SortProgram

ALL_PROGRAMS: list[type[BaseProgram]] = [
    MinProgram,
    SortProgram,
    AStarProgram,
]


def program_names() -> list[str]:
    return [cls.NAME for cls in ALL_PROGRAMS]


def get_program(name: str, **options) -> BaseProgram:
    """Instantiate the program registered under name."""
    for cls in ALL_PROGRAMS:
        if cls.NAME == name:
            return cls(**options)
    raise KeyError(f"Unknown program {name!r}; choose from {', '.join(program_names())}")
