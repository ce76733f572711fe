"""Central configuration for the Modular Neural Computer."""

from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Paths
ROOT_DIR = Path(__file__).resolve().parent.parent
INSTANCES_DIR = ROOT_DIR / "instances"
CANONICAL_INSTANCE_PATH = INSTANCES_DIR / "canonical.txt"

# Logging
LOG_LEVEL = os.getenv("MNC_LOG_LEVEL", "INFO")

# Associative memory
DEFAULT_TAU = float(os.getenv("MNC_TAU", "1e-4"))
DEFAULT_ALPHA = float(os.getenv("MNC_ALPHA", "1.0"))

# Execution
DEFAULT_GATE_BOUND = float(os.getenv("MNC_GATE_BOUND", "1e6"))
DEFAULT_MAX_STEPS = int(os.getenv("MNC_MAX_STEPS", "100000"))

# Tolerances
ADDRESS_INTEGRALITY_TOL = 1e-9
GATE_TOL = 1e-9
ATTENTION_SUM_TOL = 1e-12

# Default layouts
MIN_ARRAY_CAPACITY = 32
MIN_MEMORY_SIZE = 48
SORT_ARRAY_CAPACITY = 32
SORT_MEMORY_SIZE = 48

# A* program
ASTAR_LARGE_F = float(os.getenv("MNC_ASTAR_LARGE_F", "1e6"))
ASTAR_READ_HEADS = 9
ASTAR_WRITE_HEADS = 12
ASTAR_MAX_NODES = 16
# Upper bound used when sizing a node region to an instance.
ASTAR_NODE_LIMIT = 1024

# Verification
VERIFY_DEFAULT_COUNT = 100
VERIFY_INT_RANGE = (-100, 100)
# Inactive cores compute a +- 1 on array values, so arrays stay within B - 1 of zero.
VERIFY_FLOAT_RANGE = (-999_999.0, 999_999.0)
# Random doubles are drawn on this dyadic grid so min/max sums stay exact.
VERIFY_FLOAT_GRID = 2.0**-10
