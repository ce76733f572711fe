"""Controllers for phase-structured programs built from integer indicators.

The controller reads a control vector c, computes one-hot phase gates with
indicator networks, and emits addresses as the sum over phases of
gate-wrapped affine maps of c. All address logic lives inside the network.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.models import MLPNetwork
from src.network.relu_builder import (
    build_affine,
    build_gate_wrap,
    compose,
    identity,
    stack_parallel,
    sum_parallel,
)


class AddressMap:
    """Affine map from the control vector to (read addresses, write addresses) for one phase."""

    def __init__(self, n_c: int, reads: Sequence, writes: Sequence):
        rows = [*reads, *writes]
        self.weight = np.zeros((len(rows), n_c))
        self.bias = np.zeros(len(rows))
        for r, row in enumerate(rows):
            if isinstance(row, tuple):
                const, coeffs = row
                self.bias[r] = const
                for idx, coef in coeffs.items():
                    self.weight[r, idx] = coef
            else:
                self.bias[r] = row

    def network(self) -> MLPNetwork:
        return build_affine(self.weight, self.bias)

    def output_bound(self, control_bound: float) -> float:
        """Largest |address| this map can emit when every control value lies within control_bound."""
        rows = np.abs(self.bias) + np.abs(self.weight).sum(axis=1) * control_bound
        return max(1.0, float(rows.max(initial=0.0)))


def inhibition_bound(gate_bound: float, capacity: int) -> float:
    """Bound used to gate-wrap phase cores and address maps.

    Control cells hold loaded indices (at most S) or written values (at most
    B), and index arithmetic adds one, so an inactive core never sees more
    than max(B, S + 1) even when B is smaller than the memory.
    """
    return max(float(gate_bound), float(capacity) + 1.0)


def build_phase_controller(
    gates: Sequence[MLPNetwork],
    addresses: Sequence[AddressMap],
    n_c: int,
    control_bound: float,
) -> MLPNetwork:
    """c -> (g_1..g_K, r_1..r_nr, w_1..w_nw).

    Each address map is gate-wrapped with its own bound, derived from
    control_bound, so an inactive phase contributes exactly 0 to every
    address however small the program's value bound is.
    """
    K = len(gates)
    front = stack_parallel([*gates, identity(n_c)])
    width = K + n_c
    control = tuple(range(K, width))
    wrapped = [build_gate_wrap(a.network(), a.output_bound(control_bound)) for a in addresses]
    routed = sum_parallel(wrapped, selections=[(k, *control) for k in range(K)], input_dim=width)
    back = stack_parallel(
        [identity(K), routed],
        selections=[tuple(range(K)), tuple(range(width))],
        input_dim=width,
    )
    return compose(front, back)
