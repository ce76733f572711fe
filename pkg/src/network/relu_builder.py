"""Exact ReLU MLP constructions with explicit weights.

Every builder returns a network in standard form: all hidden layers ReLU,
the last layer linear (identity activation). Wherever a linear value has to
cross a ReLU layer it is split into relu(z) and relu(-z) and recombined by
the next layer's weights, so no weight matrices are ever multiplied
together and integer-valued computations stay exact.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from src.errors import CompileError, StructuralError, TableConflictError
from src.models import Activation, Layer, MLPNetwork, TableEntry

logger = logging.getLogger(__name__)


def evaluate(net: MLPNetwork, x) -> np.ndarray:
    """Feedforward pass: act(W @ h + b) for each layer in order."""
    h = np.asarray(x, dtype=np.float64).reshape(-1)
    if h.shape[0] != net.input_dim:
        raise StructuralError(f"Network expects {net.input_dim} inputs, got {h.shape[0]}")
    for layer in net.layers:
        h = layer.weight @ h + layer.bias
        if layer.activation == Activation.RELU:
            h = np.maximum(h, 0.0)
    return h


# ── Primitive maps ──────────────────────────────────────────


def build_affine(weight, bias) -> MLPNetwork:
    """x -> W x + b as a single linear layer."""
    weight = np.array(weight, dtype=np.float64, ndmin=2)
    bias = np.array(bias, dtype=np.float64).reshape(-1)
    return MLPNetwork((Layer(weight, bias, Activation.IDENTITY),))


def identity(n: int) -> MLPNetwork:
    return build_affine(np.eye(n), np.zeros(n))


def constant(values: Sequence[float], input_dim: int) -> MLPNetwork:
    """Ignores its input and returns fixed values (zero weights)."""
    values = np.asarray(values, dtype=np.float64)
    return build_affine(np.zeros((values.shape[0], input_dim)), values)


def build_min2() -> MLPNetwork:
    """min(x1, x2) = (x1 + x2 - |x1 - x2|) / 2 with |z| = relu(z) + relu(-z)."""
    return _pair_network(sign=-1.0)


def build_max2() -> MLPNetwork:
    """max(x1, x2) = (x1 + x2 + |x1 - x2|) / 2."""
    return _pair_network(sign=1.0)


def _pair_network(sign: float) -> MLPNetwork:
    hidden = Layer(
        [[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]],
        np.zeros(4),
        Activation.RELU,
    )
    out = Layer([[0.5, -0.5, 0.5 * sign, 0.5 * sign]], [0.0], Activation.IDENTITY)
    return MLPNetwork((hidden, out))


def build_min_n(n: int) -> MLPNetwork:
    """Minimum of n inputs by chaining min2."""
    if n < 1:
        raise ValueError("min over zero inputs")
    if n == 1:
        return identity(1)
    if n == 2:
        return build_min2()
    head = stack_parallel(
        [build_min2(), identity(n - 2)],
        selections=[(0, 1), tuple(range(2, n))],
        input_dim=n,
    )
    return compose(head, build_min_n(n - 1))


def build_indicator_ge(a: int) -> MLPNetwork:
    """relu(x - a + 1) - relu(x - a): 1 for integer x >= a, 0 for integer x <= a - 1."""
    hidden = Layer([[1.0], [1.0]], [1.0 - a, -float(a)], Activation.RELU)
    out = Layer([[1.0, -1.0]], [0.0], Activation.IDENTITY)
    return MLPNetwork((hidden, out))


def build_equals(a: int) -> MLPNetwork:
    """indicator_ge(a) - indicator_ge(a + 1), i.e. 1 iff integer x == a."""
    hidden = Layer([[1.0], [1.0], [1.0]], [1.0 - a, -float(a), -1.0 - a], Activation.RELU)
    out = Layer([[1.0, -2.0, 1.0]], [0.0], Activation.IDENTITY)
    return MLPNetwork((hidden, out))


def build_and(
    nets: Sequence[MLPNetwork],
    selections: Sequence[Sequence[int]] | None = None,
    input_dim: int | None = None,
) -> MLPNetwork:
    """Conjunction of 0/1 indicator networks: binary AND is min."""
    stacked = stack_parallel(nets, selections, input_dim)
    return compose(stacked, build_min_n(len(nets)))


def on_linear(weights: Sequence[float], bias: float, net: MLPNetwork) -> MLPNetwork:
    """Apply a scalar network to the linear combination w . x + bias."""
    return compose(build_affine([list(weights)], [bias]), net)


# ── Gating ──────────────────────────────────────────────────


def build_gate_wrap(core: MLPNetwork, bound: float) -> MLPNetwork:
    """Wrap core f: x -> y into (g, x) -> y_i = relu(f_i - t) - relu(-f_i - t), t = relu(B - B g).

    With g = 1, t = 0 and the output is f exactly. With g = 0, t = B and every
    output with |f_i| <= B is exactly 0. t gets its own unit so that f is never
    accumulated together with B.
    """
    if not bound > 0:
        raise ValueError(f"Gate bound must be positive, got {bound}")
    core = to_relu_form(core)
    n, m = core.input_dim, core.output_dim

    entry_w = np.zeros((2 * n + 1, 1 + n))
    entry_w[:n, 1:] = np.eye(n)
    entry_w[n : 2 * n, 1:] = -np.eye(n)
    entry_w[2 * n, 0] = -bound
    entry_b = np.zeros(2 * n + 1)
    entry_b[2 * n] = bound
    layers = [Layer(entry_w, entry_b, Activation.RELU)]

    last = len(core.layers) - 1
    for k, layer in enumerate(core.layers):
        w, b = layer.weight, layer.bias
        if k == 0:
            w = np.hstack([w, -w])
        rows, cols = w.shape
        if k < last:
            aug = np.zeros((rows + 1, cols + 1))
            aug[:rows, :cols] = w
            aug[rows, cols] = 1.0
            layers.append(Layer(aug, np.append(b, 0.0), Activation.RELU))
        else:
            gate = np.zeros((2 * m, cols + 1))
            gate[:m, :cols] = w
            gate[m:, :cols] = -w
            gate[:, cols] = -1.0
            layers.append(Layer(gate, np.concatenate([b, -b]), Activation.RELU))

    layers.append(Layer(np.hstack([np.eye(m), -np.eye(m)]), np.zeros(m), Activation.IDENTITY))
    return MLPNetwork(tuple(layers))


# ── Table lookup ────────────────────────────────────────────


def build_table(
    entries: Sequence[TableEntry],
    key_width: int,
    value_width: int,
) -> MLPNetwork:
    """One bump unit per entry: b_j = relu(1 - sum_i |x_i - key_ji|), out = sum_j b_j value_j.

    Exact on every listed key, zero on integer tuples at L1 distance >= 1 from
    all keys. Duplicate identical entries collapse; a key with two different
    values is a TableConflictError.
    """
    table = _dedupe_entries(entries, key_width, value_width)
    if not table:
        raise CompileError("A table network needs at least one entry")

    keys = np.array(list(table.keys()), dtype=np.float64).reshape(len(table), key_width)
    values = np.array(list(table.values()), dtype=np.float64).reshape(len(table), value_width)
    count = len(table)

    # Hidden 1: for entry j and coordinate i, units (x_i - k_ji) and (k_ji - x_i).
    eye = np.eye(key_width)
    dist_w = np.tile(np.vstack([eye, -eye]), (count, 1))
    dist_b = np.concatenate([np.concatenate([-k, k]) for k in keys])

    # Hidden 2: bump_j = relu(1 - sum of its 2k distance units).
    bump_w = np.kron(np.eye(count), -np.ones((1, 2 * key_width)))
    bump_b = np.ones(count)

    net = MLPNetwork(
        (
            Layer(dist_w, dist_b, Activation.RELU),
            Layer(bump_w, bump_b, Activation.RELU),
            Layer(values.T, np.zeros(value_width), Activation.IDENTITY),
        )
    )
    logger.debug(f"Compiled table: {count} entries, key width {key_width}, value width {value_width}")
    return net


def _dedupe_entries(
    entries: Sequence[TableEntry],
    key_width: int,
    value_width: int,
) -> dict[tuple[int, ...], tuple[float, ...]]:
    table: dict[tuple[int, ...], tuple[float, ...]] = {}
    for entry in entries:
        if len(entry.key) != key_width:
            raise CompileError(f"Key {entry.key} has width {len(entry.key)}, expected {key_width}")
        if len(entry.value) != value_width:
            raise CompileError(f"Value {entry.value} has width {len(entry.value)}, expected {value_width}")
        key = tuple(_as_integer_key(k) for k in entry.key)
        value = tuple(float(v) for v in entry.value)
        if not all(np.isfinite(value)):
            raise CompileError(f"Value {value} for key {key} is not finite")
        previous = table.get(key)
        if previous is None:
            table[key] = value
        elif previous != value:
            raise TableConflictError(f"Key {key} maps to both {previous} and {value}")
    return table


def _as_integer_key(k) -> int:
    k = float(k)
    if not (np.isfinite(k) and k.is_integer()):
        raise CompileError(f"Table key component {k!r} is not an integer")
    return int(k)


# ── Structural combinators ──────────────────────────────────


def compose(first: MLPNetwork, second: MLPNetwork) -> MLPNetwork:
    """Network computing second(first(x))."""
    if first.output_dim != second.input_dim:
        raise StructuralError(
            f"Cannot compose: first emits {first.output_dim} values, second takes {second.input_dim}"
        )
    first = to_relu_form(first)
    second = to_relu_form(second)
    layers = [
        *first.layers[:-1],
        _split_layer(first.layers[-1]),
        _lift_layer(second.layers[0]),
        *second.layers[1:],
    ]
    return MLPNetwork(tuple(layers))


def stack_parallel(
    nets: Sequence[MLPNetwork],
    selections: Sequence[Sequence[int]] | None = None,
    input_dim: int | None = None,
) -> MLPNetwork:
    """Evaluate several networks side by side on one input; outputs concatenate.

    Without selections every net reads the whole shared input. With
    selections, net j reads input positions selections[j] in order.
    """
    if not nets:
        raise StructuralError("Nothing to stack")
    if selections is None:
        width = nets[0].input_dim
        for net in nets:
            if net.input_dim != width:
                raise StructuralError(
                    f"Stacked networks disagree on input width: {net.input_dim} vs {width}"
                )
        selections = [tuple(range(width))] * len(nets)
        input_dim = width if input_dim is None else input_dim
    else:
        if len(selections) != len(nets):
            raise StructuralError("One input selection per network is required")
        for net, sel in zip(nets, selections):
            if len(sel) != net.input_dim:
                raise StructuralError(f"Selection {tuple(sel)} does not match input width {net.input_dim}")
        needed = 1 + max((max(sel) for sel in selections if len(sel)), default=-1)
        input_dim = needed if input_dim is None else input_dim
        if needed > input_dim:
            raise StructuralError(f"Selections reach position {needed - 1} but input width is {input_dim}")

    standard = [to_relu_form(net) for net in nets]
    depth = max(net.depth for net in standard)
    padded = [_pad_to_depth(net, depth) for net in standard]

    layers = []
    for d in range(depth):
        parts = [net.layers[d] for net in padded]
        activation = parts[0].activation
        if any(p.activation != activation for p in parts):
            raise StructuralError(f"Activation mismatch at depth {d} while stacking")
        bias = np.concatenate([p.bias for p in parts])
        if d == 0:
            weight = np.zeros((bias.shape[0], input_dim))
            row = 0
            for part, sel in zip(parts, selections):
                rows = slice(row, row + part.output_dim)
                for col, src in enumerate(sel):
                    weight[rows, src] += part.weight[:, col]
                row += part.output_dim
        else:
            weight = _block_diag([p.weight for p in parts])
        layers.append(Layer(weight, bias, activation))
    return MLPNetwork(tuple(layers))


def sum_parallel(
    nets: Sequence[MLPNetwork],
    selections: Sequence[Sequence[int]] | None = None,
    input_dim: int | None = None,
) -> MLPNetwork:
    """Like stack_parallel, but the equally sized outputs are added instead of concatenated."""
    width = nets[0].output_dim
    if any(net.output_dim != width for net in nets):
        raise StructuralError("Summed networks must share an output width")
    stacked = stack_parallel(nets, selections, input_dim)
    adder = np.hstack([np.eye(width)] * len(nets))
    return map_outputs(stacked, adder)


def map_outputs(net: MLPNetwork, matrix, offset=None) -> MLPNetwork:
    """Fold a linear read-out y -> A y + c into the network's last (linear) layer."""
    net = to_relu_form(net)
    matrix = np.array(matrix, dtype=np.float64, ndmin=2)
    if matrix.shape[1] != net.output_dim:
        raise StructuralError(f"Read-out takes {matrix.shape[1]} values, network emits {net.output_dim}")
    last = net.layers[-1]
    bias = matrix @ last.bias
    if offset is not None:
        bias = bias + np.asarray(offset, dtype=np.float64)
    folded = Layer(matrix @ last.weight, bias, Activation.IDENTITY)
    return MLPNetwork((*net.layers[:-1], folded))


def to_relu_form(net: MLPNetwork) -> MLPNetwork:
    """Standard form: ReLU hidden layers, linear read-out.

    Linear hidden layers are split into relu(z), relu(-z) and the following
    layer takes [W, -W]; a ReLU last layer gets an identity read-out.
    """
    layers = list(net.layers)
    if layers[-1].activation == Activation.RELU:
        n = layers[-1].output_dim
        layers.append(Layer(np.eye(n), np.zeros(n), Activation.IDENTITY))
    if all(layer.activation == Activation.RELU for layer in layers[:-1]):
        return net if len(layers) == net.depth else MLPNetwork(tuple(layers))

    out = []
    lift = False
    last = len(layers) - 1
    for k, layer in enumerate(layers):
        if lift:
            layer = _lift_layer(layer)
        if k < last and layer.activation == Activation.IDENTITY:
            out.append(_split_layer(layer))
            lift = True
        else:
            out.append(layer)
            lift = False
    return MLPNetwork(tuple(out))


def _split_layer(layer: Layer) -> Layer:
    return Layer(
        np.vstack([layer.weight, -layer.weight]),
        np.concatenate([layer.bias, -layer.bias]),
        Activation.RELU,
    )


def _lift_layer(layer: Layer) -> Layer:
    return Layer(np.hstack([layer.weight, -layer.weight]), layer.bias, layer.activation)


def _pad_to_depth(net: MLPNetwork, depth: int) -> MLPNetwork:
    """Prepend ReLU pass-through layers (split, then identities) until net has the given depth."""
    missing = depth - net.depth
    if missing <= 0:
        return net
    n = net.input_dim
    layers = [Layer(np.vstack([np.eye(n), -np.eye(n)]), np.zeros(2 * n), Activation.RELU)]
    layers += [Layer(np.eye(2 * n), np.zeros(2 * n), Activation.RELU) for _ in range(missing - 1)]
    layers.append(_lift_layer(net.layers[0]))
    layers.extend(net.layers[1:])
    return MLPNetwork(tuple(layers))


def _block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols))
    r = c = 0
    for block in blocks:
        out[r : r + block.shape[0], c : c + block.shape[1]] = block
        r += block.shape[0]
        c += block.shape[1]
    return out


# ── Introspection ───────────────────────────────────────────


def network_stats(net: MLPNetwork) -> dict:
    """Layer shapes, hidden unit count and parameter count."""
    return {
        "input_dim": net.input_dim,
        "output_dim": net.output_dim,
        "layers": [
            {"shape": [layer.output_dim, layer.input_dim], "activation": layer.activation.value}
            for layer in net.layers
        ],
        "hidden_units": sum(layer.output_dim for layer in net.layers[:-1]),
        "parameters": sum(layer.weight.size + layer.bias.size for layer in net.layers),
    }
