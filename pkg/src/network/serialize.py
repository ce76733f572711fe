"""JSON text form of networks: per-layer weight matrices, biases and activation tags."""

from __future__ import annotations

import json

from src.errors import StructuralError
from src.models import Activation, Layer, MLPNetwork


def network_to_dict(net: MLPNetwork) -> dict:
    return {
        "input_dim": net.input_dim,
        "output_dim": net.output_dim,
        "layers": [
            {
                "activation": layer.activation.value,
                "weight": layer.weight.tolist(),
                "bias": layer.bias.tolist(),
            }
            for layer in net.layers
        ],
    }


def network_from_dict(data: dict) -> MLPNetwork:
    try:
        layers = tuple(
            Layer(spec["weight"], spec["bias"], Activation(spec["activation"]))
            for spec in data["layers"]
        )
    except (KeyError, TypeError, ValueError) as e:
        raise StructuralError(f"Malformed network description: {e}") from e
    net = MLPNetwork(layers)
    if net.input_dim != data.get("input_dim", net.input_dim) or net.output_dim != data.get(
        "output_dim", net.output_dim
    ):
        raise StructuralError("Declared dimensions do not match the layers")
    return net


def dumps_network(net: MLPNetwork) -> str:
    # json writes floats with repr, which round-trips every double.
    return json.dumps(network_to_dict(net))


def loads_network(text: str) -> MLPNetwork:
    return network_from_dict(json.loads(text))
