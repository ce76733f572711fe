"""External scalar associative memory: interpolated keys, softmax attention, read/write/delete.

The key matrix is the identity, so the score vector of an address is its
interpolated key vector. Softmax uses max-subtraction; at tau = 1e-4 the
off-slot exponent is -1/tau, which underflows to exactly 0.0, so integer
addresses behave as hard slot access.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from src.config import ADDRESS_INTEGRALITY_TOL
from src.errors import AddressingError
from src.models import MemoryConfig, MemoryState


def new_memory(capacity: int) -> MemoryState:
    """All-zero memory of the given capacity."""
    if capacity < 1:
        raise ValueError(f"Memory capacity must be >= 1, got {capacity}")
    return np.zeros(capacity, dtype=np.float64)


def validate_memory(memory: MemoryState, cfg: MemoryConfig) -> None:
    if memory.shape != (cfg.capacity,):
        raise ValueError(f"Memory has shape {memory.shape}, expected ({cfg.capacity},)")
    if not np.all(np.isfinite(memory)):
        raise ValueError("Memory holds non-finite values")


def check_address(q: float, capacity: int, strict: bool = False) -> float:
    """Return q as a float if it is a legal address, raise AddressingError otherwise."""
    q = float(q)
    if not math.isfinite(q):
        raise AddressingError(f"Address {q} is not finite")
    if q < 0 or q > capacity - 1:
        raise AddressingError(f"Address {q} outside [0, {capacity - 1}]")
    if strict and abs(q - round(q)) > ADDRESS_INTEGRALITY_TOL:
        raise AddressingError(f"Address {q!r} is not integral (strict mode)")
    return q


def key_vector(q: float, capacity: int) -> np.ndarray:
    """Linear interpolation between the two keys adjacent to q."""
    q = check_address(q, capacity)
    phi = np.zeros(capacity, dtype=np.float64)
    low = math.floor(q)
    frac = q - low
    if frac == 0.0:
        phi[low] = 1.0
    else:
        phi[low] = (low + 1) - q
        phi[low + 1] = q - low
    return phi


def hard_addressing(tau: float) -> bool:
    """True when off-slot softmax weights underflow to exactly 0."""
    return math.exp(-1.0 / tau) == 0.0


def _hard_slot(q: float, cfg: MemoryConfig) -> int | None:
    """Cell index of an integer address whose attention is exactly one-hot, else None."""
    q = check_address(q, cfg.capacity, cfg.strict_addresses)
    if q.is_integer() and hard_addressing(cfg.tau):
        return int(q)
    return None


def attention(q: float, cfg: MemoryConfig) -> np.ndarray:
    """Temperature-scaled softmax over the key scores of q."""
    q = check_address(q, cfg.capacity, cfg.strict_addresses)
    logits = key_vector(q, cfg.capacity) / cfg.tau
    logits -= logits.max()
    weights = np.exp(logits)
    return weights / weights.sum()


def read(memory: MemoryState, q: float, cfg: MemoryConfig) -> float:
    slot = _hard_slot(q, cfg)
    if slot is not None:
        # Hard access returns the cell itself, signed zeros included.
        return float(memory[slot])
    return float(attention(q, cfg) @ memory)


def write(memory: MemoryState, q: float, value: float, cfg: MemoryConfig) -> MemoryState:
    """Convex update M'(a) = alpha*w(a)*v + (1 - alpha*w(a))*M(a); returns a new state.

    Cells with weight 0 keep their bits and cells with weight 1 take v exactly.
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"Cannot write non-finite value {value}")
    slot = _hard_slot(q, cfg)
    if slot is not None:
        updated = memory.copy()
        a = cfg.alpha
        updated[slot] = value if a == 1.0 else a * value + (1.0 - a) * memory[slot]
        return updated
    scaled = cfg.alpha * attention(q, cfg)
    blended = scaled * value + (1.0 - scaled) * memory
    return np.where(scaled == 0.0, memory, np.where(scaled == 1.0, value, blended))


def soft_delete(memory: MemoryState, q: float, cfg: MemoryConfig) -> MemoryState:
    """Attenuate the attended cells toward 0."""
    slot = _hard_slot(q, cfg)
    if slot is not None:
        updated = memory.copy()
        updated[slot] = (1.0 - cfg.alpha) * memory[slot]
        return updated
    scaled = cfg.alpha * attention(q, cfg)
    return np.where(scaled == 0.0, memory, (1.0 - scaled) * memory)


def read_many(memory: MemoryState, addresses: Iterable[float], cfg: MemoryConfig) -> list[float]:
    return [read(memory, q, cfg) for q in addresses]


def write_many(
    memory: MemoryState,
    addresses: Iterable[float],
    values: Iterable[float],
    cfg: MemoryConfig,
) -> MemoryState:
    """Apply several write heads sequentially in head order."""
    for q, v in zip(addresses, values, strict=True):
        memory = write(memory, q, v, cfg)
    return memory
