"""Deterministic seeding helpers.

Root selection and fold seeding use SplitMix64 (Steele, Lea & Flood 2014;
the generator behind Java's SplittableRandom): a 64-bit state advanced by a
fixed odd constant and finalized with two xor-shift multiplies.  It is tiny,
has no hidden state, and gives bit-identical streams on every platform, which
the reproducibility contract of this package depends on.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state; returns ``(output, next_state)``."""
    state = (state + _GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


def mix64(seed: int, salt: int) -> int:
    """Derive a sub-seed from ``seed`` and an integer ``salt``."""
    out, _ = splitmix64((seed ^ ((salt * _GAMMA) & _MASK64)) & _MASK64)
    return out


def draw_index(seed: int, n: int) -> int:
    """Draw an index in ``[0, n)`` from a single SplitMix64 output."""
    if n <= 0:
        raise ValueError("cannot draw from an empty range")
    out, _ = splitmix64(seed & _MASK64)
    return out % n


def instance_seed(base_seed: int, values) -> int:
    """Per-instance sub-seed from the base seed and the instance content.

    Hashing the feature values (FNV-1a over the raw bytes) instead of the
    instance's position makes the result independent of processing order and
    identical for duplicated rows, so classification can be parallelized or
    re-ordered without changing any output.
    """
    h = _FNV_OFFSET
    for v in bytes(bytearray(values)):
        h = ((h ^ v) * _FNV_PRIME) & _MASK64
    return mix64(base_seed, h)
