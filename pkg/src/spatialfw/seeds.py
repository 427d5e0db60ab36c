"""Stable 64-bit seed derivation for reproducible Monte Carlo scheduling."""

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """One SplitMix64 step: advance the state by the golden gamma and mix."""
    x = (x + _GAMMA) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Derive a work-unit seed from a master seed and integer coordinates.

    The result depends only on the arguments, so any scheduler (serial,
    multiprocess, distributed) hands the same seed to the same work unit.
    """
    state = master_seed & MASK64
    for value in indices:
        state = splitmix64(state ^ (value & MASK64))
    return state
