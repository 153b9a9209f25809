"""Deterministic seed derivation: seed_i = hash(master, keys...)."""

import zlib

import numpy as np


def _as_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFF
    return zlib.crc32(str(key).encode("utf-8"))


def derive_seed(master: int, *keys) -> int:
    """
    Derive a child seed from a master seed and any number of keys.

    Keys may be ints or strings (strings are hashed with CRC32 so the result
    does not depend on Python's randomized `hash`).
    """
    seq = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(_as_int(k) for k in keys))
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def make_rng(master: int, *keys) -> np.random.Generator:
    """Generator seeded from `derive_seed(master, *keys)`."""
    return np.random.default_rng(derive_seed(master, *keys))
