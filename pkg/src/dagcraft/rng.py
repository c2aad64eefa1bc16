"""Deterministic random-number plumbing.

All stochastic code in the package draws from counter-based Philox
generators seeded either directly or through ``derive_substream``, which
hashes (master_seed, label) into a fresh 64-bit seed. Distinct labels
give independent streams, so replicates and per-pair tests can run in
any order (or in parallel) and still reproduce bit-identically.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_substream(master_seed: int, label: str) -> int:
    """Stable 64-bit child seed for (master_seed, label).

    Uses BLAKE2b over the seed's 8-byte little-endian encoding plus the
    UTF-8 label, so the mapping is identical across platforms and runs.
    """
    if not label:
        raise ValueError("label must be non-empty")
    h = hashlib.blake2b(digest_size=8)
    h.update(int(master_seed).to_bytes(8, "little", signed=False))
    h.update(label.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
