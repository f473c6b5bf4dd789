"""Deterministic random streams for sampling experiments.

Every randomized routine in this package draws from a counter-based
Philox 4x64 generator keyed by a SHA-256 hash of ``(seed, *labels)``.
Substreams are independent by construction, reproducible across runs,
and specified by algorithm rather than by library internals, so a port
to another language can replay the exact same draws.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream_key(seed: int, *labels: int | str) -> int:
    """128-bit Philox key derived from a seed and a label path.

    The path is encoded as the '/'-joined decimal or string form of each
    label, e.g. ``(7, "trial", 3)`` -> ``b"7/trial/3"``.
    """
    text = "/".join(str(seed_or_label) for seed_or_label in (seed, *labels))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


def substream(seed: int, *labels: int | str) -> np.random.Generator:
    """Independent generator for the substream named by (seed, *labels)."""
    return np.random.Generator(np.random.Philox(key=substream_key(seed, *labels)))
