"""Stable, process-independent integer hashing for seed derivation."""

from __future__ import annotations

import hashlib


def stable_hash(*parts: object) -> int:
    """Hash ``parts`` to a non-negative 63-bit integer.

    Unlike the builtin ``hash`` this does not depend on PYTHONHASHSEED, so
    derived seeds are identical across processes and runs.
    """
    text = "\x1f".join(repr(p) for p in parts)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1
