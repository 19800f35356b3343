"""FNV-1a 64-bit hashing.

Used for the deterministic test embedder's token buckets and for keying
recorded completions by prompt content. Must stay bit-exact: fixture files
checked into the repo depend on these values.
"""
from __future__ import annotations

_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """Hash ``data`` with FNV-1a (64-bit)."""
    h = _FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV64_PRIME) & _MASK64
    return h


def fnv1a64_hex(data: bytes) -> str:
    """Hex form of :func:`fnv1a64`, zero-padded to 16 digits."""
    return f"{fnv1a64(data):016x}"
