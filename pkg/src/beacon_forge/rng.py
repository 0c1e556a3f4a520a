"""Seeded randomness primitives shared by every stochastic component.

A run is reproducible from a single 64-bit master seed. Each consumer of
randomness (honest streams, saboteur TRG stand-ins, adaptive fallback
streams, attack trials, Monte Carlo batches) derives its own key from
(master_seed, purpose tag, role index), so components never share generator
state and independent trials can run in any order.

The stream itself is a ChaCha20 keystream (16-byte zero nonce, keyed per
consumer), chosen so that independent implementations of the same scheme
agree bit for bit. Digits are drawn by fixed-width rejection sampling, which
keeps them exactly uniform for any alphabet size, not just powers of two.
"""

from __future__ import annotations

import hashlib

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

_DOMAIN = b"beacon-forge.v1"
_CHUNK = 4096


def derive_key(master_seed: int, purpose: str, index: int = 0) -> bytes:
    """32-byte stream key bound to (master seed, purpose tag, role index).

    The key is SHA-256 over a fixed-layout message: domain tag, the seed and
    index as 8-byte big-endian integers, then the UTF-8 purpose tag.
    """
    if not 0 <= master_seed < 2**64:
        raise ValueError("master_seed must be an unsigned 64-bit integer")
    if index < 0:
        raise ValueError("index must be non-negative")
    h = hashlib.sha256()
    h.update(_DOMAIN)
    h.update(master_seed.to_bytes(8, "big"))
    h.update(index.to_bytes(8, "big"))
    h.update(purpose.encode("utf-8"))
    return h.digest()


def derive_seed(master_seed: int, purpose: str, index: int = 0) -> int:
    """64-bit sub-seed (for stdlib generators in sampling code)."""
    return int.from_bytes(derive_key(master_seed, purpose, index)[:8], "big")


class DigitStream:
    """Uniform digits over [0, size) drawn from a keyed ChaCha20 keystream.

    Digit i is a deterministic function of (key, i): the stream consumes
    keystream bytes in fixed-width chunks and rejection-samples them, so a
    replica built from the same key reproduces the digit sequence exactly.
    """

    def __init__(self, key: bytes, size: int):
        if len(key) != 32:
            raise ValueError("key must be 32 bytes")
        if size < 2:
            raise ValueError("alphabet size must be at least 2")
        self.size = size
        width = 1
        while 256**width < size:
            width += 1
        self._width = width
        span = 256**width
        self._bound = span - (span % size)
        self._cipher = Cipher(algorithms.ChaCha20(key, bytes(16)), mode=None).encryptor()
        self._buffer = b""
        self._offset = 0

    def _next_bytes(self, count: int) -> bytes:
        out = bytearray()
        while count > 0:
            if self._offset == len(self._buffer):
                self._buffer = self._cipher.update(bytes(_CHUNK))
                self._offset = 0
            take = min(count, len(self._buffer) - self._offset)
            out += self._buffer[self._offset : self._offset + take]
            self._offset += take
            count -= take
        return bytes(out)

    def next_digit(self) -> int:
        while True:
            value = int.from_bytes(self._next_bytes(self._width), "big")
            if value < self._bound:
                return value % self.size

    def digits(self, count: int) -> list[int]:
        return [self.next_digit() for _ in range(count)]
