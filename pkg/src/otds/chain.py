"""Block references: the ``aux`` value that pins a contract to one block."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DecodeError
from .group import sha256

GENESIS_PREV = bytes(32)


@dataclass(frozen=True, order=True)
class BlockRef:
    height: int
    block_hash: bytes

    SIZE = 40

    def to_bytes(self) -> bytes:
        return self.height.to_bytes(8, "big") + self.block_hash

    @classmethod
    def from_bytes(cls, data: bytes) -> "BlockRef":
        if len(data) != cls.SIZE:
            raise DecodeError("block ref must be 40 bytes")
        return cls(int.from_bytes(data[:8], "big"), bytes(data[8:]))


def block_hash(prev_hash: bytes, height: int, payload_digest: bytes) -> bytes:
    return sha256(prev_hash, height.to_bytes(8, "big"), payload_digest)
