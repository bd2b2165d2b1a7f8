"""ElGamal over group elements, used to escrow the signer's key for a judge."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DecodeError
from .group import Element, Group


@dataclass(frozen=True)
class JudgeKeys:
    jsk: int
    jpk: Element


@dataclass(frozen=True)
class Ciphertext:
    c1: Element
    c2: Element

    def to_bytes(self) -> bytes:
        return self.c1.to_bytes() + self.c2.to_bytes()

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "Ciphertext":
        n = group.element_size
        if len(data) != 2 * n:
            raise DecodeError("ciphertext has wrong length")
        return cls(group.decode(data[:n]), group.decode(data[n:]))


def eg_keygen(group: Group, rng, jsk: int | None = None) -> JudgeKeys:
    if jsk is None:
        jsk = group.random_scalar(rng)
    return JudgeKeys(jsk, jsk * group.generator)


def eg_encrypt(jpk: Element, M: Element, r: int) -> Ciphertext:
    return Ciphertext(r * jpk.group.generator, M + r * jpk)


def eg_decrypt(jsk: int, ct: Ciphertext) -> Element:
    return ct.c2 - jsk * ct.c1
