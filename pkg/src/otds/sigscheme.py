"""Schnorr signatures over a :class:`~otds.group.Group`.

Signatures are stored as ``(c, s)``; verification recomputes the nonce
commitment as ``s*G - c*pk`` and re-derives the challenge.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DecodeError
from .group import Element, Group

SIG_TAG = "OTDS/v1/sig"


@dataclass(frozen=True)
class SigKeypair:
    sk: int
    pk: Element


@dataclass(frozen=True)
class SchnorrSignature:
    c: int
    s: int

    def to_bytes(self, group: Group) -> bytes:
        return group.encode_scalar(self.c) + group.encode_scalar(self.s)

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "SchnorrSignature":
        n = group.scalar_size
        if len(data) != 2 * n:
            raise DecodeError("signature has wrong length")
        return cls(group.decode_scalar(data[:n]), group.decode_scalar(data[n:]))


def sig_keygen(group: Group, rng, sk: int | None = None) -> SigKeypair:
    if sk is None:
        sk = group.random_scalar(rng)
    return SigKeypair(sk, sk * group.generator)


def _challenge(pk: Element, R: Element, msg: bytes) -> int:
    return pk.group.hash_to_scalar(SIG_TAG, pk.to_bytes() + R.to_bytes() + msg)


def schnorr_response(q: int, nonce: int, c: int, sk: int) -> int:
    return (nonce + c * sk) % q


def sig_sign(group: Group, sk: int, msg: bytes, rng, nonce: int | None = None) -> SchnorrSignature:
    pk = sk * group.generator
    if nonce is None:
        nonce = group.random_scalar(rng)
    R = nonce * group.generator
    c = _challenge(pk, R, msg)
    return SchnorrSignature(c, schnorr_response(group.q, nonce, c, sk))


def sig_verify(pk: Element, msg: bytes, sig: SchnorrSignature) -> bool:
    """Return whether ``sig`` is valid on ``msg`` under ``pk``; never raises."""
    try:
        group = pk.group
        if not (0 <= sig.c < group.q and 0 <= sig.s < group.q):
            return False
        R = sig.s * group.generator - sig.c * pk
        return _challenge(pk, R, msg) == sig.c
    except (AttributeError, TypeError, ValueError):
        return False
