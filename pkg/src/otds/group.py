"""Prime-order groups written additively.

Two backends share one interface:

* ``ToyGroup``: quadratic residues modulo p = 2039, order q = 1019,
  generator 4.  Small enough that tests can enumerate it exhaustively.
* ``Secp256k1Group``: the secp256k1 curve (cofactor 1), with point
  arithmetic delegated to :mod:`ecdsa`.

Scalars are plain ``int`` values reduced modulo ``q``.  Elements are
:class:`Element` instances bound to their group; they support ``+``, ``-``
and integer multiplication from either side.
"""

from __future__ import annotations

import hashlib
from typing import Any

from ecdsa import SECP256k1
from ecdsa.ellipticcurve import INFINITY, PointJacobi

from .errors import DecodeError

TOY = 0x01
PRODUCTION = 0x02

BACKEND_NAMES = {TOY: "toy", PRODUCTION: "production"}


def sha256(*parts: bytes) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(part)
    return h.digest()


def tagged_hash(tag: str, data: bytes) -> bytes:
    """SHA-256 over a one-byte length prefix, the tag, then the data."""
    t = tag.encode()
    return sha256(bytes([len(t)]), t, data)


class Element:
    """A member of the order-q subgroup of some :class:`Group`."""

    __slots__ = ("group", "value", "_enc")

    def __init__(self, group: "Group", value: Any):
        self.group = group
        self.value = value
        self._enc = None

    def __add__(self, other: "Element") -> "Element":
        return self.group.add(self, other)

    def __sub__(self, other: "Element") -> "Element":
        return self.group.add(self, self.group.neg(other))

    def __neg__(self) -> "Element":
        return self.group.neg(self)

    def __mul__(self, k: int) -> "Element":
        if not isinstance(k, int):
            return NotImplemented
        return self.group.scalar_mul(k, self)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.group is other.group and self.to_bytes() == other.to_bytes()

    def __hash__(self) -> int:
        return hash(self.to_bytes())

    def to_bytes(self) -> bytes:
        if self._enc is None:
            self._enc = self.group.encode(self)
        return self._enc

    def is_identity(self) -> bool:
        return self == self.group.identity

    def __repr__(self) -> str:
        return f"Element({self.group.name}, {self.to_bytes().hex()})"


class Group:
    """Common interface; subclasses fill in the arithmetic and encodings."""

    name: str
    backend_id: int
    q: int
    element_size: int
    scalar_size: int

    @property
    def generator(self) -> Element:
        raise NotImplementedError

    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def scalar_mul(self, k: int, P: Element) -> Element:
        raise NotImplementedError

    def add(self, P: Element, Q: Element) -> Element:
        raise NotImplementedError

    def neg(self, P: Element) -> Element:
        return self.scalar_mul(self.q - 1, P)

    def encode(self, P: Element) -> bytes:
        raise NotImplementedError

    def decode(self, data: bytes) -> Element:
        raise NotImplementedError

    # -- scalars ---------------------------------------------------------

    def encode_scalar(self, k: int) -> bytes:
        if not 0 <= k < self.q:
            raise ValueError("scalar out of range")
        return k.to_bytes(self.scalar_size, "big")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.scalar_size:
            raise DecodeError(f"scalar must be {self.scalar_size} bytes")
        k = int.from_bytes(data, "big")
        if k >= self.q:
            raise DecodeError("non-canonical scalar")
        return k

    def random_scalar(self, rng) -> int:
        return rng.randrange(self.q)

    def hash_to_scalar(self, tag: str, data: bytes) -> int:
        return int.from_bytes(tagged_hash(tag, data), "big") % self.q

    def params_bytes(self) -> bytes:
        """Canonical encoding of the public parameters (backend, q, G)."""
        return (
            bytes([self.backend_id])
            + self.q.to_bytes(self.scalar_size, "big")
            + self.generator.to_bytes()
        )

    def __repr__(self) -> str:
        return f"<{type(self).__name__} q={self.q}>"


class ToyGroup(Group):
    name = "toy"
    backend_id = TOY
    p = 2039
    q = 1019
    g = 4
    element_size = 2
    scalar_size = 2

    def __init__(self):
        self._gen = Element(self, self.g)
        self._one = Element(self, 1)

    @property
    def generator(self) -> Element:
        return self._gen

    @property
    def identity(self) -> Element:
        return self._one

    def scalar_mul(self, k: int, P: Element) -> Element:
        return Element(self, pow(P.value, k % self.q, self.p))

    def add(self, P: Element, Q: Element) -> Element:
        return Element(self, P.value * Q.value % self.p)

    def neg(self, P: Element) -> Element:
        return Element(self, pow(P.value, -1, self.p))

    def encode(self, P: Element) -> bytes:
        return P.value.to_bytes(2, "big")

    def decode(self, data: bytes) -> Element:
        if len(data) != 2:
            raise DecodeError("toy element must be 2 bytes")
        v = int.from_bytes(data, "big")
        if not 1 <= v < self.p or pow(v, self.q, self.p) != 1:
            raise DecodeError("not a member of the order-q subgroup")
        return Element(self, v)


class Secp256k1Group(Group):
    """secp256k1 with 33-byte compressed points; identity is 33 zero bytes."""

    name = "production"
    backend_id = PRODUCTION
    q = int(SECP256k1.order)
    element_size = 33
    scalar_size = 32

    def __init__(self):
        self.curve = SECP256k1.curve
        self.field_p = int(self.curve.p())
        self._gen = Element(self, SECP256k1.generator)
        self._inf = Element(self, None)

    @property
    def generator(self) -> Element:
        return self._gen

    @property
    def identity(self) -> Element:
        return self._inf

    @staticmethod
    def _wrap_point(group: "Secp256k1Group", pt) -> Element:
        if pt is None or pt is INFINITY:
            return group._inf
        return Element(group, pt)

    def scalar_mul(self, k: int, P: Element) -> Element:
        k %= self.q
        if k == 0 or P.value is None:
            return self._inf
        return self._wrap_point(self, P.value * k)

    def add(self, P: Element, Q: Element) -> Element:
        if P.value is None:
            return Q
        if Q.value is None:
            return P
        return self._wrap_point(self, P.value + Q.value)

    def neg(self, P: Element) -> Element:
        if P.value is None:
            return P
        return Element(self, -P.value)

    def encode(self, P: Element) -> bytes:
        if P.value is None:
            return bytes(33)
        return P.value.to_bytes("compressed")

    def decode(self, data: bytes) -> Element:
        if len(data) != 33:
            raise DecodeError("point must be 33 bytes")
        if data == bytes(33):
            return self._inf
        prefix = data[0]
        if prefix not in (2, 3):
            raise DecodeError("bad point prefix")
        p = self.field_p
        x = int.from_bytes(data[1:], "big")
        if x >= p:
            raise DecodeError("x coordinate out of range")
        rhs = (pow(x, 3, p) + 7) % p
        y = pow(rhs, (p + 1) // 4, p)
        if y * y % p != rhs:
            raise DecodeError("x is not on the curve")
        if y & 1 != prefix & 1:
            y = p - y
        pt = PointJacobi(self.curve, x, y, 1, self.q)
        return Element(self, pt)


_GROUPS: dict[int, Group] = {}


def get_group(backend: int | str) -> Group:
    """Return the (cached) group for a backend id or name."""
    if isinstance(backend, str):
        lookup = {v: k for k, v in BACKEND_NAMES.items()}
        if backend not in lookup:
            raise ValueError(f"unsupported backend {backend!r}")
        backend = lookup[backend]
    if backend not in _GROUPS:
        if backend == TOY:
            _GROUPS[backend] = ToyGroup()
        elif backend == PRODUCTION:
            _GROUPS[backend] = Secp256k1Group()
        else:
            raise ValueError(f"unsupported backend id {backend}")
    return _GROUPS[backend]


# Function-style aliases for callers that prefer them over operators.

def scalar_mul(k: int, P: Element) -> Element:
    return P.group.scalar_mul(k, P)


def element_add(P: Element, Q: Element) -> Element:
    return P.group.add(P, Q)


def random_scalar(group: Group, rng) -> int:
    return group.random_scalar(rng)


def hash_to_scalar(group: Group, tag: str, data: bytes) -> int:
    return group.hash_to_scalar(tag, data)
