"""Contract data and the pure state-transition function run by the ledger.

Three variants exist:

``Basic``
    fixes a one-time public key ``Y``; a trigger proves knowledge of its
    discrete log.
``Designated``
    fixes the user's discrete-log key and a list of delegate keys; a
    trigger proves knowledge of the secret for any one of them.
``Accountable``
    as ``Designated``, plus the trigger carries an ElGamal encryption of
    the signer's key under the judge's key and proves it is consistent.

Branch order for the OR statements is always ``[upk_dl, *delegate_keys]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .chain import BlockRef
from .encryption import Ciphertext
from .errors import ContractConsumed, DecodeError, FlavorMismatch, InvalidProof
from .group import Element, Group, tagged_hash
from .nizk import (
    DlogProof,
    DlogStatement,
    OrEncProof,
    OrEncStatement,
    OrProof,
    OrStatement,
    verify_dlog,
    verify_or,
    verify_or_enc,
)
from .sigscheme import SchnorrSignature, sig_verify

CONTRACT_ID_TAG = "OTDS/v1/contract-id"
TRIGGER_BIND_TAG = "OTDS/v1/trigger"

BASIC, DESIGNATED, ACCOUNTABLE = 1, 2, 3
VARIANT_NAMES = {BASIC: "basic", DESIGNATED: "designated", ACCOUNTABLE: "accountable"}


@dataclass(frozen=True)
class Basic:
    Y: Element

    kind = BASIC

    def to_bytes(self) -> bytes:
        return bytes([BASIC]) + self.Y.to_bytes()


@dataclass(frozen=True)
class Designated:
    upk_dl: Element
    delegate_keys: tuple[Element, ...]

    kind = DESIGNATED

    def __post_init__(self):
        object.__setattr__(self, "delegate_keys", tuple(self.delegate_keys))
        if not self.delegate_keys:
            raise ValueError("at least one delegate key is required")

    @property
    def branches(self) -> tuple[Element, ...]:
        return (self.upk_dl, *self.delegate_keys)

    def to_bytes(self) -> bytes:
        return (
            bytes([self.kind])
            + self.upk_dl.to_bytes()
            + len(self.delegate_keys).to_bytes(2, "big")
            + b"".join(k.to_bytes() for k in self.delegate_keys)
        )


@dataclass(frozen=True)
class Accountable(Designated):
    jpk: Element = field(kw_only=True)

    kind = ACCOUNTABLE

    def to_bytes(self) -> bytes:
        return super().to_bytes() + self.jpk.to_bytes()


Variant = Union[Basic, Designated, Accountable]
Proof = Union[DlogProof, OrProof, OrEncProof]


def decode_variant(group: Group, data: bytes) -> tuple[Variant, bytes]:
    """Decode a variant payload from the front of ``data``; return the rest."""
    if not data:
        raise DecodeError("empty variant payload")
    kind, rest = data[0], data[1:]
    e = group.element_size
    if kind == BASIC:
        return Basic(group.decode(rest[:e])), rest[e:]
    if kind not in (DESIGNATED, ACCOUNTABLE):
        raise DecodeError(f"unknown variant {kind}")
    upk_dl = group.decode(rest[:e])
    k = int.from_bytes(rest[e : e + 2], "big")
    if k == 0:
        raise DecodeError("variant has no delegate keys")
    pos = e + 2
    keys = tuple(group.decode(rest[pos + i * e : pos + (i + 1) * e]) for i in range(k))
    pos += k * e
    if kind == DESIGNATED:
        return Designated(upk_dl, keys), rest[pos:]
    return Accountable(upk_dl, keys, jpk=group.decode(rest[pos : pos + e])), rest[pos + e :]


def signed_payload(variant: Variant, n: int, aux: BlockRef) -> bytes:
    """The exact bytes the user's signature ``tau`` covers."""
    return variant.to_bytes() + n.to_bytes(4, "big") + aux.to_bytes()


@dataclass(frozen=True)
class ContractSpec:
    variant: Variant
    n: int
    tau: SchnorrSignature
    upk_sig: Element
    aux: BlockRef

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def group(self) -> Group:
        return self.upk_sig.group

    def to_bytes(self) -> bytes:
        return (
            signed_payload(self.variant, self.n, self.aux)
            + self.upk_sig.to_bytes()
            + self.tau.to_bytes(self.group)
        )

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "ContractSpec":
        variant, rest = decode_variant(group, data)
        e, s = group.element_size, group.scalar_size
        if len(rest) != 4 + BlockRef.SIZE + e + 2 * s:
            raise DecodeError("contract payload has wrong length")
        n = int.from_bytes(rest[:4], "big")
        aux = BlockRef.from_bytes(rest[4 : 4 + BlockRef.SIZE])
        rest = rest[4 + BlockRef.SIZE :]
        upk_sig = group.decode(rest[:e])
        tau = SchnorrSignature.from_bytes(group, rest[e:])
        if n < 1:
            raise DecodeError("n must be positive")
        return cls(variant, n, tau, upk_sig, aux)

    @property
    def contract_id(self) -> bytes:
        return tagged_hash(CONTRACT_ID_TAG, self.aux.to_bytes() + self.to_bytes())


@dataclass(frozen=True)
class ContractState:
    """Accepted hashes (and, for accountable contracts, ciphertexts)."""

    entries: tuple[bytes, ...] = ()
    ciphertexts: tuple[Ciphertext, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Trigger:
    proof: Proof
    h: bytes
    ct: Ciphertext | None = None

    _FLAVORS = {DlogProof: BASIC, OrProof: DESIGNATED, OrEncProof: ACCOUNTABLE}

    @property
    def flavor(self) -> int:
        return self._FLAVORS[type(self.proof)]

    def to_bytes(self) -> bytes:
        ct = self.ct.to_bytes() if self.ct is not None else b""
        return bytes([self.flavor]) + self.h + ct + self.proof.to_bytes()

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "Trigger":
        if len(data) < 33:
            raise DecodeError("trigger too short")
        flavor, h, rest = data[0], bytes(data[1:33]), data[33:]
        if flavor == BASIC:
            return cls(DlogProof.from_bytes(group, rest), h)
        if flavor == DESIGNATED:
            return cls(OrProof.from_bytes(group, rest), h)
        if flavor == ACCOUNTABLE:
            n = 2 * group.element_size
            return cls(OrEncProof.from_bytes(group, rest[n:]), h, Ciphertext.from_bytes(group, rest[:n]))
        raise DecodeError(f"unknown trigger flavor {flavor}")


def bind_message(contract_id: bytes, h: bytes) -> bytes:
    """Bound message for a trigger proof: the hash tied to one contract."""
    return tagged_hash(TRIGGER_BIND_TAG, contract_id + h)


def variant_group(v: Variant) -> Group:
    return v.Y.group if isinstance(v, Basic) else v.upk_dl.group


def statement_for(v: Variant, ct: Ciphertext | None = None):
    """The proof statement a trigger for this variant must satisfy."""
    G = variant_group(v).generator
    if isinstance(v, Basic):
        return DlogStatement(G, v.Y)
    if isinstance(v, Accountable):
        if ct is None:
            raise FlavorMismatch("accountable contract requires a ciphertext")
        return OrEncStatement(G, v.branches, v.jpk, ct)
    return OrStatement(G, v.branches)


def check_contract_signature(spec: ContractSpec) -> bool:
    return sig_verify(spec.upk_sig, signed_payload(spec.variant, spec.n, spec.aux), spec.tau)


def evaluate(spec: ContractSpec, state: ContractState, trig: Trigger) -> ContractState:
    """Apply one trigger; return the new state or raise without side effects."""
    if len(state) >= spec.n:
        raise ContractConsumed("contract consumed")
    kind = spec.variant.kind
    if not isinstance(trig.proof, (DlogProof, OrProof, OrEncProof)) or trig.flavor != kind:
        raise FlavorMismatch("trigger proof does not match contract variant")
    if (trig.ct is not None) != (kind == ACCOUNTABLE):
        raise FlavorMismatch("ciphertext presence does not match contract variant")
    if not isinstance(trig.h, bytes) or len(trig.h) != 32:
        raise InvalidProof("trigger hash must be 32 bytes")

    bound = bind_message(spec.contract_id, trig.h)
    stmt = statement_for(spec.variant, trig.ct)
    verifier = {BASIC: verify_dlog, DESIGNATED: verify_or, ACCOUNTABLE: verify_or_enc}[kind]
    if not verifier(stmt, trig.proof, bound):
        raise InvalidProof("proof rejected")

    cts = state.ciphertexts + ((trig.ct,) if trig.ct is not None else ())
    return ContractState(state.entries + (trig.h,), cts)
