"""Top-level API: parameter and key generation, delegation, signing by
either party, ledger update, verification, and judge opening.

Randomness comes from a caller-supplied ``rng`` exposing ``randrange`` and
``randbytes`` (``random.Random(seed)`` for reproducible runs).  When
omitted, :class:`secrets.SystemRandom` is used.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Sequence

from .chain import BlockRef
from .contracts import (
    Accountable,
    Basic,
    ContractSpec,
    ContractState,
    Designated,
    Trigger,
    Variant,
    bind_message,
    check_contract_signature,
    signed_payload,
    statement_for,
    variant_group,
)
from .encryption import JudgeKeys, eg_decrypt, eg_encrypt, eg_keygen
from .errors import KeyNotAuthorized, UnsupportedVariant, WitnessError
from .group import Element, Group, get_group, tagged_hash
from .ledger import ContractRecord, Ledger
from .nizk import prove_dlog, prove_or, prove_or_enc
from .sigscheme import sig_keygen, sig_sign

MSG_TAG = "OTDS/v1/msg"
MSG_HIDING_TAG = "OTDS/v1/msg-hiding"
BLINDER_LEN = 32

SECURITY_LEVEL = {"toy": 8, "production": 128}


def _rng(rng):
    return secrets.SystemRandom() if rng is None else rng


@dataclass(frozen=True)
class UserKeys:
    usk_sig: int
    upk_sig: Element
    usk_dl: int
    upk_dl: Element


@dataclass(frozen=True)
class DelegateKeys:
    dsk: int
    dpk: Element


@dataclass(frozen=True)
class DelegationHandle:
    contract_id: bytes
    variant: Variant
    esk: int | None = None


@dataclass(frozen=True)
class MessageSignature:
    h: bytes
    sigma: bytes | None = None


def message_hash(msg: bytes, blinder: bytes | None = None) -> bytes:
    if blinder is None:
        return tagged_hash(MSG_TAG, msg)
    return tagged_hash(MSG_HIDING_TAG, blinder + msg)


def par_gen(security: int = 128, backend: str = "production") -> Group:
    """Return the group for ``backend``; refuse security levels it cannot meet."""
    if backend not in SECURITY_LEVEL:
        raise ValueError(f"unsupported backend {backend!r}")
    if backend == "production" and security > SECURITY_LEVEL[backend]:
        raise ValueError(f"production backend provides at most {SECURITY_LEVEL[backend]}-bit security")
    return get_group(backend)


def ukgen(group: Group, rng=None) -> UserKeys:
    rng = _rng(rng)
    sig = sig_keygen(group, rng)
    usk_dl = group.random_scalar(rng)
    return UserKeys(sig.sk, sig.pk, usk_dl, usk_dl * group.generator)


def dkgen(group: Group, rng=None) -> DelegateKeys:
    dsk = group.random_scalar(_rng(rng))
    return DelegateKeys(dsk, dsk * group.generator)


def jkgen(group: Group, rng=None) -> JudgeKeys:
    return eg_keygen(group, _rng(rng))


def delegate(
    ledger: Ledger,
    user: UserKeys,
    variant: str = "basic",
    delegate_pks: Sequence[Element] = (),
    jpk: Element | None = None,
    n: int = 1,
    rng=None,
) -> DelegationHandle:
    """Reserve a block, sign the contract into it, and deploy."""
    rng = _rng(rng)
    group = ledger.group
    if n < 1:
        raise ValueError("n must be at least 1")
    esk = None
    if variant == "basic":
        esk = group.random_scalar(rng)
        v: Variant = Basic(esk * group.generator)
    elif variant == "designated":
        v = Designated(user.upk_dl, tuple(delegate_pks))
    elif variant == "accountable":
        if jpk is None:
            raise ValueError("accountable delegation needs a judge key")
        v = Accountable(user.upk_dl, tuple(delegate_pks), jpk=jpk)
    else:
        raise ValueError(f"unknown variant {variant!r}")

    aux = ledger.advance_block()
    tau = sig_sign(group, user.usk_sig, signed_payload(v, n, aux), rng)
    spec = ContractSpec(v, n, tau, user.upk_sig, aux)
    cid = ledger.deploy_contract(spec)
    return DelegationHandle(cid, v, esk)


def _sign(
    handle: DelegationHandle, real_index: int, x: int, msg: bytes, hiding: bool, rng
) -> tuple[MessageSignature, Trigger]:
    rng = _rng(rng)
    blinder = rng.randbytes(BLINDER_LEN) if hiding else None
    h = message_hash(msg, blinder)
    bound = bind_message(handle.contract_id, h)
    v = handle.variant
    if isinstance(v, Basic):
        trig = Trigger(prove_dlog(statement_for(v), x, bound, rng), h)
    elif isinstance(v, Accountable):
        r = variant_group(v).random_scalar(rng)
        ct = eg_encrypt(v.jpk, v.branches[real_index], r)
        trig = Trigger(prove_or_enc(statement_for(v, ct), real_index, x, r, bound, rng), h, ct)
    else:
        trig = Trigger(prove_or(statement_for(v), real_index, x, bound, rng), h)
    return MessageSignature(h, blinder), trig


def dsign(
    handle: DelegationHandle,
    delegate_keys: DelegateKeys | None,
    msg: bytes,
    hiding: bool = False,
    rng=None,
) -> tuple[MessageSignature, Trigger]:
    v = handle.variant
    if isinstance(v, Basic):
        if handle.esk is None:
            raise WitnessError("basic delegation handle carries no one-time key")
        return _sign(handle, 0, handle.esk, msg, hiding, rng)
    if delegate_keys is None or delegate_keys.dpk not in v.delegate_keys:
        raise KeyNotAuthorized("delegate key is not listed in the contract")
    index = 1 + v.delegate_keys.index(delegate_keys.dpk)
    return _sign(handle, index, delegate_keys.dsk, msg, hiding, rng)


def usign(
    handle: DelegationHandle, user: UserKeys, msg: bytes, hiding: bool = False, rng=None
) -> tuple[MessageSignature, Trigger]:
    v = handle.variant
    if isinstance(v, Basic):
        if handle.esk is None:
            raise WitnessError("basic delegation handle carries no one-time key")
        return _sign(handle, 0, handle.esk, msg, hiding, rng)
    if user.upk_dl != v.upk_dl:
        raise KeyNotAuthorized("user key does not match the contract")
    return _sign(handle, 0, user.usk_dl, msg, hiding, rng)


def bc_update(ledger: Ledger, handle: DelegationHandle, trig: Trigger) -> ContractState:
    return ledger.submit_trigger(handle.contract_id, trig)


def verify(
    ledger: Ledger, upk_sig: Element, msg: bytes, sig: MessageSignature, contract_id: bytes
) -> bool:
    try:
        record = ledger.get_contract(contract_id)
        if record is None or record.spec.upk_sig != upk_sig:
            return False
        if not check_contract_signature(record.spec):
            return False
        if record.spec.aux != record.deploy_ref:
            return False
        if sig.sigma is not None and len(sig.sigma) != BLINDER_LEN:
            return False
        h = message_hash(msg, sig.sigma)
        # a signature carrying any other h is malformed, even if msg itself is locked in st
        return sig.h == h and h in record.st
    except (AttributeError, TypeError, ValueError):
        return False


def judge_open(judge: JudgeKeys, record: ContractRecord) -> list[Element]:
    """Decrypt the signer key escrowed by every accepted trigger."""
    if not isinstance(record.spec.variant, Accountable):
        raise UnsupportedVariant("only accountable contracts can be opened")
    return [eg_decrypt(judge.jsk, ct) for ct in record.state.ciphertexts]


def export_esk(ledger: Ledger, handle: DelegationHandle) -> int:
    """Release a basic one-time key once its contract is fully consumed."""
    record = ledger.get_contract(handle.contract_id)
    if handle.esk is None or record is None or not record.consumed:
        raise UnsupportedVariant("one-time key is only released after consumption")
    return handle.esk


__all__ = [
    "BlockRef",
    "DelegateKeys",
    "DelegationHandle",
    "MessageSignature",
    "UserKeys",
    "bc_update",
    "delegate",
    "dkgen",
    "dsign",
    "export_esk",
    "jkgen",
    "judge_open",
    "message_hash",
    "par_gen",
    "ukgen",
    "usign",
    "verify",
]
