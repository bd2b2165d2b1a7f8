"""An append-only, single-writer ledger simulation.

The ledger is a log of records.  A block header opens a block; deploy and
trigger transactions that follow belong to it.  A header's
``payload_digest`` commits to every transaction of the preceding block, so
a block's identifier (``BlockRef``) is fixed the moment it is opened and
can be signed into a contract before the contract lands in that block.

Serialized form: ``MAGIC || backend_id`` followed by records, each a 4-byte
big-endian length and a body whose first byte is the record type.
"""

from __future__ import annotations

import fcntl
import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

from .chain import GENESIS_PREV, BlockRef, block_hash
from .contracts import ContractSpec, ContractState, Trigger, evaluate
from .errors import (
    ContractConsumed,
    DecodeError,
    DeployError,
    FlavorMismatch,
    InvalidProof,
    OTDSError,
    UnknownContract,
)
from .group import Group, get_group, sha256

MAGIC = b"OTDSLEDG"
VERSION = 1

REC_BLOCK, REC_DEPLOY, REC_TRIGGER = 1, 2, 3

ACCEPTED = 0
_STATUS = {ContractConsumed: 1, InvalidProof: 2, FlavorMismatch: 3, UnknownContract: 4}
_STATUS_EXC = {v: k for k, v in _STATUS.items()}


@dataclass
class Block:
    height: int
    prev_hash: bytes
    payload_digest: bytes
    block_hash: bytes
    txs: list[bytes] = field(default_factory=list)

    @property
    def ref(self) -> BlockRef:
        return BlockRef(self.height, self.block_hash)

    def header_bytes(self) -> bytes:
        return self.height.to_bytes(8, "big") + self.prev_hash + self.payload_digest + self.block_hash


@dataclass(frozen=True)
class ContractRecord:
    contract_id: bytes
    spec: ContractSpec
    deploy_ref: BlockRef
    state: ContractState = ContractState()

    @property
    def st(self) -> tuple[bytes, ...]:
        return self.state.entries

    @property
    def consumed(self) -> bool:
        return len(self.state) >= self.spec.n


class Ledger:
    def __init__(self, group: Group):
        self.group = group
        self.blocks: list[Block] = []
        self._contracts: dict[bytes, ContractRecord] = {}
        self._log: list[bytes] = []
        self._lock = threading.RLock()

    # -- queries ---------------------------------------------------------

    @property
    def tip(self) -> BlockRef | None:
        return self.blocks[-1].ref if self.blocks else None

    def get_contract(self, contract_id: bytes) -> ContractRecord | None:
        return self._contracts.get(contract_id)

    def contract_ids(self) -> list[bytes]:
        return list(self._contracts)

    def verify_chain(self) -> bool:
        prev = GENESIS_PREV
        body = sha256()
        for i, b in enumerate(self.blocks):
            if b.height != i or b.prev_hash != prev or b.payload_digest != body:
                return False
            if b.block_hash != block_hash(prev, i, b.payload_digest):
                return False
            prev, body = b.block_hash, sha256(*b.txs)
        return True

    # -- mutations -------------------------------------------------------

    def _append(self, rec_type: int, body: bytes) -> None:
        self._log.append(bytes([rec_type]) + body)

    def advance_block(self) -> BlockRef:
        """Open a new block and return its reference."""
        with self._lock:
            if self.blocks:
                prev, digest = self.blocks[-1].block_hash, sha256(*self.blocks[-1].txs)
            else:
                prev, digest = GENESIS_PREV, sha256()
            height = len(self.blocks)
            b = Block(height, prev, digest, block_hash(prev, height, digest))
            self.blocks.append(b)
            self._append(REC_BLOCK, b.header_bytes())
            return b.ref

    def deploy_contract(self, spec: ContractSpec) -> bytes:
        """Include ``spec`` in the open block, which must be ``spec.aux``."""
        with self._lock:
            if spec.group is not self.group:
                raise DeployError("contract uses a different group")
            if not self.blocks or spec.aux != self.tip:
                raise DeployError("aux does not match the inclusion block")
            cid = spec.contract_id
            if cid in self._contracts:
                raise DeployError("duplicate contract id")
            tx = spec.to_bytes()
            self.blocks[-1].txs.append(bytes([REC_DEPLOY]) + tx)
            self._append(REC_DEPLOY, tx)
            self._contracts[cid] = ContractRecord(cid, spec, self.tip)
            return cid

    def submit_trigger(self, contract_id: bytes, trig: Trigger) -> ContractState:
        """Run a trigger in a fresh block.

        Rejected triggers are still logged (with their failure status) but
        leave contract state untouched; the error is re-raised.
        """
        with self._lock:
            self.advance_block()
            record = self._contracts.get(contract_id)
            error: OTDSError | None = None
            new_state = None
            if record is None:
                error = UnknownContract(contract_id.hex())
            else:
                try:
                    new_state = evaluate(record.spec, record.state, trig)
                except (ContractConsumed, InvalidProof, FlavorMismatch) as exc:
                    error = exc
            status = ACCEPTED if error is None else _STATUS[type(error)]
            tx = contract_id + bytes([status]) + trig.to_bytes()
            self.blocks[-1].txs.append(bytes([REC_TRIGGER]) + tx)
            self._append(REC_TRIGGER, tx)
            if error is not None:
                raise error
            self._contracts[contract_id] = replace(record, state=new_state)
            return new_state

    # -- serialization ---------------------------------------------------

    def header(self) -> bytes:
        return MAGIC + bytes([VERSION, self.group.backend_id])

    def to_bytes(self) -> bytes:
        return self.header() + b"".join(len(r).to_bytes(4, "big") + r for r in self._log)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Ledger":
        if len(data) < len(MAGIC) + 2 or data[: len(MAGIC)] != MAGIC:
            raise DecodeError("not a ledger file")
        if data[len(MAGIC)] != VERSION:
            raise DecodeError("unsupported ledger version")
        ledger = cls(get_group(data[len(MAGIC) + 1]))
        pos = len(MAGIC) + 2
        while pos < len(data):
            if pos + 4 > len(data):
                raise DecodeError("truncated record length")
            n = int.from_bytes(data[pos : pos + 4], "big")
            rec = data[pos + 4 : pos + 4 + n]
            if len(rec) != n or n == 0:
                raise DecodeError("truncated record")
            ledger._replay(rec)
            pos += 4 + n
        return ledger

    def _replay(self, rec: bytes) -> None:
        kind, body = rec[0], rec[1:]
        if kind == REC_BLOCK:
            ref = self.advance_block()
            if self.blocks[-1].header_bytes() != body:
                raise DecodeError(f"block {ref.height} does not match the hash chain")
        elif kind == REC_DEPLOY:
            try:
                self.deploy_contract(ContractSpec.from_bytes(self.group, body))
            except DeployError as exc:
                raise DecodeError(f"replayed deploy failed: {exc}") from exc
        elif kind == REC_TRIGGER:
            if len(body) < 33:
                raise DecodeError("truncated trigger record")
            cid, status = body[:32], body[32]
            trig = Trigger.from_bytes(self.group, body[33:])
            # submit_trigger opens its own block; the log already holds that header
            self._lock.acquire()
            try:
                self._pop_open_block_header()
                got = ACCEPTED
                try:
                    self.submit_trigger(cid, trig)
                except OTDSError as exc:
                    got = _STATUS.get(type(exc), -1)
                if got != status:
                    raise DecodeError("replayed trigger outcome differs from the log")
            finally:
                self._lock.release()
        else:
            raise DecodeError(f"unknown record type {kind}")

    def _pop_open_block_header(self) -> None:
        if not self.blocks or self.blocks[-1].txs or self._log[-1][0] != REC_BLOCK:
            raise DecodeError("trigger record must follow its own block header")
        self.blocks.pop()
        self._log.pop()

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Ledger":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())


@contextmanager
def open_ledger(path: str | os.PathLike, group: Group | None = None):
    """Load (or create) a ledger file under an exclusive lock.

    On clean exit only the bytes appended since loading are written, so the
    file only ever grows.
    """
    fd = os.open(path, os.O_RDWR | os.O_CREAT, 0o644)
    with os.fdopen(fd, "r+b") as f:
        fcntl.flock(f, fcntl.LOCK_EX)
        try:
            data = f.read()
            if data:
                ledger = Ledger.from_bytes(data)
                if group is not None and ledger.group is not group:
                    raise DecodeError("ledger file uses a different group")
            elif group is None:
                raise DecodeError("ledger file is empty and no group was given")
            else:
                ledger = Ledger(group)
            yield ledger
            out = ledger.to_bytes()
            if out[: len(data)] != data:
                raise RuntimeError("ledger history was rewritten")
            f.seek(len(data))
            f.write(out[len(data) :])
        finally:
            fcntl.flock(f, fcntl.LOCK_UN)
