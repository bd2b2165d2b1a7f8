"""Fiat-Shamir sigma protocols: discrete log, k-ary OR, and OR of
(discrete log AND correct ElGamal encryption).

Every challenge hashes the group parameters, the full statement, all
commitments and a 32-byte bound message, each under its own domain tag.
OR composition splits the master challenge by modular sum: simulated
branches pick their challenges freely and the real branch takes the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Sequence

from .encryption import Ciphertext, eg_encrypt
from .errors import DecodeError, ExtractionError, WitnessError
from .group import Element, Group

DLOG_TAG = "OTDS/v1/dlog"
OR_TAG = "OTDS/v1/or"
OR_ENC_TAG = "OTDS/v1/or-enc"

BOUND_MSG_LEN = 32


def _check_bound(bound_msg: bytes) -> None:
    if not isinstance(bound_msg, (bytes, bytearray)) or len(bound_msg) != BOUND_MSG_LEN:
        raise ValueError("bound message must be a 32-byte hash")


def _branch_count(k: int) -> bytes:
    return k.to_bytes(2, "big")


def _decode_branches(group: Group, data: bytes) -> tuple[Element, tuple[Element, ...], bytes]:
    e = group.element_size
    if len(data) < e + 2:
        raise DecodeError("statement too short")
    base = group.decode(data[:e])
    k = int.from_bytes(data[e : e + 2], "big")
    end = e + 2 + k * e
    if k == 0 or len(data) < end:
        raise DecodeError("bad branch list")
    branches = tuple(group.decode(data[e + 2 + i * e : e + 2 + (i + 1) * e]) for i in range(k))
    return base, branches, data[end:]


def _split(data: bytes, sizes: Sequence[int]) -> list[bytes]:
    out, pos = [], 0
    for n in sizes:
        out.append(data[pos : pos + n])
        pos += n
    return out


# ---------------------------------------------------------------------------
# Statements and proofs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DlogStatement:
    base: Element
    Y: Element

    @property
    def group(self) -> Group:
        return self.base.group

    def to_bytes(self) -> bytes:
        return self.base.to_bytes() + self.Y.to_bytes()

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "DlogStatement":
        e = group.element_size
        if len(data) != 2 * e:
            raise DecodeError("dlog statement has wrong length")
        return cls(group.decode(data[:e]), group.decode(data[e:]))


@dataclass(frozen=True)
class DlogProof:
    A: Element
    c: int
    s: int

    def to_bytes(self) -> bytes:
        g = self.A.group
        return self.A.to_bytes() + g.encode_scalar(self.c) + g.encode_scalar(self.s)

    @classmethod
    def size(cls, group: Group) -> int:
        return group.element_size + 2 * group.scalar_size

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "DlogProof":
        if len(data) != cls.size(group):
            raise DecodeError("dlog proof has wrong length")
        a, c, s = _split(data, [group.element_size, group.scalar_size, group.scalar_size])
        return cls(group.decode(a), group.decode_scalar(c), group.decode_scalar(s))


@dataclass(frozen=True)
class OrStatement:
    base: Element
    branches: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ValueError("OR statement needs at least one branch")

    @property
    def group(self) -> Group:
        return self.base.group

    def to_bytes(self) -> bytes:
        return (
            self.base.to_bytes()
            + _branch_count(len(self.branches))
            + b"".join(Y.to_bytes() for Y in self.branches)
        )

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "OrStatement":
        base, branches, rest = _decode_branches(group, data)
        if rest:
            raise DecodeError("trailing bytes after OR statement")
        return cls(base, branches)


@dataclass(frozen=True)
class OrBranch:
    A: Element
    c: int
    s: int


@dataclass(frozen=True)
class OrProof:
    branches: tuple[OrBranch, ...]

    def to_bytes(self) -> bytes:
        return b"".join(DlogProof(b.A, b.c, b.s).to_bytes() for b in self.branches)

    def field_layout(self) -> tuple[tuple[str, ...], ...]:
        names = tuple(f.name for f in fields(OrBranch))
        return tuple(names for _ in self.branches)

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "OrProof":
        n = DlogProof.size(group)
        if not data or len(data) % n:
            raise DecodeError("OR proof has wrong length")
        parts = [DlogProof.from_bytes(group, data[i : i + n]) for i in range(0, len(data), n)]
        return cls(tuple(OrBranch(p.A, p.c, p.s) for p in parts))


@dataclass(frozen=True)
class OrEncStatement:
    base: Element
    branches: tuple[Element, ...]
    jpk: Element
    ct: Ciphertext

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ValueError("OR statement needs at least one branch")

    @property
    def group(self) -> Group:
        return self.base.group

    def to_bytes(self) -> bytes:
        return (
            self.base.to_bytes()
            + _branch_count(len(self.branches))
            + b"".join(Y.to_bytes() for Y in self.branches)
            + self.jpk.to_bytes()
            + self.ct.to_bytes()
        )

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "OrEncStatement":
        base, branches, rest = _decode_branches(group, data)
        e = group.element_size
        if len(rest) != 3 * e:
            raise DecodeError("OR-enc statement has wrong length")
        return cls(base, branches, group.decode(rest[:e]), Ciphertext.from_bytes(group, rest[e:]))


@dataclass(frozen=True)
class OrEncBranch:
    A_Y: Element
    A_C1: Element
    A_C2: Element
    c: int
    s_x: int
    s_r: int


@dataclass(frozen=True)
class OrEncProof:
    branches: tuple[OrEncBranch, ...]

    def to_bytes(self) -> bytes:
        out = []
        for b in self.branches:
            g = b.A_Y.group
            out.append(
                b.A_Y.to_bytes()
                + b.A_C1.to_bytes()
                + b.A_C2.to_bytes()
                + g.encode_scalar(b.c)
                + g.encode_scalar(b.s_x)
                + g.encode_scalar(b.s_r)
            )
        return b"".join(out)

    def field_layout(self) -> tuple[tuple[str, ...], ...]:
        names = tuple(f.name for f in fields(OrEncBranch))
        return tuple(names for _ in self.branches)

    @staticmethod
    def branch_size(group: Group) -> int:
        return 3 * group.element_size + 3 * group.scalar_size

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "OrEncProof":
        n = cls.branch_size(group)
        if not data or len(data) % n:
            raise DecodeError("OR-enc proof has wrong length")
        e, s = group.element_size, group.scalar_size
        branches = []
        for i in range(0, len(data), n):
            ay, ac1, ac2, c, sx, sr = _split(data[i : i + n], [e, e, e, s, s, s])
            branches.append(
                OrEncBranch(
                    group.decode(ay),
                    group.decode(ac1),
                    group.decode(ac2),
                    group.decode_scalar(c),
                    group.decode_scalar(sx),
                    group.decode_scalar(sr),
                )
            )
        return cls(tuple(branches))


# ---------------------------------------------------------------------------
# Discrete log
# ---------------------------------------------------------------------------


def respond(q: int, k: int, c: int, x: int) -> int:
    """Sigma-protocol response ``k + c*x mod q``."""
    return (k + c * x) % q


def dlog_equation_holds(base: Element, Y: Element, A: Element, c: int, s: int) -> bool:
    return s * base == A + c * Y


def _dlog_challenge(stmt: DlogStatement, A: Element, bound_msg: bytes) -> int:
    g = stmt.group
    return g.hash_to_scalar(DLOG_TAG, g.params_bytes() + stmt.to_bytes() + A.to_bytes() + bound_msg)


def prove_dlog(stmt: DlogStatement, x: int, bound_msg: bytes, rng) -> DlogProof:
    _check_bound(bound_msg)
    g = stmt.group
    if x * stmt.base != stmt.Y:
        raise WitnessError("witness does not match statement")
    k = g.random_scalar(rng)
    A = k * stmt.base
    c = _dlog_challenge(stmt, A, bound_msg)
    return DlogProof(A, c, respond(g.q, k, c, x))


def verify_dlog(stmt: DlogStatement, proof: DlogProof, bound_msg: bytes) -> bool:
    try:
        _check_bound(bound_msg)
        if not isinstance(proof, DlogProof):
            return False
        q = stmt.group.q
        if not (0 <= proof.c < q and 0 <= proof.s < q):
            return False
        if not dlog_equation_holds(stmt.base, stmt.Y, proof.A, proof.c, proof.s):
            return False
        return _dlog_challenge(stmt, proof.A, bound_msg) == proof.c
    except (AttributeError, TypeError, ValueError):
        return False


def simulate_dlog(stmt: DlogStatement, rng, challenge: int | None = None) -> DlogProof:
    """Accepting-equation transcript without the witness.

    The challenge is programmed (random unless given), so the result only
    passes :func:`verify_dlog` if the random oracle were reprogrammed.
    """
    g = stmt.group
    c = g.random_scalar(rng) if challenge is None else challenge % g.q
    s = g.random_scalar(rng)
    return DlogProof(s * stmt.base - c * stmt.Y, c, s)


def extract_dlog(stmt: DlogStatement, t1: DlogProof, t2: DlogProof) -> int:
    """Special-soundness extractor from two transcripts sharing a commitment."""
    q = stmt.group.q
    if t1.A != t2.A:
        raise ExtractionError("transcripts do not share a commitment")
    if t1.c % q == t2.c % q:
        raise ExtractionError("transcripts share a challenge")
    for t in (t1, t2):
        if not dlog_equation_holds(stmt.base, stmt.Y, t.A, t.c, t.s):
            raise ExtractionError("transcript does not satisfy the verification equation")
    return (t1.s - t2.s) * pow(t1.c - t2.c, -1, q) % q


# ---------------------------------------------------------------------------
# k-ary OR of discrete logs
# ---------------------------------------------------------------------------


def _or_challenge(stmt: OrStatement, commitments: Sequence[Element], bound_msg: bytes) -> int:
    g = stmt.group
    data = g.params_bytes() + stmt.to_bytes() + b"".join(A.to_bytes() for A in commitments) + bound_msg
    return g.hash_to_scalar(OR_TAG, data)


def prove_or(stmt: OrStatement, real_index: int, x: int, bound_msg: bytes, rng) -> OrProof:
    _check_bound(bound_msg)
    g = stmt.group
    if not 0 <= real_index < len(stmt.branches):
        raise WitnessError("real branch index out of range")
    if x * stmt.base != stmt.branches[real_index]:
        raise WitnessError("witness does not match the chosen branch")

    commitments: list[Element] = []
    sims: dict[int, tuple[int, int]] = {}
    k = 0
    for i, Y in enumerate(stmt.branches):
        if i == real_index:
            k = g.random_scalar(rng)
            commitments.append(k * stmt.base)
        else:
            c_i, s_i = g.random_scalar(rng), g.random_scalar(rng)
            sims[i] = (c_i, s_i)
            commitments.append(s_i * stmt.base - c_i * Y)

    master = _or_challenge(stmt, commitments, bound_msg)
    c_real = (master - sum(c for c, _ in sims.values())) % g.q
    branches = []
    for i, A in enumerate(commitments):
        if i == real_index:
            branches.append(OrBranch(A, c_real, respond(g.q, k, c_real, x)))
        else:
            branches.append(OrBranch(A, *sims[i]))
    return OrProof(tuple(branches))


def verify_or(stmt: OrStatement, proof: OrProof, bound_msg: bytes) -> bool:
    try:
        _check_bound(bound_msg)
        if not isinstance(proof, OrProof) or len(proof.branches) != len(stmt.branches):
            return False
        q = stmt.group.q
        for b, Y in zip(proof.branches, stmt.branches):
            if not (0 <= b.c < q and 0 <= b.s < q):
                return False
            if not dlog_equation_holds(stmt.base, Y, b.A, b.c, b.s):
                return False
        master = _or_challenge(stmt, [b.A for b in proof.branches], bound_msg)
        return sum(b.c for b in proof.branches) % q == master
    except (AttributeError, TypeError, ValueError):
        return False


# ---------------------------------------------------------------------------
# k-ary OR of (dlog AND ciphertext encrypts that same key)
# ---------------------------------------------------------------------------


def _or_enc_challenge(stmt: OrEncStatement, branches: Sequence[OrEncBranch], bound_msg: bytes) -> int:
    g = stmt.group
    commits = b"".join(b.A_Y.to_bytes() + b.A_C1.to_bytes() + b.A_C2.to_bytes() for b in branches)
    return g.hash_to_scalar(OR_ENC_TAG, g.params_bytes() + stmt.to_bytes() + commits + bound_msg)


def or_enc_equations_hold(stmt: OrEncStatement, Y: Element, b: OrEncBranch) -> bool:
    G, ct = stmt.base, stmt.ct
    return (
        b.s_x * G == b.A_Y + b.c * Y
        and b.s_r * G == b.A_C1 + b.c * ct.c1
        and b.s_x * G + b.s_r * stmt.jpk == b.A_C2 + b.c * ct.c2
    )


def prove_or_enc(
    stmt: OrEncStatement, real_index: int, x: int, r: int, bound_msg: bytes, rng
) -> OrEncProof:
    _check_bound(bound_msg)
    g = stmt.group
    G = stmt.base
    if not 0 <= real_index < len(stmt.branches):
        raise WitnessError("real branch index out of range")
    Y_real = stmt.branches[real_index]
    if x * G != Y_real:
        raise WitnessError("witness does not match the chosen branch")
    if G != g.generator or eg_encrypt(stmt.jpk, Y_real, r) != stmt.ct:
        raise WitnessError("ciphertext does not encrypt the chosen branch key under r")

    drafts: list[OrEncBranch] = []
    kx = kr = 0
    for i, Y in enumerate(stmt.branches):
        if i == real_index:
            kx, kr = g.random_scalar(rng), g.random_scalar(rng)
            drafts.append(OrEncBranch(kx * G, kr * G, kx * G + kr * stmt.jpk, 0, 0, 0))
        else:
            c, sx, sr = (g.random_scalar(rng) for _ in range(3))
            sxG = sx * G
            drafts.append(
                OrEncBranch(
                    sxG - c * Y,
                    sr * G - c * stmt.ct.c1,
                    sxG + sr * stmt.jpk - c * stmt.ct.c2,
                    c,
                    sx,
                    sr,
                )
            )

    master = _or_enc_challenge(stmt, drafts, bound_msg)
    c_real = (master - sum(b.c for i, b in enumerate(drafts) if i != real_index)) % g.q
    d = drafts[real_index]
    drafts[real_index] = OrEncBranch(
        d.A_Y, d.A_C1, d.A_C2, c_real, respond(g.q, kx, c_real, x), respond(g.q, kr, c_real, r)
    )
    return OrEncProof(tuple(drafts))


def verify_or_enc(stmt: OrEncStatement, proof: OrEncProof, bound_msg: bytes) -> bool:
    try:
        _check_bound(bound_msg)
        if not isinstance(proof, OrEncProof) or len(proof.branches) != len(stmt.branches):
            return False
        q = stmt.group.q
        for b, Y in zip(proof.branches, stmt.branches):
            if not all(0 <= v < q for v in (b.c, b.s_x, b.s_r)):
                return False
            if not or_enc_equations_hold(stmt, Y, b):
                return False
        master = _or_enc_challenge(stmt, proof.branches, bound_msg)
        return sum(b.c for b in proof.branches) % q == master
    except (AttributeError, TypeError, ValueError):
        return False
