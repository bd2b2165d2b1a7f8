"""Command line front end over a file-backed ledger.

Exit codes: 0 success, 1 cryptographic rejection, 2 usage error,
3 I/O or decode error.
"""

from __future__ import annotations

import argparse
import os
import random
import secrets
import sys

from . import kvfile
from .contracts import VARIANT_NAMES, Trigger, decode_variant
from .encryption import JudgeKeys
from .errors import (
    ContractConsumed,
    DecodeError,
    DeployError,
    FlavorMismatch,
    InvalidProof,
    KeyNotAuthorized,
    OTDSError,
    UnknownContract,
    UnsupportedVariant,
    WitnessError,
)
from .group import BACKEND_NAMES, Group, get_group
from .ledger import Ledger, open_ledger
from .scheme import (
    DelegateKeys,
    DelegationHandle,
    MessageSignature,
    UserKeys,
    bc_update,
    delegate,
    dkgen,
    dsign,
    jkgen,
    judge_open,
    par_gen,
    ukgen,
    usign,
    verify,
)

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _rng(args):
    return secrets.SystemRandom() if args.seed is None else random.Random(args.seed)


def _group_of(fields: dict[str, bytes]) -> Group:
    if len(fields["group"]) != 1:
        raise DecodeError("group id must be one byte")
    try:
        return get_group(fields["group"][0])
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc


def _gid(group: Group) -> bytes:
    return bytes([group.backend_id])


def _element_arg(value: str, key: str, group: Group | None):
    """An element given either as hex or as a path to a kv file holding ``key``."""
    if os.path.exists(value):
        _, fields = kvfile.read(value)
        if key not in fields:
            raise DecodeError(f"{value} has no {key}")
        g = _group_of(fields)
        if group is not None and g is not group:
            raise DecodeError(f"{value} uses a different group")
        return g.decode(fields[key])
    try:
        raw = bytes.fromhex(value)
    except ValueError:
        raise UsageError(f"{value!r} is neither a file nor hex") from None
    if group is None:
        raise UsageError("hex keys need a group context")
    return group.decode(raw)


def _load_user(path) -> UserKeys:
    _, f = kvfile.read(path, "user-secret")
    g = _group_of(f)
    return UserKeys(
        g.decode_scalar(f["usk_sig"]), g.decode(f["upk_sig"]), g.decode_scalar(f["usk_dl"]), g.decode(f["upk_dl"])
    )


def _load_handle(path) -> tuple[Group, DelegationHandle]:
    _, f = kvfile.read(path, "handle")
    g = _group_of(f)
    variant, rest = decode_variant(g, f["variant"])
    if rest:
        raise DecodeError("trailing bytes after variant")
    esk = g.decode_scalar(f["esk"]) if "esk" in f else None
    return g, DelegationHandle(f["contract_id"], variant, esk)


def _contract_arg(value: str) -> bytes:
    if os.path.exists(value):
        _, f = kvfile.read(value, ("handle", "trigger"))
        return f["contract_id"]
    try:
        cid = bytes.fromhex(value)
    except ValueError:
        raise UsageError(f"{value!r} is neither a file nor a hex contract id") from None
    if len(cid) != 32:
        raise UsageError("contract id must be 32 bytes")
    return cid


def _read_msg(path) -> bytes:
    with open(path, "rb") as f:
        return f.read()


# -- subcommands -----------------------------------------------------------


def cmd_keygen_user(args) -> int:
    g = par_gen(backend=args.backend)
    u = ukgen(g, _rng(args))
    kvfile.write(
        args.out,
        "user-secret",
        {
            "group": _gid(g),
            "usk_sig": g.encode_scalar(u.usk_sig),
            "upk_sig": u.upk_sig.to_bytes(),
            "usk_dl": g.encode_scalar(u.usk_dl),
            "upk_dl": u.upk_dl.to_bytes(),
        },
    )
    if args.pub_out:
        kvfile.write(
            args.pub_out,
            "user-public",
            {"group": _gid(g), "upk_sig": u.upk_sig.to_bytes(), "upk_dl": u.upk_dl.to_bytes()},
        )
    return EXIT_OK


def cmd_keygen_delegate(args) -> int:
    g = par_gen(backend=args.backend)
    d = dkgen(g, _rng(args))
    kvfile.write(args.out, "delegate-secret", {"group": _gid(g), "dsk": g.encode_scalar(d.dsk), "dpk": d.dpk.to_bytes()})
    if args.pub_out:
        kvfile.write(args.pub_out, "delegate-public", {"group": _gid(g), "dpk": d.dpk.to_bytes()})
    return EXIT_OK


def cmd_keygen_judge(args) -> int:
    g = par_gen(backend=args.backend)
    j = jkgen(g, _rng(args))
    kvfile.write(args.out, "judge-secret", {"group": _gid(g), "jsk": g.encode_scalar(j.jsk), "jpk": j.jpk.to_bytes()})
    if args.pub_out:
        kvfile.write(args.pub_out, "judge-public", {"group": _gid(g), "jpk": j.jpk.to_bytes()})
    return EXIT_OK


def cmd_delegate(args) -> int:
    user = _load_user(args.user)
    g = user.upk_sig.group
    dpks = [_element_arg(v, "dpk", g) for v in args.delegate_pk]
    jpk = _element_arg(args.judge_pk, "jpk", g) if args.judge_pk else None
    if args.variant != "basic" and not dpks:
        raise UsageError(f"--variant {args.variant} needs at least one --delegate-pk")
    if args.variant == "accountable" and jpk is None:
        raise UsageError("--variant accountable needs --judge-pk")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    with open_ledger(args.ledger, g) as ledger:
        handle = delegate(ledger, user, args.variant, dpks, jpk, args.n, _rng(args))
    fields = {"group": _gid(g), "contract_id": handle.contract_id, "variant": handle.variant.to_bytes()}
    if handle.esk is not None:
        fields["esk"] = g.encode_scalar(handle.esk)
    kvfile.write(args.out, "handle", fields)
    print(handle.contract_id.hex())
    return EXIT_OK


def cmd_sign(args) -> int:
    g, handle = _load_handle(args.handle)
    msg = _read_msg(args.msg_file)
    rng = _rng(args)
    basic = VARIANT_NAMES[handle.variant.kind] == "basic"
    if args.role == "user":
        if basic:
            sig, trig = usign(handle, None, msg, args.hiding, rng)
        else:
            if not args.key:
                raise UsageError("--role user needs --key")
            sig, trig = usign(handle, _load_user(args.key), msg, args.hiding, rng)
    else:
        dk = None
        if args.key:
            _, f = kvfile.read(args.key, "delegate-secret")
            dg = _group_of(f)
            dk = DelegateKeys(dg.decode_scalar(f["dsk"]), dg.decode(f["dpk"]))
        elif not basic:
            raise UsageError("--role delegate needs --key")
        sig, trig = dsign(handle, dk, msg, args.hiding, rng)
    sig_fields = {"h": sig.h}
    if sig.sigma is not None:
        sig_fields["sigma"] = sig.sigma
    kvfile.write(args.sig_out, "signature", sig_fields)
    kvfile.write(
        args.trigger_out,
        "trigger",
        {"group": _gid(g), "contract_id": handle.contract_id, "trigger": trig.to_bytes()},
    )
    return EXIT_OK


def cmd_submit(args) -> int:
    _, f = kvfile.read(args.trigger, "trigger")
    g = _group_of(f)
    trig = Trigger.from_bytes(g, f["trigger"])
    with open_ledger(args.ledger, g) as ledger:
        try:
            state = ledger.submit_trigger(f["contract_id"], trig)
        except ContractConsumed:
            print("rejected: contract consumed", file=sys.stderr)
            return EXIT_REJECT
        except UnknownContract:
            print("rejected: unknown contract", file=sys.stderr)
            return EXIT_REJECT
        except (InvalidProof, FlavorMismatch) as exc:
            print(f"rejected: {exc}", file=sys.stderr)
            return EXIT_REJECT
    print(f"accepted {len(state)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    ledger = Ledger.load(args.ledger)
    upk_sig = _element_arg(args.user_pk, "upk_sig", ledger.group)
    _, f = kvfile.read(args.sig, "signature")
    sig = MessageSignature(f["h"], f.get("sigma"))
    ok = verify(ledger, upk_sig, _read_msg(args.msg_file), sig, _contract_arg(args.contract))
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_judge_open(args) -> int:
    ledger = Ledger.load(args.ledger)
    _, f = kvfile.read(args.judge, "judge-secret")
    g = _group_of(f)
    if g is not ledger.group:
        raise DecodeError("judge key uses a different group")
    judge = JudgeKeys(g.decode_scalar(f["jsk"]), g.decode(f["jpk"]))
    record = ledger.get_contract(_contract_arg(args.contract))
    if record is None:
        print("rejected: unknown contract", file=sys.stderr)
        return EXIT_REJECT
    try:
        opened = judge_open(judge, record)
    except UnsupportedVariant as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECT
    for pk in opened:
        print(pk.to_bytes().hex())
    return EXIT_OK


def cmd_ledger_show(args) -> int:
    ledger = Ledger.load(args.ledger)
    print(f"group {BACKEND_NAMES[ledger.group.backend_id]}")
    print(f"chain {'ok' if ledger.verify_chain() else 'BROKEN'}")
    for b in ledger.blocks:
        print(f"block {b.height} {b.block_hash.hex()} txs={len(b.txs)}")
    for cid in ledger.contract_ids():
        r = ledger.get_contract(cid)
        kind = VARIANT_NAMES[r.spec.variant.kind]
        print(f"contract {cid.hex()} {kind} n={r.spec.n} block={r.deploy_ref.height} used={len(r.state)}")
        for h in r.st:
            print(f"  st {h.hex()}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="otds", description="single-use delegatable signatures")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--seed", type=int, default=None, help="seed all randomness (reproducible output)")
        return sp

    for name, func, what in [
        ("keygen-user", cmd_keygen_user, "user"),
        ("keygen-delegate", cmd_keygen_delegate, "delegate"),
        ("keygen-judge", cmd_keygen_judge, "judge"),
    ]:
        sp = add(name, func, f"generate a {what} key pair")
        sp.add_argument("--out", required=True)
        sp.add_argument("--pub-out")
        sp.add_argument("--backend", choices=["production", "toy"], default="production")

    sp = add("delegate", cmd_delegate, "deploy a delegation contract")
    sp.add_argument("--ledger", required=True)
    sp.add_argument("--user", required=True, help="user-secret key file")
    sp.add_argument("--variant", choices=["basic", "designated", "accountable"], default="basic")
    sp.add_argument("--delegate-pk", action="append", default=[], help="hex or key file; repeatable")
    sp.add_argument("--judge-pk", help="hex or key file")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--out", required=True, help="handle file to write")

    sp = add("sign", cmd_sign, "sign a message and produce a trigger")
    sp.add_argument("--handle", required=True)
    sp.add_argument("--role", choices=["user", "delegate"], required=True)
    sp.add_argument("--key", help="user-secret or delegate-secret file")
    sp.add_argument("--msg-file", required=True)
    sp.add_argument("--hiding", action="store_true")
    sp.add_argument("--sig-out", required=True)
    sp.add_argument("--trigger-out", required=True)

    sp = add("submit", cmd_submit, "submit a trigger to the ledger")
    sp.add_argument("--ledger", required=True)
    sp.add_argument("--trigger", required=True)

    sp = add("verify", cmd_verify, "verify a message signature against the ledger")
    sp.add_argument("--ledger", required=True)
    sp.add_argument("--user-pk", required=True, help="hex upk_sig or user key file")
    sp.add_argument("--msg-file", required=True)
    sp.add_argument("--sig", required=True)
    sp.add_argument("--contract", required=True, help="handle/trigger file or hex id")

    sp = add("judge-open", cmd_judge_open, "reveal signer keys of an accountable contract")
    sp.add_argument("--ledger", required=True)
    sp.add_argument("--judge", required=True)
    sp.add_argument("--contract", required=True)

    sp = add("ledger-show", cmd_ledger_show, "print blocks and contracts")
    sp.add_argument("--ledger", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyNotAuthorized, WitnessError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DecodeError, DeployError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OTDSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
