"""The text artifact format used by the command line tool.

::

    otds-kv v1 <record-type>
    key = lowercase-hex
    ...

Keys are unique, values are lowercase hex, and every record type has a
fixed set of required and optional keys; anything else is rejected.
"""

from __future__ import annotations

import re

from .errors import DecodeError

HEADER = "otds-kv v1"

# record type -> (required keys, optional keys), in output order
SCHEMAS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "user-secret": (("group", "usk_sig", "upk_sig", "usk_dl", "upk_dl"), ()),
    "user-public": (("group", "upk_sig", "upk_dl"), ()),
    "delegate-secret": (("group", "dsk", "dpk"), ()),
    "delegate-public": (("group", "dpk"), ()),
    "judge-secret": (("group", "jsk", "jpk"), ()),
    "judge-public": (("group", "jpk"), ()),
    "handle": (("group", "contract_id", "variant"), ("esk",)),
    "signature": (("h",), ("sigma",)),
    "trigger": (("group", "contract_id", "trigger"), ()),
}

_LINE = re.compile(r"^([a-z_][a-z0-9_]*) = ((?:[0-9a-f]{2})*)$")


def dumps(record_type: str, fields: dict[str, bytes]) -> str:
    required, optional = SCHEMAS[record_type]
    missing = [k for k in required if k not in fields]
    extra = [k for k in fields if k not in required + optional]
    if missing or extra:
        raise ValueError(f"{record_type}: missing {missing}, unexpected {extra}")
    lines = [f"{HEADER} {record_type}"]
    for key in required + optional:
        if key in fields and fields[key] is not None:
            lines.append(f"{key} = {fields[key].hex()}")
    return "\n".join(lines) + "\n"


def loads(text: str, expect: str | tuple[str, ...] | None = None) -> tuple[str, dict[str, bytes]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(HEADER + " "):
        raise DecodeError("missing otds-kv header")
    record_type = lines[0][len(HEADER) + 1 :]
    if record_type not in SCHEMAS:
        raise DecodeError(f"unknown record type {record_type!r}")
    if expect is not None:
        allowed = (expect,) if isinstance(expect, str) else expect
        if record_type not in allowed:
            raise DecodeError(f"expected {' or '.join(allowed)}, got {record_type}")
    required, optional = SCHEMAS[record_type]
    fields: dict[str, bytes] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise DecodeError(f"line {lineno}: expected 'key = lowercase-hex'")
        key, value = m.groups()
        if key in fields:
            raise DecodeError(f"duplicate key {key!r}")
        if key not in required + optional:
            raise DecodeError(f"unknown key {key!r} for {record_type}")
        fields[key] = bytes.fromhex(value)
    missing = [k for k in required if k not in fields]
    if missing:
        raise DecodeError(f"{record_type}: missing keys {missing}")
    return record_type, fields


def read(path, expect=None) -> tuple[str, dict[str, bytes]]:
    with open(path, encoding="utf-8") as f:
        return loads(f.read(), expect)


def write(path, record_type: str, fields: dict[str, bytes]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(record_type, fields))
