"""Single-use delegatable signatures enforced by an append-only ledger."""

from .group import Element, Group, get_group
from .ledger import Ledger
from .scheme import (
    DelegateKeys,
    DelegationHandle,
    MessageSignature,
    UserKeys,
    bc_update,
    delegate,
    dkgen,
    dsign,
    export_esk,
    jkgen,
    judge_open,
    message_hash,
    par_gen,
    ukgen,
    usign,
    verify,
)

__version__ = "0.1.0"
