"""Small builders shared by the contract, ledger and scheme tests."""

import random
from dataclasses import dataclass

from otds import Ledger, dkgen, jkgen, ukgen
from otds.group import get_group


@dataclass
class World:
    group: object
    rng: random.Random
    ledger: Ledger
    user: object
    delegates: list
    judge: object


def make_world(backend="production", seed=0, n_delegates=2) -> World:
    g = get_group(backend)
    r = random.Random(seed)
    return World(
        g,
        r,
        Ledger(g),
        ukgen(g, r),
        [dkgen(g, r) for _ in range(n_delegates)],
        jkgen(g, r),
    )
