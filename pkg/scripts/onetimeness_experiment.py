"""Race many valid triggers against n-time contracts and count acceptances.

For each contract, ``attempts`` honest triggers (mixed signers, repeated
and fresh messages) are shuffled together with every other contract's
triggers and submitted. A contract with bound n should end with exactly
n accepted triggers, no matter how many signers tried.
"""

import argparse
import collections
import random
import time
from dataclasses import dataclass

from otds import delegate, dkgen, dsign, jkgen, par_gen, ukgen, usign
from otds.errors import ContractConsumed
from otds.ledger import Ledger


@dataclass
class OnetimenessConfig:
    backend: str = "production"
    contracts: int = 50
    attempts: int = 5
    n: int = 1
    seed: int = 0


def run(cfg: OnetimenessConfig) -> dict:
    g = par_gen(backend=cfg.backend)
    rng = random.Random(cfg.seed)
    ledger = Ledger(g)
    user = ukgen(g, rng)
    delegates = [dkgen(g, rng) for _ in range(3)]
    judge = jkgen(g, rng)
    pending = []
    t0 = time.perf_counter()
    for i in range(cfg.contracts):
        variant = rng.choice(["basic", "designated", "accountable"])
        h = delegate(ledger, user, variant, [d.dpk for d in delegates], judge.jpk, n=cfg.n, rng=rng)
        for j in range(cfg.attempts):
            msg = b"contract %d attempt %d" % (i, j % 2)
            if rng.random() < 0.5:
                _, t = usign(h, user, msg, rng.random() < 0.5, rng)
            else:
                _, t = dsign(h, None if h.esk is not None else rng.choice(delegates), msg, rng.random() < 0.5, rng)
            pending.append((h.contract_id, t))
    rng.shuffle(pending)
    accepted = collections.Counter()
    for cid, t in pending:
        try:
            ledger.submit_trigger(cid, t)
            accepted[cid] += 1
        except ContractConsumed:
            pass
    histogram = collections.Counter(accepted[cid] for cid in ledger.contract_ids())
    return {
        "submissions": len(pending),
        "accepted_per_contract": dict(sorted(histogram.items())),
        "blocks": len(ledger.blocks),
        "chain_ok": ledger.verify_chain(),
        "seconds": time.perf_counter() - t0,
    }


def main():
    d = OnetimenessConfig()
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--backend", choices=["production", "toy"], default=d.backend)
    ap.add_argument("--contracts", type=int, default=d.contracts)
    ap.add_argument("--attempts", type=int, default=d.attempts)
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--seed", type=int, default=d.seed)
    args = ap.parse_args()
    result = run(OnetimenessConfig(args.backend, args.contracts, args.attempts, args.n, args.seed))
    for k, v in result.items():
        print(f"{k}: {v}")
    expected = {min(args.n, args.attempts): args.contracts}
    print("ok" if result["accepted_per_contract"] == expected else "UNEXPECTED")


if __name__ == "__main__":
    main()
