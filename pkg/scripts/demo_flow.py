"""Walk one delegation of each variant through deploy, sign, submit and verify.

Prints the contract id, trigger size and verification result for each
combination of variant, signer role and hash mode.
"""

import argparse
import random
import time
from dataclasses import dataclass

from otds import bc_update, delegate, dkgen, dsign, jkgen, judge_open, par_gen, ukgen, usign, verify
from otds.ledger import Ledger


@dataclass
class DemoConfig:
    backend: str = "production"
    seed: int = 0
    n_delegates: int = 2
    message: bytes = b"transfer 5 coins to carol"


def run(cfg: DemoConfig) -> list[dict]:
    g = par_gen(backend=cfg.backend)
    rng = random.Random(cfg.seed)
    ledger = Ledger(g)
    user = ukgen(g, rng)
    delegates = [dkgen(g, rng) for _ in range(cfg.n_delegates)]
    judge = jkgen(g, rng)
    rows = []
    for variant in ["basic", "designated", "accountable"]:
        for role in ["user", "delegate"]:
            for hiding in [False, True]:
                t0 = time.perf_counter()
                h = delegate(ledger, user, variant, [d.dpk for d in delegates], judge.jpk, rng=rng)
                if role == "user":
                    sig, trig = usign(h, user, cfg.message, hiding, rng)
                else:
                    sig, trig = dsign(h, None if h.esk is not None else delegates[-1], cfg.message, hiding, rng)
                bc_update(ledger, h, trig)
                ok = verify(ledger, user.upk_sig, cfg.message, sig, h.contract_id)
                opened = ""
                if variant == "accountable":
                    pk = judge_open(judge, ledger.get_contract(h.contract_id))[0]
                    opened = "user" if pk == user.upk_dl else "delegate"
                rows.append(
                    dict(
                        variant=variant,
                        role=role,
                        hiding=hiding,
                        contract=h.contract_id.hex()[:16],
                        trigger_bytes=len(trig.to_bytes()),
                        verified=ok,
                        opened=opened,
                        ms=1000 * (time.perf_counter() - t0),
                    )
                )
    assert ledger.verify_chain()
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--backend", choices=["production", "toy"], default=DemoConfig.backend)
    ap.add_argument("--seed", type=int, default=DemoConfig.seed)
    ap.add_argument("--delegates", type=int, default=DemoConfig.n_delegates)
    args = ap.parse_args()
    rows = run(DemoConfig(args.backend, args.seed, args.delegates))
    print(f"{'variant':<12}{'role':<10}{'hiding':<8}{'contract':<18}{'trigger':>8}  verified  opened    ms")
    for r in rows:
        print(
            f"{r['variant']:<12}{r['role']:<10}{str(r['hiding']):<8}{r['contract']:<18}"
            f"{r['trigger_bytes']:>8}  {str(r['verified']):<8}  {r['opened']:<8}{r['ms']:6.1f}"
        )


if __name__ == "__main__":
    main()
