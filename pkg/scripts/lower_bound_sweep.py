"""Fidelity lower-bound experiment over random Pauli-subset ciphers.

Encrypting half of a maximally entangled state with |K| keys leaves
F^2 <= |K| 4^-n against the ideal product; this prints the worst observed
F^2 and how often 1/2-indistinguishability fails, per (n, |K|).
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from entroq.ciphers import random_pauli_subset
from entroq.harness import lower_bound_experiment


@dataclass
class LowerBoundConfig:
    sizes: tuple = (1, 2)
    samples: int = 100
    epsilon: float = 0.5
    seed: int = 0


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=LowerBoundConfig.samples)
    p.add_argument("--epsilon", type=float, default=LowerBoundConfig.epsilon)
    p.add_argument("--seed", type=int, default=LowerBoundConfig.seed)
    cfg = LowerBoundConfig(**vars(p.parse_args(argv)))
    print("n  |K|  bound    max F^2  fails(eps)  all_hold")
    for n in cfg.sizes:
        k = 1
        while k <= 4 ** n:
            res = [lower_bound_experiment(random_pauli_subset(n, k, (cfg.seed, n, k, s)), cfg.epsilon)
                   for s in range(cfg.samples)]
            fails = sum(r.indist_fails for r in res)
            print(f"{n}  {k:<3}  {res[0].bound:<7.4f}  {max(r.fidelity_sq for r in res):<7.4f}  "
                  f"{fails:>4}/{cfg.samples:<5}  {all(r.holds for r in res)}")
            k *= 2


if __name__ == "__main__":
    main()
