"""Print sufficient and necessary key lengths for a grid of (t, eps)."""

from __future__ import annotations

import argparse

from entroq.harness import key_length_table


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.25, 0.0625])
    args = p.parse_args(argv)
    print(f"{'t':>4} {'eps':>7} {'as':>7} {'as(|S|)':>8} {'xu':>7} {'needed':>7}")
    for r in key_length_table(args.n, range(-args.n, args.n + 1), args.eps):
        actual = "-" if r.as_actual_bits is None else f"{r.as_actual_bits:.0f}"
        print(f"{r.t:>4} {r.epsilon:>7.4f} {r.as_bits:>7.2f} {actual:>8} {r.xu_bits:>7.2f} {r.necessary_bits:>7.2f}")


if __name__ == "__main__":
    main()
