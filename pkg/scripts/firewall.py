"""Valid in the model, out of reach for the kernel.

Runs the bounded kernel search on a formula (by default the pigeonhole
artifact) and compares with the evaluator's verdict in M0.
"""

import argparse
import time

from aot import kernel as kn
from aot import model as md
from aot import semantics as se
from aot import syntax as sx

PIGEONHOLE = "exists x. exists y. A!(x) & A!(y) & ~(x = y) & box (forall F. F(x) <-> F(y))"


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("formula", nargs="?", default=PIGEONHOLE)
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--show-trace", action="store_true")
    args = ap.parse_args()

    f = sx.parse_formula(args.formula)
    print(f"formula: {sx.print_ast(f)}")
    print(f"valid in M0: {se.valid(md.m0(), f)}")
    t0 = time.time()
    res = kn.bounded_search(f, depth=args.depth)
    print(f"derivable to depth {args.depth}: {res.found}  "
          f"(universe {res.universe_size}, {res.theorems} theorems, {time.time() - t0:.1f}s)")
    if res.found and args.show_trace:
        print(res.derivation.serialize(), end="")


if __name__ == "__main__":
    main()
