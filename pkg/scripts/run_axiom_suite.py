"""Check every catalog sample against the model family and print a grid."""

import argparse
import time

from aot import kernel as kn
from aot import model as md
from aot import semantics as se


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--heavy-limit", type=int, default=256,
                    help="skip heavy samples in models with more abstract objects than this")
    ap.add_argument("--max-worlds", type=int, default=2)
    ap.add_argument("--max-states", type=int, default=2)
    args = ap.parse_args()

    fam = md.model_family(max_states=args.max_states, max_worlds=args.max_worlds)
    samples = kn.catalog_samples()
    names, seen = [], {}
    for label, _, _ in samples:
        schema = label.split()[0]
        seen[schema] = seen.get(schema, 0) + 1
        names.append(f"{schema}.{seen[schema]}")
    print("config        " + " ".join(f"{n:>8}" for n in names))
    failures = 0
    for m in fam:
        t0 = time.time()
        cells = []
        for _, t, heavy in samples:
            if heavy and m.n_abstract > args.heavy_limit:
                cells.append("skip")
                continue
            ok = se.valid(m, t.formula)
            failures += not ok
            cells.append("ok" if ok else "FAIL")
        print(f"{str(m.config):13} " + " ".join(f"{c:>8}" for c in cells) + f"   {time.time() - t0:.1f}s")
    print(f"{failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
