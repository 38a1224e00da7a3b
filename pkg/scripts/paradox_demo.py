"""Both routes to the Clark-Boolos paradox, side by side.

The direct route derives Ka & ~Ka, but only with the gated naive beta rule.
The description route stays consistent in the models; beta fails instead.
"""

import argparse

from aot import kernel as kn
from aot import model as md
from aot import paradox as px


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--model", choices=("m0", "m1"), default="m0")
    args = ap.parse_args()
    m = md.m0() if args.model == "m0" else md.m1()

    print("== direct route (naive beta enabled) ==")
    rep = px.run_clark_boolos_syntactic(enable_unsound_beta=True)
    print(rep.to_text())

    d = px.clark_boolos_derivation(True)
    try:
        kn.replay(px.drop_step(d.trace, 0), px.naive_beta_extension(True))
    except kn.TraceError as e:
        print(f"without the naive beta step: {e}\n")

    print(f"== description route in {m.config} ==")
    print(px.run_clark_boolos_semantic(m).to_text())
    chain = px.equivalence_chain(m)
    print(f"equivalence chain over {chain.checked} individuals: {'holds' if chain.ok else chain.mismatches}")


if __name__ == "__main__":
    main()
