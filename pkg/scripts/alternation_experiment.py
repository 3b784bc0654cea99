"""Do nu X. mu Y. body and mu Y. nu X. body agree on random frames?

Pure experiment: counts agreements per body and prints a small table.
Nothing is asserted; swapping alternating binders is not sound in general,
and the counts show how often it happens to work on small frames.
"""
import argparse
import random

from fixlimits import generators as gen
from fixlimits import mucalc

BODIES = [
    "(p & []X) | <>Y",
    "(p & <>X) | (q & <>Y)",
    "[]Y & (p | <>X)",
    "(p & X) | <>Y",
    "(q | []X) & (p | <>Y)",
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--frames", type=int, default=300)
    ap.add_argument("--max-states", type=int, default=5)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    frames = [gen.random_frame(rng, rng.randint(1, args.max_states)) for _ in range(args.frames)]
    print(f"{'body':<28} agree  differ  example of difference")
    for body in BODIES:
        agree, first = 0, None
        for k, f in enumerate(frames):
            out = mucalc.compare_alternation(body, f)
            if out["equal"]:
                agree += 1
            elif first is None:
                first = (k, out["nu_mu"], out["mu_nu"])
        note = "" if first is None else f"frame {first[0]}: nu-mu={first[1]} mu-nu={first[2]}"
        print(f"{body:<28} {agree:>5}  {len(frames) - agree:>6}  {note}")


if __name__ == "__main__":
    main()
