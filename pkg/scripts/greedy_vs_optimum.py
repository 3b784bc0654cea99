"""Greedy disclosure versus the brute-force optimum on seeded instances.

For each instance prints the greedy risk, the optimal risk over post-fixed
states meeting the accountability floor, the dual estimate and whether the
greedy state has a removable item.
"""
import argparse
import random

from fixlimits import optimize as opt
from fixlimits.suites import greedy_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--verbose", action="store_true", help="print every instance, not just the summary")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    optimal = slack_fail = 0
    worst = 0.0
    for k in range(args.count):
        op, model, acc, A0 = greedy_instance(rng)
        res = opt.greedy_min_transparency(op, acc, A0, model)
        best_val, best = opt.brute_force_optimum(op, acc, A0, model)
        dual = opt.kkt_report(res.state, op, acc, A0, model)
        gap = res.risk - best_val
        optimal += gap <= opt.TOL
        slack_fail += dual.slackness_product > opt.TOL
        worst = max(worst, gap)
        if args.verbose or dual.slackness_product > opt.TOL:
            print(f"#{k:<3} A0={A0:<5} greedy={sorted(res.state)} risk={res.risk:.3f} "
                  f"optimum={sorted(best)} risk={best_val:.3f} eta={dual.eta:.3f} "
                  f"slack={dual.slack:.2f} product={dual.slackness_product:.3g}")
    print(f"optimal {optimal}/{args.count}, worst risk gap {worst:.3f}, "
          f"slackness product above 1e-9 on {slack_fail}/{args.count}")


if __name__ == "__main__":
    main()
