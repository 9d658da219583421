"""Phase-1 quantum-example cost against the k log2 k (ln r + 1) reference.

Runs the span learner on planted instances for several (k, r) and prints a
CSV with mean cost for known r (stop at dim r) and for the stall rule.
"""

import argparse
import csv
import sys

import numpy as np

from fsparse.boolfourier import random_sparse_function
from fsparse.oracle_sim import ExampleOracle, make_rng
from fsparse.sparse_learner import LearnerConfig, learn_span, phase1_reference, stall_length

SHAPES = [(2, 1), (4, 2), (8, 3), (16, 4)]


def mean_cost(n, k, r, seeds, r_bound):
    costs = []
    for seed in range(seeds):
        s = random_sparse_function(n, k, r, seed, exact_dim=True)
        o = ExampleOracle(s)
        learn_span(o, LearnerConfig(k=k, r_bound=r_bound), make_rng(seed))
        costs.append(o.log.quantum_examples_used)
    return float(np.mean(costs))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--seeds", type=int, default=200)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["k", "r", "reference", "mean_known_r", "mean_stall_rule", "stall_length"])
    for k, r in SHAPES:
        known = mean_cost(args.n, k, r, args.seeds, r)
        stall = mean_cost(args.n, k, r, args.seeds, None)
        w.writerow([k, r, f"{phase1_reference(k, r):.12g}", f"{known:.12g}", f"{stall:.12g}",
                    stall_length(args.n, k, 1 / 3)])


if __name__ == "__main__":
    main()
