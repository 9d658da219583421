"""Entropy-greedy query counts on benchmark classes.

For each class prints |C|, the spectral ratio A of the constructed adversary
matrix, the worst and mean number of queries, and the (A^2/log2 A) log2 |C|
reference.
"""

import csv
import sys

from fsparse.query_learner import (
    learn_all_targets,
    linear_class,
    point_class,
    query_reference,
    spectral_ratio,
    subspace_class,
)


def classes():
    for N in (4, 8, 16, 32, 64):
        yield f"point N={N}", point_class(N)
    for n in range(2, 8):
        yield f"linear n={n}", linear_class(n)
    for n, k in ((3, 2), (4, 2), (4, 4), (5, 2), (5, 16), (6, 2)):
        yield f"subspace n={n} k={k}", subspace_class(n, k)


def main():
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["class", "size", "spectral_ratio", "max_queries", "mean_queries", "reference"])
    for name, cc in classes():
        trs = learn_all_targets(cc)
        q = [tr.queries for tr in trs.values()]
        A = spectral_ratio(cc)
        w.writerow([name, cc.size, f"{A:.12g}", max(q), f"{sum(q) / len(q):.12g}",
                    f"{query_reference(A, cc.size):.12g}"])


if __name__ == "__main__":
    main()
