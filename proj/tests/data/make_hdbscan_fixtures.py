#!/usr/bin/env python3
"""Regenerates the frozen hdbscan reference fixtures.

Labels come from scikit-learn's HDBSCAN run on a precomputed distance
matrix (min_samples == min_cluster_size, EOM extraction, no single
cluster). The C++ suite must reproduce them up to a relabeling.
"""

import numpy as np
from sklearn.cluster import HDBSCAN


def blob(rng, center, n, spread=0.25):
    return center + spread * rng.standard_normal((n, 2))


def write_case(name, points, min_size):
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff ** 2).sum(-1))
    dist /= dist.max()  # jaccard-like range

    labels = HDBSCAN(
        min_cluster_size=min_size,
        min_samples=min_size,
        metric="precomputed",
        cluster_selection_method="eom",
        allow_single_cluster=False,
    ).fit_predict(dist)

    with open(f"{name}_dist.csv", "w") as f:
        for row in dist:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")
    with open(f"{name}_labels.csv", "w") as f:
        f.write("id,label\n")
        for i, l in enumerate(labels):
            f.write(f"{i},{l}\n")
    print(name, "clusters:", labels.max() + 1, "noise:", int((labels == -1).sum()))


def main():
    rng = np.random.default_rng(20240817)
    two = np.vstack([
        blob(rng, np.array([0.0, 0.0]), 20),
        blob(rng, np.array([8.0, 0.0]), 20),
    ])
    write_case("hdbscan_two_blobs", two, min_size=5)

    three = np.vstack([
        blob(rng, np.array([0.0, 0.0]), 30),
        blob(rng, np.array([9.0, 1.0]), 25),
        blob(rng, np.array([4.0, 8.0]), 20),
    ])
    write_case("hdbscan_three_blobs", three, min_size=5)


if __name__ == "__main__":
    main()
