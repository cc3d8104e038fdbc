#!/usr/bin/env python3
"""Augmentation on synthetic Gaussian blobs: baseline vs BOV vs OSE.

Prints one line per (augmentation, classifier) with test accuracy.
"""
import argparse
import time

from ose.augmentation import AugmentationConfig, augment, split_dataset
from ose.evaluate import CLASSIFIERS, run_benchmark
from ose.synthetic import gaussian_blobs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--classes", type=int, default=30)
    ap.add_argument("--per-class", type=int, default=100)
    ap.add_argument("--dim", type=int, default=50)
    ap.add_argument("--noise", type=float, default=16.0)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--K", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    data = gaussian_blobs(args.classes, args.per_class, args.dim, noise=args.noise, seed=args.seed)
    train, test = split_dataset(data, 0.5, seed=args.seed)
    print(f"train {len(train)}  test {len(test)}  dim {data.dim}")
    for method in ("none", "bov", "ose"):
        t0 = time.perf_counter()
        aug = train if method == "none" else augment(
            train, AugmentationConfig(k=args.k, K=args.K, method=method, seed=args.seed))
        for clf in CLASSIFIERS:
            rep = run_benchmark(aug, test, clf, {"k_neighbors": 5} if clf == "knn" else {})
            print(f"{method:5s} {clf:4s} acc={rep.accuracy:.4f}  n_train={len(aug)}"
                  f"  {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
