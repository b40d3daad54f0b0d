#!/usr/bin/env python3
# Copyright 2026 The nnkgraph Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a class-balanced MNIST subsample as an IDX image/label file pair.

Input is a CSV with 784 pixel columns (0..255) followed by a label column,
e.g. the 5000-sample MNIST extract shipped with mlxtend
(mlxtend/data/data/mnist_5k.csv.gz).
"""
import argparse
import gzip
import struct

import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--per-class", type=int, default=100)
    ap.add_argument("--seed", type=int, default=2020)
    ap.add_argument("--images", default="mnist1000-images.idx3-ubyte")
    ap.add_argument("--labels", default="mnist1000-labels.idx1-ubyte")
    args = ap.parse_args()

    opener = gzip.open if args.csv.endswith(".gz") else open
    with opener(args.csv, "rt") as f:
        data = np.loadtxt(f, delimiter=",")
    pixels = data[:, :-1].astype(np.uint8)
    labels = data[:, -1].astype(np.uint8)

    rng = np.random.default_rng(args.seed)
    picked = []
    for c in range(10):
        idx = np.flatnonzero(labels == c)
        picked.append(rng.choice(idx, size=args.per_class, replace=False))
    order = np.sort(np.concatenate(picked))

    with open(args.images, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(order), 28, 28))
        f.write(pixels[order].tobytes())
    with open(args.labels, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(order)))
        f.write(labels[order].tobytes())


if __name__ == "__main__":
    main()
