#!/usr/bin/env python3
"""Build the bundled 10,000-digit MNIST subset in IDX format.

The digits come from the `mnist` npm package (src/digits/<d>.json), which
stores MNIST images as 784 intensities scaled to [0, 1] and rounded to three
decimals. Multiplying by 255 and rounding recovers the original bytes exactly.
Samples are interleaved round-robin across digits.

Usage: scripts/fetch_mnist_subset.py [OUT_DIR]   (needs `npm` on PATH)
"""
import gzip
import json
import os
import struct
import subprocess
import sys
import tarfile
import tempfile


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "data/mnist-subset"
    os.makedirs(out_dir, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(["npm", "pack", "mnist@1.1.0"], cwd=tmp, check=True,
                       stdout=subprocess.DEVNULL)
        with tarfile.open(os.path.join(tmp, "mnist-1.1.0.tgz")) as tar:
            tar.extractall(tmp)
        per_digit = []
        for d in range(10):
            with open(os.path.join(tmp, "package", "src", "digits", f"{d}.json")) as f:
                flat = json.load(f)["data"]
            assert len(flat) % 784 == 0
            per_digit.append([flat[i:i + 784] for i in range(0, len(flat), 784)])

    images, labels = [], []
    longest = max(len(p) for p in per_digit)
    for i in range(longest):
        for d in range(10):
            if i < len(per_digit[d]):
                images.append(bytes(int(round(v * 255)) for v in per_digit[d][i]))
                labels.append(d)

    n = len(images)
    with gzip.GzipFile(os.path.join(out_dir, "images-idx3-ubyte.gz"), "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, n, 28, 28))
        for img in images:
            f.write(img)
    with gzip.GzipFile(os.path.join(out_dir, "labels-idx1-ubyte.gz"), "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, n))
        f.write(bytes(labels))
    print(f"wrote {n} samples to {out_dir}")


if __name__ == "__main__":
    main()
