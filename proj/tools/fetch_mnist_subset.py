#!/usr/bin/env python3
"""Write a 5000-image MNIST subset (500 per digit) as IDX files.

The subset ships inside the mlxtend wheel as mnist_5k.csv.gz (784 pixel
columns then the label). The wheel is fetched with `pip download` unless
--wheel points at a local copy.
"""
import argparse
import glob
import gzip
import os
import struct
import subprocess
import sys
import tempfile
import zipfile

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def find_wheel(path):
    if path:
        return path
    tmp = tempfile.mkdtemp(prefix="mlxtend-")
    subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:",
                           "-d", tmp, "mlxtend==0.24.0"])
    wheels = glob.glob(os.path.join(tmp, "mlxtend-*.whl"))
    if not wheels:
        sys.exit("pip download produced no mlxtend wheel")
    return wheels[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--wheel", help="local mlxtend wheel (skips pip download)")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "mnist"))
    args = ap.parse_args()

    with zipfile.ZipFile(find_wheel(args.wheel)) as z:
        rows = gzip.decompress(z.read(MEMBER)).decode().splitlines()

    pixels = bytearray()
    labels = bytearray()
    for line in rows:
        fields = line.split(",")
        if len(fields) != 785:
            sys.exit(f"unexpected row width {len(fields)}")
        pixels.extend(int(float(v)) for v in fields[:784])
        labels.append(int(float(fields[784])))

    os.makedirs(args.out, exist_ok=True)
    count = len(labels)
    with open(os.path.join(args.out, "mnist5k-images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x803, count, 28, 28))
        f.write(pixels)
    with open(os.path.join(args.out, "mnist5k-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x801, count))
        f.write(labels)
    print(f"wrote {count} images to {os.path.abspath(args.out)}")


if __name__ == "__main__":
    main()
