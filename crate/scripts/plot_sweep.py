#!/usr/bin/env python3
"""Plot throughput from a `vbmi64 bench` CSV.

    python3 scripts/plot_sweep.py bench.csv              # writes bench.png
    python3 scripts/plot_sweep.py bench.csv --summary    # text only, no matplotlib
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path

COLUMNS = ["impl", "direction", "size_bytes", "median_s", "min_s", "max_s", "gbps"]


def load(path):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != COLUMNS:
            sys.exit(f"{path}: unexpected columns {reader.fieldnames}")
        series = defaultdict(list)
        for row in reader:
            key = (row["impl"], row["direction"])
            series[key].append((int(row["size_bytes"]), float(row["gbps"])))
    for points in series.values():
        points.sort()
    return series


def summary(series):
    for (impl, direction), points in sorted(series.items()):
        cells = " ".join(f"{size}:{gbps:.2f}" for size, gbps in points)
        print(f"{impl:<9} {direction:<7} {cells}")


def plot(series, out):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (impl, direction), points in sorted(series.items()):
        sizes, gbps = zip(*points)
        label = impl if impl == "memcpy" else f"{impl} {direction}"
        ax.plot(sizes, gbps, marker="o", label=label)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("base64 size (bytes)")
    ax.set_ylabel("GB/s")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("csv", type=Path)
    p.add_argument("-o", "--out", type=Path)
    p.add_argument("--summary", action="store_true")
    args = p.parse_args()
    series = load(args.csv)
    if args.summary:
        summary(series)
    else:
        plot(series, args.out or args.csv.with_suffix(".png"))


if __name__ == "__main__":
    main()
