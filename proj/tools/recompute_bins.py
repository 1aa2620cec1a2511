#!/usr/bin/env python3
"""Recompute per-bin PSNR/SSIM means from per_image.csv and compare them with
report.json. Exit status 0 when every value agrees exactly."""

import argparse
import csv
import json
import math
import sys


def parse_number(text):
    return float(text)  # accepts "inf" and "nan"


def json_number(value):
    if value is None:
        return math.nan
    if isinstance(value, str):
        return float(value)
    return float(value)


def same(a, b):
    if math.isnan(a) and math.isnan(b):
        return True
    return a == b


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("report_dir", help="directory holding per_image.csv and report.json")
    args = parser.parse_args()

    rows = {}
    order = []
    with open(f"{args.report_dir}/per_image.csv", newline="") as f:
        for row in csv.DictReader(f):
            b = row["bin"]
            if b not in rows:
                rows[b] = []
                order.append(b)
            rows[b].append((parse_number(row["psnr"]), parse_number(row["ssim"])))

    with open(f"{args.report_dir}/report.json") as f:
        report = json.load(f)

    failures = []
    total = 0
    psnr_acc = 0.0
    ssim_acc = 0.0
    for entry in report["bins"]:
        label = entry["bin"]
        scores = rows.get(label, [])
        if entry["count"] != len(scores):
            failures.append(f"{label}: count {entry['count']} != {len(scores)} rows")
            continue
        if not scores:
            if not entry["empty"]:
                failures.append(f"{label}: no rows but not flagged empty")
            continue
        psnr_sum = 0.0
        ssim_sum = 0.0
        for p, s in scores:
            psnr_sum += p
            ssim_sum += s
        psnr = psnr_sum / len(scores)
        ssim = ssim_sum / len(scores)
        for name, mine, theirs in (("psnr", psnr, json_number(entry["psnr"])),
                                   ("ssim", ssim, json_number(entry["ssim"]))):
            if not same(mine, theirs):
                failures.append(f"{label}: {name} {theirs!r} != recomputed {mine!r}")
        total += len(scores)
        psnr_acc += len(scores) * json_number(entry["psnr"])
        ssim_acc += len(scores) * json_number(entry["ssim"])

    avg = report["average"]
    if avg["count"] != total:
        failures.append(f"average: count {avg['count']} != {total}")
    elif total:
        for name, mine in (("psnr", psnr_acc / total), ("ssim", ssim_acc / total)):
            theirs = json_number(avg[name])
            if not same(mine, theirs):
                failures.append(f"average: {name} {theirs!r} != recomputed {mine!r}")

    for line in failures:
        print(line)
    print(f"{len(report['bins'])} bins, {total} images, {len(failures)} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
