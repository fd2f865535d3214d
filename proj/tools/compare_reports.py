#!/usr/bin/env python3
# Copyright 2026 The georank Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.



"""Side-by-side table of georank evaluation reports.

  compare_reports.py sigma=0:run0/report.json sigma=0.1:run1/report.json

Rows are variants, columns are metric@K. Prints Markdown by default or CSV
with --csv.
"""

import argparse
import json
import sys

METRICS = ("ndcg", "prec", "lndcg")


def load(spec):
    label, sep, path = spec.partition(":")
    if not sep:
        label, path = spec, spec
    with open(path) as f:
        report = json.load(f)
    values = {}
    for m in report["metrics"]:
        values[(m["metric"], m["K"])] = m["mean"]
    return label, values


def main(argv):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("reports", nargs="+", help="label:path/to/report.json")
    parser.add_argument("--csv", action="store_true")
    args = parser.parse_args(argv)

    rows = [load(r) for r in args.reports]
    ks = sorted({k for _, v in rows for (_, k) in v})
    columns = [(m, k) for m in METRICS for k in ks]
    header = ["variant"] + ["%s@%d" % c for c in columns]

    def cell(v):
        return "" if v is None else "%.4f" % v

    if args.csv:
        print(",".join(header))
        for label, v in rows:
            print(",".join([label] + [cell(v.get(c)) for c in columns]))
        return 0
    print("| " + " | ".join(header) + " |")
    print("|" + "---|" * len(header))
    for label, v in rows:
        print("| " + " | ".join([label] + [cell(v.get(c)) for c in columns]) + " |")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
