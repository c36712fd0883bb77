#!/usr/bin/env python3
"""Grid-gate scaling experiment.

Solves the gridgate family over a range of sizes and fuel counts, for
both column-fuel interpretations, and writes one CSV per interpretation.
Columns: family,n,fuel,status,optimum,nodes,millis.

Usage:
  python3 scripts/run_benchmarks.py [--n-max 3] [--timeout 100] [--out-dir .]
"""

import argparse
import csv
import time
from pathlib import Path

from tbntools.cli import gen_gridgate
from tbntools.core import INF
from tbntools.solver import Budget, StableOptions, stable_configs


def run(n_max: int, timeout: float, out_dir: Path) -> None:
    for literal in (False, True):
        tag = "caption" if literal else "plain"
        path = out_dir / f"gridgate_{tag}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["family", "n", "fuel", "status", "optimum",
                 "nodes", "millis"]
            )
            for n in range(1, n_max + 1):
                for fuel in (2, INF):
                    t = gen_gridgate(n, fuel, caption_literal=literal)
                    started = time.monotonic()
                    result = stable_configs(
                        t, StableOptions(budget=Budget(max_time=timeout))
                    )
                    millis = round((time.monotonic() - started) * 1000, 3)
                    status = "ok" if result.complete else "timeout"
                    writer.writerow(
                        [
                            "gridgate",
                            n,
                            "inf" if fuel is INF else fuel,
                            status,
                            "" if result.optimum is None
                            else result.optimum,
                            result.stats.nodes,
                            millis,
                        ]
                    )
                    print(
                        f"{tag} n={n} fuel="
                        f"{'inf' if fuel is INF else fuel}: "
                        f"{status} optimum={result.optimum} "
                        f"({millis} ms)"
                    )
        print(f"wrote {path}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=3)
    parser.add_argument("--timeout", type=float, default=100.0)
    parser.add_argument("--out-dir", type=Path, default=Path("."))
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    run(args.n_max, args.timeout, args.out_dir)


if __name__ == "__main__":
    main()
