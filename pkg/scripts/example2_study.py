#!/usr/bin/env python3
"""Error-versus-work study on the Dirichlet sine problem.

Real-coefficient methods only (the complex-coefficient schemes are
unstable on this backend). One CSV per (viscosity, final time) pair.
The internal substep count keeps the conservation flow's advective CFL
below one at the coarsest step on the publication grid.
"""

import argparse
import sys
from pathlib import Path

from splitburgers.cli import main as cli_main

METHODS = "strang,ml62,ext4,ext6"
H_VALUES = "0.25,0.125,0.0625,0.03125"


def run(argv=None, preset: str = "example2") -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", type=Path)
    parser.add_argument("--paper-scale", action="store_true")
    parser.add_argument("--substeps", type=int, default=32)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for nu in ("0.1", "0.01"):
        for t_final in ("1.0", "3.0"):
            out = args.out_dir / f"{preset}_nu{nu}_t{t_final}.csv"
            flags = [
                "converge", "--preset", preset, "--nu", nu,
                "--t-final", t_final, "--methods", METHODS,
                "--h-values", H_VALUES, "--substeps", str(args.substeps),
                "--workers", str(args.workers), "--output", str(out),
            ]
            if args.paper_scale:
                flags.append("--paper-scale")
            code = cli_main(flags)
            if code != 0:
                return code
            print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
