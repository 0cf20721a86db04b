#!/usr/bin/env python3
"""Error-versus-work study on the periodic problem, both viscosities.

Writes one CSV per viscosity with all eight methods over halving steps
2*pi/40 .. 2*pi/640. Desk-scale grid by default; pass --paper-scale for
N = 512.
"""

import argparse
import math
import sys
from pathlib import Path

from splitburgers.cli import fmt, main as cli_main

STEP_DIVISORS = (40, 80, 160, 320, 640)
METHODS = "strang,ml62,rc4,o4,sm4,sm64,ext4,ext6"


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", type=Path)
    parser.add_argument("--paper-scale", action="store_true")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    t_final = 2.0 * math.pi
    h_values = ",".join(fmt(t_final / m) for m in STEP_DIVISORS)
    for nu in ("0.03", "0.003"):
        out = args.out_dir / f"example1_nu{nu}.csv"
        flags = [
            "converge", "--preset", "example1", "--nu", nu,
            "--t-final", fmt(t_final), "--methods", METHODS,
            "--h-values", h_values, "--workers", str(args.workers),
            "--output", str(out),
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
