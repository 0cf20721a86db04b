#!/usr/bin/env python3
"""Error-versus-work study on the Dirichlet parabola problem.

Same layout as the sine study; only the initial profile differs.
"""

import sys

from example2_study import run

if __name__ == "__main__":
    sys.exit(run(preset="example3"))
