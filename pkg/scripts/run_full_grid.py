#!/usr/bin/env python3
"""Run the default verification campaigns and print the result tables.

Covers the p = 3 grid (d in {1, 2, 4}, levels through 3, every check) and the
p = 5 companion grid, writing byte-stable tables under reports/.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from normtower.cli import main  # noqa: E402

HERE = pathlib.Path(__file__).resolve().parents[1]

rc = 0
for cfg in ("configs/full_grid.json", "configs/p5.json"):
    print(f"== campaign {cfg} ==", flush=True)
    rc |= main(["verify", "--config", str(HERE / cfg)])
sys.exit(rc)
