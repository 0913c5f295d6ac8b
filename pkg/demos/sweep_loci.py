"""Eigenvalue loci of A_v as v runs over a polar grid, written as CSV.

Run: python3 demos/sweep_loci.py > loci.csv
"""

import sys

from mslab.cli import cmd_sweep, sweep_csv

cfg = {"theta": {"zeros": [{"point": [0.0, 0.0]}, {"point": [0.5, 0.0]}]}}
rows = cmd_sweep(cfg, radial=6, angular=12, max_radius=0.9)
sys.stdout.write(sweep_csv(rows))
print(f"{len(rows)} rows", file=sys.stderr)
