"""Regenerate the one- and two-electron recoil tables as CSV files.

    python scripts/reproduce_tables.py --out tables --workers 4
    python scripts/reproduce_tables.py --tables 1,4 --Z-list 1,10,92
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from nuclear_recoil.cli import main


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="tables", help="directory for table_<n>.csv")
    parser.add_argument("--tables", default="1,2,3,4")
    parser.add_argument("--Z-list", dest="Z_list", help="restrict to these Z values")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    out = Path(args.out)
    for which in args.tables.split(","):
        cmd = ["table", which.strip(), "--format", "csv", "--workers", str(args.workers),
               "--output", str(out / f"table_{which.strip()}.csv")]
        if args.Z_list:
            cmd += ["--Z-list", args.Z_list]
        code = main(cmd)
        if code:
            return code
        print(f"wrote {out / f'table_{which.strip()}.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
