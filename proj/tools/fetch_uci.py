#!/usr/bin/env python3
"""Download the UCI ElectricityLoadDiagrams20112014 data and write one power
CSV per selected client for one calendar year.

The raw file is semicolon separated with decimal commas; each value is the
average kW over the 15 minutes ending at its timestamp. Output rows are
labelled by interval start, which is what the cpimpute tools expect.

    python3 tools/fetch_uci.py --year 2013 --clients MT_002,MT_005 --out data/uci
"""

import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

import pandas as pd

URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/00321/LD2011_2014.txt.zip"


def load_raw(cache: Path) -> pd.DataFrame:
    if not cache.exists():
        cache.parent.mkdir(parents=True, exist_ok=True)
        print(f"downloading {URL}", file=sys.stderr)
        with urllib.request.urlopen(URL) as resp:
            cache.write_bytes(resp.read())
    with zipfile.ZipFile(cache) as zf:
        name = next(n for n in zf.namelist() if n.endswith(".txt"))
        with zf.open(name) as fh:
            return pd.read_csv(io.TextIOWrapper(fh, encoding="utf-8"), sep=";", decimal=",",
                               index_col=0, parse_dates=True)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--year", type=int, default=2013)
    ap.add_argument("--clients", required=True, help="comma-separated column names, e.g. MT_002,MT_005")
    ap.add_argument("--out", type=Path, default=Path("data/uci"))
    ap.add_argument("--cache", type=Path, default=Path("data/LD2011_2014.txt.zip"))
    args = ap.parse_args()

    raw = load_raw(args.cache)
    raw.index = raw.index - pd.Timedelta(minutes=15)
    year = raw[(raw.index >= f"{args.year}-01-01") & (raw.index < f"{args.year + 1}-01-01")]
    args.out.mkdir(parents=True, exist_ok=True)
    for client in args.clients.split(","):
        client = client.strip()
        if client not in year.columns:
            print(f"unknown client {client}", file=sys.stderr)
            return 1
        series = year[client]
        path = args.out / f"{client}.csv"
        with path.open("w") as fh:
            fh.write("timestamp,power_kw\n")
            for ts, value in series.items():
                fh.write(f"{ts:%Y-%m-%dT%H:%M:%S},{float(value)!r}\n")
        print(f"wrote {path} ({len(series)} values)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
