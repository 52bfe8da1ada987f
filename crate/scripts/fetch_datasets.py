#!/usr/bin/env python3
"""Materialize the benchmark datasets under data/ as header-bearing CSV files.

The UCI repository is not always reachable, so the datasets are taken from
PyPI wheels that bundle copies of them:

  keel_ds           KEEL exports of mushroom, house-votes-84, breast-cancer,
                    german credit (credit-g) and kr-vs-kp ("chess").
                    The KEEL "balanced" exports of mushroom, house-votes and
                    breast-cancer have the rows with missing values removed.
  pytorch-widedeep  the full 48,842-row adult census table.

Usage: python3 scripts/fetch_datasets.py [--out data]
"""

import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

KEEL = {
    "mushroom": (
        "mushroom",
        [
            "cap-shape", "cap-surface", "cap-color", "bruises", "odor",
            "gill-attachment", "gill-spacing", "gill-size", "gill-color",
            "stalk-shape", "stalk-root", "stalk-surface-above-ring",
            "stalk-surface-below-ring", "stalk-color-above-ring",
            "stalk-color-below-ring", "veil-type", "veil-color", "ring-number",
            "ring-type", "spore-print-color", "population", "habitat", "class",
        ],
    ),
    "vote": (
        "housevotes",
        [
            "handicapped-infants", "water-project-cost-sharing",
            "adoption-of-the-budget-resolution", "physician-fee-freeze",
            "el-salvador-aid", "religious-groups-in-schools",
            "anti-satellite-test-ban", "aid-to-nicaraguan-contras",
            "mx-missile", "immigration", "synfuels-corporation-cutback",
            "education-spending", "superfund-right-to-sue", "crime",
            "duty-free-exports", "export-administration-act-south-africa",
            "class",
        ],
    ),
    "breast-cancer": (
        "breast",
        [
            "age", "menopause", "tumor-size", "inv-nodes", "node-caps",
            "deg-malig", "breast", "breast-quad", "irradiat", "class",
        ],
    ),
    "credit-g": (
        "german",
        [
            "checking_status", "duration", "credit_history", "purpose",
            "credit_amount", "savings_status", "employment",
            "installment_commitment", "personal_status", "other_parties",
            "residence_since", "property_magnitude", "age",
            "other_payment_plans", "housing", "existing_credits", "job",
            "num_dependents", "own_telephone", "foreign_worker", "class",
        ],
    ),
    "kr-vs-kp": (
        "chess",
        [
            "bkblk", "bknwy", "bkon8", "bkona", "bkspr", "bkxbq", "bkxcr",
            "bkxwp", "blxwp", "bxqsq", "cntxt", "dsopp", "dwipd", "hdchk",
            "katri", "mulch", "qxmsq", "r2ar8", "reskd", "reskr", "rimmx",
            "rkxwp", "rxmsq", "simpl", "skach", "skewr", "skrxp", "spcop",
            "stlmt", "thrsk", "wkcti", "wkna8", "wknck", "wkovl", "wkpos",
            "wtoeg", "class",
        ],
    ),
}

CREDIT_G_CLASS = {"1": "good", "2": "bad"}


def download(package: str, dest: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", str(dest), package],
        check=True,
    )
    wheels = sorted(dest.glob("*.whl"))
    match = [w for w in wheels if w.name.lower().startswith(package.replace("-", "_"))]
    if not match:
        raise SystemExit(f"no wheel found for {package}")
    return match[-1]


def write_csv(path: pathlib.Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def keel(out: pathlib.Path, tmp: pathlib.Path) -> None:
    wheel = zipfile.ZipFile(download("keel-ds", tmp))
    for name, (keel_name, header) in KEEL.items():
        raw = wheel.read(f"keel_ds/data/balanced/raw/{keel_name}.dat").decode()
        rows = []
        for line in raw.splitlines():
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != len(header):
                raise SystemExit(f"{keel_name}: expected {len(header)} cells, got {len(cells)}")
            if name == "credit-g":
                cells[-1] = CREDIT_G_CLASS[cells[-1]]
            rows.append(cells)
        write_csv(out / f"{name}.csv", header, rows)


def adult(out: pathlib.Path, tmp: pathlib.Path) -> None:
    import pandas as pd

    wheel = zipfile.ZipFile(download("pytorch-widedeep", tmp))
    blob = wheel.read("pytorch_widedeep/datasets/data/adult.parquet.brotli")
    df = pd.read_parquet(io.BytesIO(blob))
    rows = [[str(v).strip() for v in row] for row in df.itertuples(index=False)]
    write_csv(out / "adult.csv", list(df.columns), rows)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as t:
        tmp = pathlib.Path(t)
        keel(out, tmp)
        adult(out, tmp)


if __name__ == "__main__":
    main()
