#!/usr/bin/env python3
"""Fetch the evaluation datasets that are not vendored in data/.

iris.csv and wdbc.csv ship with the repository (exported from scikit-learn's
bundled copies). The remaining UCI/Kaggle datasets need network access, which
is why this script exists: run it once on a machine with internet and the
grid/acceptance runs that reference them will pick the files up from data/.

Usage: python3 tools/fetch_datasets.py [data_dir]
"""

import csv
import sys
import urllib.request
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"


def fetch(url: str) -> bytes:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as r:
        return r.read()


def write_csv(path: Path, header, rows):
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"  wrote {path} ({len(rows)} rows)")


def transfusion(data_dir: Path):
    # Blood Transfusion Service Center: 748 samples, 4 numeric features.
    raw = fetch(f"{UCI}/blood-transfusion/transfusion.data").decode()
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    rows = [ln.split(",") for ln in lines[1:]]
    write_csv(
        data_dir / "transfusion.csv",
        ["recency", "frequency", "monetary", "time", "donated"],
        rows,
    )


def mushroom(data_dir: Path):
    # Mushroom: 8124 samples, 22 categorical features, class e/p.
    raw = fetch(f"{UCI}/mushroom/agaricus-lepiota.data").decode()
    names = [
        "cap-shape", "cap-surface", "cap-color", "bruises", "odor",
        "gill-attachment", "gill-spacing", "gill-size", "gill-color",
        "stalk-shape", "stalk-root", "stalk-surface-above-ring",
        "stalk-surface-below-ring", "stalk-color-above-ring",
        "stalk-color-below-ring", "veil-type", "veil-color", "ring-number",
        "ring-type", "spore-print-color", "population", "habitat",
    ]
    rows = []
    for ln in raw.splitlines():
        if not ln.strip():
            continue
        cells = ln.split(",")
        rows.append(cells[1:] + [cells[0]])  # class column last
    write_csv(data_dir / "mushroom.csv", names + ["class"], rows)


def pima(data_dir: Path):
    # Pima Indians Diabetes (mirrored; the original UCI page was retired).
    url = "https://raw.githubusercontent.com/jbrownlee/Datasets/master/pima-indians-diabetes.data.csv"
    raw = fetch(url).decode()
    rows = [ln.split(",") for ln in raw.splitlines() if ln.strip()]
    write_csv(
        data_dir / "pima.csv",
        [
            "pregnancies", "glucose", "blood_pressure", "skin_thickness",
            "insulin", "bmi", "pedigree", "age", "outcome",
        ],
        rows,
    )


def parkinsons(data_dir: Path):
    raw = fetch(f"{UCI}/parkinsons/parkinsons.data").decode()
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    # Drop the name column; keep status as the class.
    idx = header.index("name")
    header.pop(idx)
    for r in rows:
        r.pop(idx)
    write_csv(data_dir / "parkinsons.csv", header, rows)


def ionosphere(data_dir: Path):
    raw = fetch(f"{UCI}/ionosphere/ionosphere.data").decode()
    rows = [ln.split(",") for ln in raw.splitlines() if ln.strip()]
    header = [f"a{i:02d}" for i in range(34)] + ["class"]
    write_csv(data_dir / "ionosphere.csv", header, rows)


def lung_cancer_note(_):
    print(
        "  note: the 59-sample 'lung cancer' table used in the evaluation is\n"
        "  the Kaggle dataset by Yusuf Dede (lung-cancer-dataset); download\n"
        "  lung_cancer_examples.csv manually (Kaggle requires a login) and\n"
        "  save it as data/lung_cancer.csv; the Name/Surname columns can be\n"
        "  dropped at ingestion with --kind Name=drop --kind Surname=drop"
    )


def main():
    data_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    data_dir.mkdir(parents=True, exist_ok=True)
    steps = [transfusion, mushroom, pima, parkinsons, ionosphere, lung_cancer_note]
    failures = []
    for step in steps:
        print(f"{step.__name__}:")
        try:
            step(data_dir)
        except Exception as e:  # noqa: BLE001 - report and continue
            print(f"  FAILED: {e}")
            failures.append(step.__name__)
    if failures:
        print(f"\nfailed: {', '.join(failures)} — rerun with network access")
        sys.exit(1)
    print("\nall datasets fetched")


if __name__ == "__main__":
    main()
