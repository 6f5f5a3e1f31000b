#!/usr/bin/env python3
"""Fetch MovieLens 100K into data/ml-100k in the original u.data/u.item/u.user layout.

Tries the GroupLens archive first. If that host is unreachable, falls back to the
copy of ML-100K bundled in the RecBole wheel on PyPI and converts its atomic
files back into the MovieLens layout (ratings are identical; release dates are
reconstructed as 01-Jan-<year> and video dates/URLs are left empty).
"""
import argparse
import io
import json
import pathlib
import sys
import urllib.request
import zipfile

GROUPLENS = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
RECBOLE_JSON = "https://pypi.org/pypi/recbole/json"
GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime",
    "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery",
    "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


def fetch(url, timeout=30):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def from_grouplens(out):
    z = zipfile.ZipFile(io.BytesIO(fetch(GROUPLENS)))
    for name in ("u.data", "u.item", "u.user", "u.genre", "u.occupation"):
        (out / name).write_bytes(z.read(f"ml-100k/{name}"))


def from_recbole(out):
    meta = json.loads(fetch(RECBOLE_JSON))
    wheel = next(
        u["url"]
        for files in meta["releases"].values()
        for u in files
        if u["filename"].startswith("recbole-1.2.1") and u["filename"].endswith(".whl")
    )
    z = zipfile.ZipFile(io.BytesIO(fetch(wheel, timeout=120)))
    base = "recbole/dataset_example/ml-100k/ml-100k"

    def rows(ext):
        lines = z.read(f"{base}.{ext}").decode("utf-8").splitlines()
        return [line.split("\t") for line in lines[1:] if line]

    with open(out / "u.data", "w", encoding="latin-1", newline="\n") as f:
        for user, item, rating, ts in rows("inter"):
            f.write(f"{user}\t{item}\t{int(float(rating))}\t{int(float(ts))}\n")

    with open(out / "u.item", "w", encoding="latin-1", errors="replace", newline="\n") as f:
        for cols in rows("item"):
            cols += [""] * (4 - len(cols))
            item, title, year, classes = cols[:4]
            labels = set(classes.split()) if classes else {"unknown"}
            flags = "|".join("1" if g in labels else "0" for g in GENRES)
            date = f"01-Jan-{year}" if year else ""
            full_title = f"{title} ({year})" if year else title
            f.write(f"{item}|{full_title}|{date}|||{flags}\n")

    with open(out / "u.user", "w", encoding="latin-1", newline="\n") as f:
        for user, age, gender, occupation, zip_code in rows("user"):
            f.write(f"{user}|{age}|{gender}|{occupation}|{zip_code}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "ml-100k"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        from_grouplens(out)
        source = "grouplens"
    except Exception as err:  # noqa: BLE001
        print(f"grouplens unavailable ({err}); using the RecBole copy", file=sys.stderr)
        from_recbole(out)
        source = "recbole"
    n = sum(1 for _ in open(out / "u.data", encoding="latin-1"))
    print(f"wrote {out} from {source}: {n} ratings")


if __name__ == "__main__":
    main()
