#!/usr/bin/env python3
# Copyright 2026 The moofair Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Materialize MovieLens-100K in its original u.data / u.user / u.item layout.

GroupLens is tried first. When it is unreachable the copy bundled with the
RecBole wheel (atomic .inter/.user/.item files) is fetched through pip and
converted back to the original pipe/tab separated layout.
"""
import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
GENRES = ["unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
          "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
          "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western"]


def from_grouplens(out: pathlib.Path) -> bool:
    try:
        with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
            blob = resp.read()
    except Exception as exc:  # noqa: BLE001
        print(f"grouplens unavailable: {exc}", file=sys.stderr)
        return False
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        for name in ("u.data", "u.user", "u.item"):
            (out / name).write_bytes(zf.read(f"ml-100k/{name}"))
    return True


def rows(text: str):
    lines = text.splitlines()
    for line in lines[1:]:
        if line:
            yield line.split("\t")


def from_recbole(out: pathlib.Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                        "-d", tmp, "recbole==1.2.1"], check=True)
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            prefix = "recbole/dataset_example/ml-100k/ml-100k"
            inter = zf.read(prefix + ".inter").decode("utf-8")
            users = zf.read(prefix + ".user").decode("utf-8")
            items = zf.read(prefix + ".item").decode("latin-1")

    with open(out / "u.data", "w", newline="\n") as f:
        for u, i, r, ts in rows(inter):
            f.write(f"{u}\t{i}\t{int(float(r))}\t{int(float(ts))}\n")
    with open(out / "u.user", "w", newline="\n") as f:
        for u, age, gender, occupation, zipcode in rows(users):
            f.write(f"{u}|{age}|{gender}|{occupation}|{zipcode}\n")
    with open(out / "u.item", "w", newline="\n", encoding="latin-1") as f:
        for item, title, year, classes in rows(items):
            tags = set(classes.split(" "))
            flags = "|".join("1" if g in tags else "0" for g in GENRES)
            date = f"01-Jan-{year}" if year else ""
            f.write(f"{item}|{title}|{date}|||{flags}\n")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "data" / "ml-100k"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not from_grouplens(out):
        from_recbole(out)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
