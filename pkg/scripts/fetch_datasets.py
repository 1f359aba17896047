"""Download the four Newman benchmark graphs into data/.

Writes data/{polbooks,football,adjnoun,polblogs}.gml and prints their
statistics next to the expected vertex and class counts. Karate ships
with the repo (see make_karate.py).

    python3 scripts/fetch_datasets.py [--data-dir data] [--force]
"""

import argparse
import io
import sys
import urllib.error
import urllib.request
import zipfile
from pathlib import Path

from hyperskip import config as cfgmod
from hyperskip.graphio import stats

MIRRORS = (
    "https://websites.umich.edu/~mejn/netdata/",
    "http://www-personal.umich.edu/~mejn/netdata/",
)
NAMES = ("polbooks", "football", "adjnoun", "polblogs")
# vertices, classes
EXPECTED = {"karate": (34, 2), "polbooks": (105, 3), "football": (115, 12), "adjnoun": (112, 2), "polblogs": (1224, 2)}


def download(name: str, timeout: float) -> bytes:
    errors = []
    for base in MIRRORS:
        url = f"{base}{name}.zip"
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError) as e:
            errors.append(f"{url}: {e}")
    raise RuntimeError("all mirrors failed:\n  " + "\n  ".join(errors))


def extract_gml(blob: bytes, name: str) -> bytes:
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        members = [m for m in zf.namelist() if m.endswith(".gml")]
        if not members:
            raise RuntimeError(f"{name}.zip has no .gml member: {zf.namelist()}")
        return zf.read(members[0])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data-dir", default=str(Path(__file__).resolve().parents[1] / "data"))
    ap.add_argument("--force", action="store_true", help="re-download files that exist")
    ap.add_argument("--timeout", type=float, default=30.0)
    args = ap.parse_args(argv)
    data_dir = Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    failed = []
    for name in NAMES:
        target = data_dir / f"{name}.gml"
        if target.exists() and not args.force:
            print(f"{name}: present")
            continue
        try:
            target.write_bytes(extract_gml(download(name, args.timeout), name))
            print(f"{name}: wrote {target}")
        except RuntimeError as e:
            print(f"{name}: {e}", file=sys.stderr)
            failed.append(name)

    print(f"\n{'dataset':<10} {'|V|':>6} {'|E|':>7} {'|y|':>4}   expected |V|, |y|")
    for name, (nv, ny) in EXPECTED.items():
        try:
            s = stats(cfgmod.load_dataset(name, data_dir))
        except FileNotFoundError:
            print(f"{name:<10} missing")
            continue
        flag = "" if (s.vertex_count, s.class_count) == (nv, ny) else "  MISMATCH"
        print(f"{name:<10} {s.vertex_count:>6} {s.edge_count:>7} {s.class_count:>4}   {nv}, {ny}{flag}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
