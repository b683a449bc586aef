"""Build every gallery entry and write its files under an output directory.

    python3 scripts/run_gallery.py --out gallery_out --res 256
"""
import argparse
from pathlib import Path

from ricci_surfaces.cli import main as cli_main

ENTRIES = [
    ("enneper",),
    ("plane",),
    ("catenoid",),
    ("zn-family", "1"),
    ("zn-family", "3"),
    ("lorentz-family", "1"),
    ("lorentz-family", "2"),
    ("spherical-cone", "3"),
    ("conical-torus-demo",),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("gallery_out"))
    ap.add_argument("--res", type=int, default=None)
    args = ap.parse_args()

    failures = []
    for entry in ENTRIES:
        argv = ["gallery", *entry, "--out", str(args.out)]
        if args.res and entry[0] != "conical-torus-demo":
            argv += ["--res", str(args.res)]
        # the CLI prints each report; keep the summary line short
        code = cli_main(argv)
        print(f"# {' '.join(entry)}: exit {code}")
        if code:
            failures.append(entry)
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
