"""Regenerate the frozen command line outputs in tests/golden/.

Only run this after an intentional wire-format change; the golden test
exists to catch unintentional ones.
"""

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from golden_scenario import GOLDEN_DIR, run_session  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=GOLDEN_DIR)
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        files = run_session(Path(tmp))
    args.out.mkdir(parents=True, exist_ok=True)
    for old in args.out.iterdir():
        old.unlink()
    for name, data in files.items():
        (args.out / name).write_bytes(data)
    print(f"wrote {len(files)} files to {args.out}")


if __name__ == "__main__":
    main()
