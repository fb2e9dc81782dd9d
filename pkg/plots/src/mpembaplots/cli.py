"""Batch figure rendering: ``mpemba-render --spec figure.json``.

The spec file is a JSON object (or list of objects) with fields
kind / inputs / output / title / xlabel / ylabel / extra; see README.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .artifacts import ArtifactError
from .figures import FigureSpec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mpemba-render",
        description="Render simulation artifacts (CSV/JSON) to figures",
    )
    parser.add_argument("--spec", required=True, help="figure spec JSON file")
    args = parser.parse_args(argv)

    path = Path(args.spec)
    if not path.exists():
        parser.error(f"spec file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        print(f"error: {path}: invalid JSON at line {exc.lineno}: {exc.msg}", file=sys.stderr)
        return 2

    specs = doc if isinstance(doc, list) else [doc]
    try:
        for entry in specs:
            out = render(FigureSpec.from_json_dict(entry))
            print(f"wrote {out}")
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
