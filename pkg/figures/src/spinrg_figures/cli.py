"""Batch figure emission: spinrg-plot --spec <json>."""

from __future__ import annotations

import argparse
import json
import sys

from .artifacts import ArtifactError
from .render import PlotSpec, render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="spinrg-plot",
        description="Regenerate figures from spinrg CSV/JSON artifacts.")
    parser.add_argument("--spec", required=True,
                        help="JSON plot spec (a single spec or a list)")
    args = parser.parse_args(argv)
    try:
        with open(args.spec) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot load spec {args.spec}: {exc}", file=sys.stderr)
        return 1
    specs = data if isinstance(data, list) else [data]
    try:
        for raw in specs:
            out = render(PlotSpec.from_dict(raw))
            print(out)
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
