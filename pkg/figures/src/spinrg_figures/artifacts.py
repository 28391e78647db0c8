"""Readers for the spinrg output formats: series CSVs and fit-table JSON."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field

import numpy as np

FILENAME_RE = re.compile(
    r"^(?P<model>[a-z]+)_(?P<obs>[a-z]+)_(?P<chain>original|renormalized)"
    r"_N(?P<n>\d+)\.csv$"
)


class ArtifactError(ValueError):
    """An input artifact is missing, unparseable, or inconsistent."""


@dataclass
class SeriesFile:
    path: str
    model: str
    observable: str
    chain: str
    n_spins: int
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def pair_key(self):
        return (self.model, self.observable, self.n_spins)


def load_series(path) -> SeriesFile:
    name = os.path.basename(path)
    m = FILENAME_RE.match(name)
    if not m:
        raise ArtifactError(f"{name}: not a series CSV filename")
    meta = {}
    rows = []
    try:
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        raise ArtifactError(f"cannot read {path}: {exc}") from exc
    body = []
    for ln in lines:
        if ln.startswith("#"):
            if ":" in ln:
                k, v = ln[1:].split(":", 1)
                meta[k.strip()] = v.strip()
        elif ln:
            body.append(ln)
    if not body or body[0] != "t,value":
        raise ArtifactError(f"{name}: missing 't,value' header")
    for ln in body[1:]:
        try:
            t, v = ln.split(",")
            rows.append((float(t), float(v)))
        except ValueError as exc:
            raise ArtifactError(f"{name}: bad data row {ln!r}") from exc
    if not rows:
        raise ArtifactError(f"{name}: no data rows")
    arr = np.asarray(rows)
    return SeriesFile(path, m["model"], m["obs"], m["chain"],
                      int(m["n"]), arr[:, 0], arr[:, 1], meta)


def pair_series(files) -> list:
    """Group loaded series into (original, renormalized) pairs.

    Every pair must share its time grid exactly; unpaired files are an
    error, as are grid mismatches.
    """
    by_key = {}
    for f in files:
        slot = by_key.setdefault(f.pair_key, {})
        if f.chain in slot:
            raise ArtifactError(
                f"duplicate {f.chain} series for {f.pair_key}")
        slot[f.chain] = f
    pairs = []
    for key in sorted(by_key):
        slot = by_key[key]
        if set(slot) != {"original", "renormalized"}:
            raise ArtifactError(
                f"series for {key} lack a partner: have {sorted(slot)}")
        orig, ren = slot["original"], slot["renormalized"]
        if orig.times.shape != ren.times.shape or \
                not np.array_equal(orig.times, ren.times):
            raise ArtifactError(
                f"grid mismatch between {os.path.basename(orig.path)} and "
                f"{os.path.basename(ren.path)}")
        pairs.append((orig, ren))
    return pairs


def load_fit_tables(path) -> list:
    """Entries of a convergence JSON, or a single-entry list for the
    epsilon JSON shape."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ArtifactError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: invalid JSON: {exc}") from exc
    if "fits" in data:
        entries = data["fits"]
    elif "points" in data:
        entries = [{
            "observable": "epsilon",
            "model": data.get("model", ""),
            "points": data["points"],
            **({"fit": data["fit"]} if "fit" in data else {}),
        }]
    else:
        raise ArtifactError(f"{path}: neither a fit table nor an epsilon table")
    for e in entries:
        if "points" not in e or not e["points"]:
            raise ArtifactError(f"{path}: fit entry without points")
    return entries
