"""Panel rendering: paired time series, chi-squared fits, epsilon decay."""

from __future__ import annotations

import glob
import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import (ArtifactError, load_fit_tables, load_series,
                        pair_series)

ORIGINAL_COLOR = "#0000ff"
RENORMALIZED_COLOR = "#ff0000"

KINDS = ("paired_series", "chi2_fit", "epsilon_fit")

AXIS_LABELS = {
    "magnetization": "M(t)",
    "correlation": "C(t)",
    "entropy": "S(t)",
}


@dataclass
class PlotSpec:
    kind: str
    inputs: list
    output: str
    n_cols: int = 0  # 0 = choose automatically

    @classmethod
    def from_dict(cls, data) -> "PlotSpec":
        unknown = set(data) - {"kind", "inputs", "output", "n_cols"}
        if unknown:
            raise ArtifactError(f"unknown spec keys: {sorted(unknown)}")
        try:
            kind, inputs, output = data["kind"], data["inputs"], data["output"]
        except KeyError as exc:
            raise ArtifactError(f"spec missing key {exc}") from exc
        if kind not in KINDS:
            raise ArtifactError(f"unknown figure kind {kind!r}")
        if isinstance(inputs, str):
            inputs = [inputs]
        return cls(kind, list(inputs), output, int(data.get("n_cols", 0)))

    def resolve_inputs(self):
        paths = []
        for pattern in self.inputs:
            hits = sorted(glob.glob(pattern))
            if not hits:
                if glob.escape(pattern) == pattern and os.path.exists(pattern):
                    hits = [pattern]
                else:
                    raise ArtifactError(f"no inputs match {pattern!r}")
            paths.extend(hits)
        return paths


def _grid_axes(n_panels, n_cols):
    if n_cols <= 0:
        n_cols = min(3, n_panels) or 1
    n_rows = math.ceil(n_panels / n_cols)
    fig, axes = plt.subplots(n_rows, n_cols, squeeze=False,
                             figsize=(4.2 * n_cols, 3.2 * n_rows))
    flat = axes.reshape(-1)
    for ax in flat[n_panels:]:
        ax.set_visible(False)
    return fig, flat[:n_panels]


def _save(fig, output):
    fig.tight_layout()
    # strip embedded dates so repeated renders are byte-identical
    meta = {"Date": None} if output.endswith(".svg") else {}
    fig.savefig(output, dpi=120, metadata=meta)
    plt.close(fig)


def _render_paired_series(spec: PlotSpec):
    pairs = pair_series([load_series(p) for p in spec.resolve_inputs()])
    fig, axes = _grid_axes(len(pairs), spec.n_cols)
    for ax, (orig, ren) in zip(axes, pairs):
        ax.plot(orig.times, orig.values, color=ORIGINAL_COLOR,
                label="original")
        ax.plot(ren.times, ren.values, color=RENORMALIZED_COLOR,
                label="renormalized")
        ax.set_xlabel("t")
        ax.set_ylabel(AXIS_LABELS.get(orig.observable, orig.observable))
        ax.set_title(f"{orig.model} {orig.observable}, N={orig.n_spins}")
        ax.legend(loc="best", fontsize=8)
    _save(fig, spec.output)


def _fit_curve(fit, ns):
    xs = np.linspace(min(ns), max(ns), 200)
    ys = fit["a"] * 2.0 ** (-fit["b"] * xs) + fit.get("c", 0.0)
    return xs, ys


def _render_fit_tables(spec: PlotSpec, value_label):
    entries = []
    for path in spec.resolve_inputs():
        entries.extend(load_fit_tables(path))
    fig, axes = _grid_axes(len(entries), spec.n_cols)
    for ax, entry in zip(axes, entries):
        pts = np.asarray(entry["points"], float)
        ax.scatter(pts[:, 0], pts[:, 1], color=ORIGINAL_COLOR, zorder=3,
                   label="data")
        if "fit" in entry:
            xs, ys = _fit_curve(entry["fit"], pts[:, 0])
            ax.plot(xs, ys, color=RENORMALIZED_COLOR, label=_fit_label(entry))
        if (pts[:, 1] > 0).all():
            ax.set_yscale("log", base=2)
        ax.set_xlabel("N")
        ax.set_ylabel(value_label(entry))
        ax.set_title(f"{entry.get('model', '')} {entry['observable']}".strip())
        ax.legend(loc="best", fontsize=8)
    _save(fig, spec.output)


def _fit_label(entry):
    fit = entry["fit"]
    label = f"{fit['a']:.3g} * 2^(-{fit['b']:.3g} N)"
    if fit.get("c"):
        label += f" + {fit['c']:.3g}"
    return label


def render(spec: PlotSpec):
    """Render one figure; returns the output path."""
    if spec.kind == "paired_series":
        _render_paired_series(spec)
    elif spec.kind == "chi2_fit":
        _render_fit_tables(spec, lambda e: "chi-squared")
    else:
        _render_fit_tables(spec, lambda e: "epsilon")
    return spec.output
