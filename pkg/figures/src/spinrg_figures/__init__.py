"""Figure regeneration from spinrg experiment artifacts."""

__version__ = "1.0.0"

from .artifacts import ArtifactError, SeriesFile, load_series
from .render import PlotSpec, render
