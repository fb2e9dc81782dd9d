"""Figure rendering for covariance-relaxation artifacts."""

from .artifacts import ArtifactError, read_curves, read_phase, read_summary, read_sweep
from .figures import KINDS, FigureSpec, build_figure, render

__version__ = "0.1.0"
