"""CSV-to-figure rendering for the statistical-query learning experiments.

plotkit never recomputes any physics: it parses result CSVs, aggregates
(means and standard errors only) and renders.
"""

__version__ = "0.1.0"

from .frames import ResultFrame
from .plots import aggregate_figure1, plot_diagnostics, plot_figure1
