"""Figures from qhdlab run artifacts.

Consumes only the documented run-directory schema (diagnostics.csv,
summary.json, fields_XXXX.csv); never recomputes physics.
"""

from plotkit.figures import plot_conservation, plot_decay, plot_lambda_measure

__all__ = ["plot_decay", "plot_conservation", "plot_lambda_measure"]
