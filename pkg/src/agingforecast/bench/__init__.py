"""Metrics, cross-validation, hyperparameter search, learning curves and
the command-line interface."""

from agingforecast.bench.metrics import MetricsReport, TargetMetrics, mse_metrics

__all__ = ["MetricsReport", "TargetMetrics", "mse_metrics"]
