"""Forecasting toolkit for slow industrial degradation processes.

The package has three parts:

* ``agingforecast.reactor`` -- a seeded mechanistic simulator of catalyst
  deactivation in an isothermal plug flow reactor, used to generate
  synthetic cycle-structured datasets.
* ``agingforecast.data`` -- cycle dataset containers, CSV I/O, input
  standardization, lag-window features, cycle-wise splits, and the
  real-world feature engineering pipeline.
* ``agingforecast.models`` / ``agingforecast.bench`` -- five forecasting
  models (linear ridge, RBF kernel ridge, feed-forward net, echo state
  network, LSTM) plus metrics, cross-validation, hyperparameter search,
  learning curves and a CLI.
"""

__version__ = "0.1.0"
