"""The five forecasting models: closed-form linear/kernel ridge, hand-
rolled feed-forward and LSTM networks, and the echo state network."""

from agingforecast.models.linear import (
    KrrModel,
    LrrModel,
    krr_fit,
    krr_predict,
    lrr_fit,
    lrr_predict,
    rbf_kernel,
    rbf_kernel_matrix,
)

__all__ = [
    "KrrModel",
    "LrrModel",
    "krr_fit",
    "krr_predict",
    "lrr_fit",
    "lrr_predict",
    "rbf_kernel",
    "rbf_kernel_matrix",
]
