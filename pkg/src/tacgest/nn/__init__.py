"""Small neural networks with handwritten forward and backward passes."""

from .gradcheck import GradCheckResult, gradient_check
from .nets import NET_KINDS, CnnLstmNet, CnnMhiNet, LstmNet, parameter_count
from .train import (Adam, EpochStats, TrainConfig, TrainResult, predict,
                    softmax_cross_entropy, train_net)

__all__ = [
    "Adam", "CnnLstmNet", "CnnMhiNet", "EpochStats", "GradCheckResult",
    "LstmNet", "NET_KINDS", "TrainConfig", "TrainResult", "gradient_check",
    "parameter_count", "predict", "softmax_cross_entropy", "train_net",
]
