"""The three gesture networks, each a thin object over the layer functions.

Parameters live in an ordered name -> float64 array dict; forward caches the
intermediates it needs and backward returns gradients under the same names.
Weights use Glorot-uniform initialization and zero biases, except the LSTM
forget gate bias which starts at one.
"""

from __future__ import annotations

import numpy as np

from ..core import GESTURE_NAMES, GRID_N, TAXELS
from ..errors import DomainError
from . import layers

N_CLASSES = len(GESTURE_NAMES)
LSTM_HIDDEN = 32


def _glorot(rng: np.random.Generator, shape: tuple, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def _conv_init(rng, out_ch: int, in_ch: int, k: int = 3) -> np.ndarray:
    return _glorot(rng, (out_ch, in_ch, k, k), in_ch * k * k, out_ch * k * k)


def _lstm_init(rng, params: dict, prefix: str, in_dim: int, hidden: int) -> None:
    params[f"{prefix}_wx"] = _glorot(rng, (in_dim, 4 * hidden), in_dim, 4 * hidden)
    params[f"{prefix}_wh"] = _glorot(rng, (hidden, 4 * hidden), hidden, 4 * hidden)
    bias = np.zeros(4 * hidden)
    bias[hidden:2 * hidden] = 1.0  # forget gate starts open
    params[f"{prefix}_b"] = bias


def parameter_count(net) -> int:
    return sum(p.size for p in net.params.values())


class CnnMhiNet:
    """Four 3x3 conv blocks over a 9x9 motion history image, then two dense layers."""

    KIND = "cnn"
    SLOPE = 0.01

    def __init__(self, seed: int = 0):
        rng = np.random.default_rng(seed)
        p = {}
        channels = [1, 8, 16, 32, 32]
        for i in range(4):
            p[f"conv{i + 1}_w"] = _conv_init(rng, channels[i + 1], channels[i])
            p[f"conv{i + 1}_b"] = np.zeros(channels[i + 1])
        flat = channels[-1] * TAXELS
        p["fc1_w"] = _glorot(rng, (flat, 64), flat, 64)
        p["fc1_b"] = np.zeros(64)
        p["fc2_w"] = _glorot(rng, (64, N_CLASSES), 64, N_CLASSES)
        p["fc2_b"] = np.zeros(N_CLASSES)
        self.params = p
        self._cache = None

    def forward(self, images: np.ndarray) -> np.ndarray:
        if images.ndim != 3 or images.shape[1:] != (GRID_N, GRID_N):
            raise DomainError(f"expected (B, {GRID_N}, {GRID_N}) images, got {images.shape}")
        x = images[:, None, :, :]
        caches = []
        for i in range(4):
            x, c_conv = layers.conv2d_forward(
                x, self.params[f"conv{i + 1}_w"], self.params[f"conv{i + 1}_b"])
            x, c_act = layers.leaky_relu_forward(x, self.SLOPE)
            caches.append((c_conv, c_act))
        b = x.shape[0]
        flat_shape = x.shape
        x = x.reshape(b, -1)
        x, c_fc1 = layers.dense_forward(x, self.params["fc1_w"], self.params["fc1_b"])
        x, c_act1 = layers.leaky_relu_forward(x, self.SLOPE)
        logits, c_fc2 = layers.dense_forward(x, self.params["fc2_w"], self.params["fc2_b"])
        self._cache = (caches, flat_shape, c_fc1, c_act1, c_fc2)
        return logits

    def backward(self, dlogits: np.ndarray) -> dict:
        caches, flat_shape, c_fc1, c_act1, c_fc2 = self._cache
        grads = {}
        dx, grads["fc2_w"], grads["fc2_b"] = layers.dense_backward(dlogits, c_fc2)
        dx = layers.leaky_relu_backward(dx, c_act1)
        dx, grads["fc1_w"], grads["fc1_b"] = layers.dense_backward(dx, c_fc1)
        dx = dx.reshape(flat_shape)
        for i in range(3, -1, -1):
            c_conv, c_act = caches[i]
            dx = layers.leaky_relu_backward(dx, c_act)
            dx, grads[f"conv{i + 1}_w"], grads[f"conv{i + 1}_b"] = \
                layers.conv2d_backward(dx, c_conv)
        return grads


class LstmNet:
    """LSTM over raw 81-taxel frames; the last live hidden state feeds a dense head."""

    KIND = "lstm"

    def __init__(self, seed: int = 0):
        rng = np.random.default_rng(seed)
        p = {}
        _lstm_init(rng, p, "lstm", TAXELS, LSTM_HIDDEN)
        p["fc_w"] = _glorot(rng, (LSTM_HIDDEN, N_CLASSES), LSTM_HIDDEN, N_CLASSES)
        p["fc_b"] = np.zeros(N_CLASSES)
        self.params = p
        self._cache = None

    def forward(self, seqs: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        if seqs.ndim != 3 or seqs.shape[2] != TAXELS:
            raise DomainError(f"expected (B, T, {TAXELS}) sequences, got {seqs.shape}")
        h_all, c_lstm = layers.lstm_forward(
            seqs, self.params["lstm_wx"], self.params["lstm_wh"], self.params["lstm_b"])
        rows = np.arange(len(seqs))
        last = lengths - 1
        h_last = h_all[rows, last]
        logits, c_fc = layers.dense_forward(h_last, self.params["fc_w"], self.params["fc_b"])
        self._cache = (c_lstm, c_fc, h_all.shape, last)
        return logits

    def backward(self, dlogits: np.ndarray) -> dict:
        c_lstm, c_fc, h_shape, last = self._cache
        grads = {}
        dh_last, grads["fc_w"], grads["fc_b"] = layers.dense_backward(dlogits, c_fc)
        dh_all = np.zeros(h_shape, dtype=np.float64)
        dh_all[np.arange(h_shape[0]), last] = dh_last
        _, grads["lstm_wx"], grads["lstm_wh"], grads["lstm_b"] = \
            layers.lstm_backward(dh_all, c_lstm)
        return grads


class CnnLstmNet:
    """Per-frame conv encoder (two ReLU convs plus a 2x2 max pool) feeding an LSTM."""

    KIND = "cnnlstm"
    FRAME_DIM = 16 * (GRID_N // 2) * (GRID_N // 2)

    def __init__(self, seed: int = 0):
        rng = np.random.default_rng(seed)
        p = {}
        p["conv1_w"] = _conv_init(rng, 8, 1)
        p["conv1_b"] = np.zeros(8)
        p["conv2_w"] = _conv_init(rng, 16, 8)
        p["conv2_b"] = np.zeros(16)
        _lstm_init(rng, p, "lstm", self.FRAME_DIM, LSTM_HIDDEN)
        p["fc_w"] = _glorot(rng, (LSTM_HIDDEN, N_CLASSES), LSTM_HIDDEN, N_CLASSES)
        p["fc_b"] = np.zeros(N_CLASSES)
        self.params = p
        self._cache = None

    def forward(self, seqs: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        if seqs.ndim != 3 or seqs.shape[2] != TAXELS:
            raise DomainError(f"expected (B, T, {TAXELS}) sequences, got {seqs.shape}")
        b, t, _ = seqs.shape
        x = seqs.reshape(b * t, 1, GRID_N, GRID_N)
        x, c_conv1 = layers.conv2d_forward(x, self.params["conv1_w"], self.params["conv1_b"])
        x, c_act1 = layers.relu_forward(x)
        x, c_conv2 = layers.conv2d_forward(x, self.params["conv2_w"], self.params["conv2_b"])
        x, c_act2 = layers.relu_forward(x)
        x, c_pool = layers.maxpool2x2_forward(x)
        frames = x.reshape(b, t, self.FRAME_DIM)
        h_all, c_lstm = layers.lstm_forward(
            frames, self.params["lstm_wx"], self.params["lstm_wh"], self.params["lstm_b"])
        rows = np.arange(b)
        last = lengths - 1
        logits, c_fc = layers.dense_forward(
            h_all[rows, last], self.params["fc_w"], self.params["fc_b"])
        self._cache = (c_conv1, c_act1, c_conv2, c_act2, c_pool,
                       c_lstm, c_fc, h_all.shape, last, (b, t))
        return logits

    def backward(self, dlogits: np.ndarray) -> dict:
        (c_conv1, c_act1, c_conv2, c_act2, c_pool,
         c_lstm, c_fc, h_shape, last, (b, t)) = self._cache
        grads = {}
        dh_last, grads["fc_w"], grads["fc_b"] = layers.dense_backward(dlogits, c_fc)
        dh_all = np.zeros(h_shape, dtype=np.float64)
        dh_all[np.arange(b), last] = dh_last
        dframes, grads["lstm_wx"], grads["lstm_wh"], grads["lstm_b"] = \
            layers.lstm_backward(dh_all, c_lstm)
        dx = dframes.reshape(b * t, 16, GRID_N // 2, GRID_N // 2)
        dx = layers.maxpool2x2_backward(dx, c_pool)
        dx = layers.relu_backward(dx, c_act2)
        dx, grads["conv2_w"], grads["conv2_b"] = layers.conv2d_backward(dx, c_conv2)
        dx = layers.relu_backward(dx, c_act1)
        _, grads["conv1_w"], grads["conv1_b"] = layers.conv2d_backward(dx, c_conv1)
        return grads


NET_KINDS = {
    CnnMhiNet.KIND: CnnMhiNet,
    LstmNet.KIND: LstmNet,
    CnnLstmNet.KIND: CnnLstmNet,
}
