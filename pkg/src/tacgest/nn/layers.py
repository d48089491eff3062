"""Differentiable layers with explicit forward caches and manual backward passes.

Every forward returns (output, cache); the matching backward consumes the
cache and the upstream gradient.  All math is float64 numpy, which keeps
central-difference gradient checks tight.
"""

from __future__ import annotations

import numpy as np


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ------------------------------------------------------------- convolution

def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, pad: int = 1):
    """Same-size 2d convolution via an im2col matmul.

    x: (B, C, H, W), w: (F, C, KH, KW), b: (F,).  Output (B, F, H, W) for
    3x3 kernels with pad 1.
    """
    B, C, H, W = x.shape
    F, _, KH, KW = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    oh = H + 2 * pad - KH + 1
    ow = W + 2 * pad - KW + 1
    cols = np.empty((B, C, KH * KW, oh, ow), dtype=np.float64)
    k = 0
    for ki in range(KH):
        for kj in range(KW):
            cols[:, :, k] = xp[:, :, ki:ki + oh, kj:kj + ow]
            k += 1
    cols = cols.reshape(B, C * KH * KW, oh * ow)
    wf = w.reshape(F, C * KH * KW)
    out = np.matmul(wf[None], cols).reshape(B, F, oh, ow) + b[None, :, None, None]
    cache = (cols, x.shape, w, pad, (oh, ow))
    return out, cache


def conv2d_backward(dout: np.ndarray, cache):
    cols, x_shape, w, pad, (oh, ow) = cache
    B, C, H, W = x_shape
    F, _, KH, KW = w.shape
    dflat = dout.reshape(B, F, oh * ow)
    db = dflat.sum(axis=(0, 2))
    dwf = np.matmul(dflat, cols.transpose(0, 2, 1)).sum(axis=0)
    dw = dwf.reshape(w.shape)
    wf = w.reshape(F, C * KH * KW)
    dcols = np.matmul(wf.T[None], dflat).reshape(B, C, KH * KW, oh, ow)
    dxp = np.zeros((B, C, H + 2 * pad, W + 2 * pad), dtype=np.float64)
    k = 0
    for ki in range(KH):
        for kj in range(KW):
            dxp[:, :, ki:ki + oh, kj:kj + ow] += dcols[:, :, k]
            k += 1
    dx = dxp[:, :, pad:pad + H, pad:pad + W]
    return dx, dw, db


# ----------------------------------------------------------------- pooling

def maxpool2x2_forward(x: np.ndarray):
    """Non-overlapping 2x2 max pool; odd trailing rows/columns are dropped."""
    B, C, H, W = x.shape
    ho, wo = H // 2, W // 2
    v = x[:, :, :ho * 2, :wo * 2].reshape(B, C, ho, 2, wo, 2)
    v = v.transpose(0, 1, 2, 4, 3, 5).reshape(B, C, ho, wo, 4)
    idx = v.argmax(axis=-1)
    out = np.take_along_axis(v, idx[..., None], axis=-1)[..., 0]
    return out, (x.shape, idx)


def maxpool2x2_backward(dout: np.ndarray, cache):
    x_shape, idx = cache
    B, C, H, W = x_shape
    ho, wo = H // 2, W // 2
    dv = np.zeros((B, C, ho, wo, 4), dtype=np.float64)
    np.put_along_axis(dv, idx[..., None], dout[..., None], axis=-1)
    dx = np.zeros(x_shape, dtype=np.float64)
    dx[:, :, :ho * 2, :wo * 2] = (
        dv.reshape(B, C, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5)
        .reshape(B, C, ho * 2, wo * 2))
    return dx


# ------------------------------------------------------------- activations

def leaky_relu_forward(x: np.ndarray, slope: float = 0.01):
    out = np.where(x > 0, x, slope * x)
    return out, (x > 0, slope)


def leaky_relu_backward(dout: np.ndarray, cache):
    positive, slope = cache
    return np.where(positive, dout, slope * dout)


def relu_forward(x: np.ndarray):
    return np.maximum(x, 0.0), x > 0


def relu_backward(dout: np.ndarray, cache):
    return np.where(cache, dout, 0.0)


# ------------------------------------------------------------------- dense

def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    return x @ w + b, (x, w)


def dense_backward(dout: np.ndarray, cache):
    x, w = cache
    return dout @ w.T, x.T @ dout, dout.sum(axis=0)


# -------------------------------------------------------------------- lstm

def lstm_forward(x: np.ndarray, w_x: np.ndarray, w_h: np.ndarray, b: np.ndarray):
    """Single-layer LSTM over (B, T, D); gates ordered input, forget, cell, output.

    The four gate projections are fused into one matmul per step (plus one
    batched input projection up front).  Returns all hidden states (B, T, H).
    """
    B, T, D = x.shape
    H = w_h.shape[0]
    pre = x @ w_x  # (B, T, 4H)
    h = np.zeros((B, H), dtype=np.float64)
    c = np.zeros((B, H), dtype=np.float64)
    gates = np.empty((T, B, 4 * H), dtype=np.float64)
    c_prev = np.empty((T, B, H), dtype=np.float64)
    h_prev = np.empty((T, B, H), dtype=np.float64)
    tanh_c = np.empty((T, B, H), dtype=np.float64)
    h_all = np.empty((B, T, H), dtype=np.float64)
    for t in range(T):
        z = pre[:, t] + h @ w_h + b
        i = _sigmoid(z[:, :H])
        f = _sigmoid(z[:, H:2 * H])
        g = np.tanh(z[:, 2 * H:3 * H])
        o = _sigmoid(z[:, 3 * H:])
        c_prev[t] = c
        h_prev[t] = h
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        gates[t] = np.concatenate([i, f, g, o], axis=1)
        tanh_c[t] = tc
        h_all[:, t] = h
    cache = (x, w_x, w_h, gates, c_prev, h_prev, tanh_c)
    return h_all, cache


def lstm_backward(dh_all: np.ndarray, cache):
    x, w_x, w_h, gates, c_prev, h_prev, tanh_c = cache
    B, T, D = x.shape
    H = w_h.shape[0]
    dz_all = np.empty((T, B, 4 * H), dtype=np.float64)
    dh_next = np.zeros((B, H), dtype=np.float64)
    dc_next = np.zeros((B, H), dtype=np.float64)
    dw_h = np.zeros_like(w_h)
    for t in range(T - 1, -1, -1):
        i = gates[t][:, :H]
        f = gates[t][:, H:2 * H]
        g = gates[t][:, 2 * H:3 * H]
        o = gates[t][:, 3 * H:]
        tc = tanh_c[t]
        dh = dh_all[:, t] + dh_next
        do = dh * tc
        dc = dh * o * (1.0 - tc * tc) + dc_next
        di = dc * g
        df = dc * c_prev[t]
        dg = dc * i
        dc_next = dc * f
        dz = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ], axis=1)
        dz_all[t] = dz
        dw_h += h_prev[t].T @ dz
        dh_next = dz @ w_h.T
    dz_flat = dz_all.transpose(1, 0, 2).reshape(B * T, 4 * H)
    dw_x = x.reshape(B * T, D).T @ dz_flat
    db = dz_flat.sum(axis=0)
    dx = (dz_flat @ w_x.T).reshape(B, T, D)
    return dx, dw_x, dw_h, db
