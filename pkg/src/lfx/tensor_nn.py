"""Dense-tensor numeric kernels: layers, activations, loss, Adam, grad checks.

Everything trains in float64 with explicit hand-written backward passes; there
is no autodiff dependency. `grad_check` verifies every backward against
central finite differences. All randomness comes through caller-supplied
numpy Generators, so identical seeds give bit-identical trajectories on a
single thread.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
BCE_CLAMP = 1e-12


class ShapeMismatch(ValueError):
    pass


class InvalidRate(ValueError):
    pass


class NonFiniteTensor(FloatingPointError):
    pass


def assert_finite(x: np.ndarray, what: str = "tensor") -> None:
    """Debug assertion for NaN/Inf contamination."""
    if not np.all(np.isfinite(x)):
        raise NonFiniteTensor(f"{what} contains non-finite values")


# --- activations ------------------------------------------------------------

def relu(x):
    return np.maximum(0.0, x)


def sigmoid(x):
    """Overflow-safe logistic; saturates to exactly 0/1 for large |x|."""
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def tanh(x):
    return np.tanh(x)


# --- kernel ops -------------------------------------------------------------

def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """out[n, j] = sum_i x[n, i] * w[i, j] + b[j]."""
    if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[0]:
        raise ShapeMismatch(f"dense: x {x.shape} vs w {w.shape}")
    if b.shape != (w.shape[1],):
        raise ShapeMismatch(f"dense: bias {b.shape} vs out width {w.shape[1]}")
    return x @ w + b


def lstm_step(x, h_prev, c_prev, wx, wh, b):
    """One LSTM cell step. Gate layout in the fused affine output: [i|f|g|o].

    i, f, o are sigmoid gates; g is the tanh candidate.
    c_t = f * c_prev + i * g;  h_t = o * tanh(c_t).
    """
    units = h_prev.shape[1]
    if wx.shape != (x.shape[1], 4 * units) or wh.shape != (units, 4 * units):
        raise ShapeMismatch(
            f"lstm: x {x.shape}, h {h_prev.shape}, wx {wx.shape}, wh {wh.shape}"
        )
    z = x @ wx + h_prev @ wh + b
    i = sigmoid(z[:, :units])
    f = sigmoid(z[:, units : 2 * units])
    g = tanh(z[:, 2 * units : 3 * units])
    o = sigmoid(z[:, 3 * units :])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c, (i, f, g, o, c)


def conv2d_forward(x: np.ndarray, kernels: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Valid (no padding) stride-1 cross-correlation over NCHW input."""
    if x.ndim != 4 or kernels.ndim != 4 or x.shape[1] != kernels.shape[1]:
        raise ShapeMismatch(f"conv2d: x {x.shape} vs kernels {kernels.shape}")
    k = kernels.shape[2]
    if k != kernels.shape[3] or k > x.shape[2] or k > x.shape[3]:
        raise ShapeMismatch(f"conv2d: kernel {k} too large for input {x.shape}")
    cols = _im2col(x, k)  # (B, C*k*k, H'*W')
    n_out = kernels.shape[0]
    h_out = x.shape[2] - k + 1
    w_out = x.shape[3] - k + 1
    flat = kernels.reshape(n_out, -1)
    out = np.matmul(flat, cols) + b.reshape(1, n_out, 1)
    return out.reshape(x.shape[0], n_out, h_out, w_out)


def _im2col(x, k):
    batch, chans, height, width = x.shape
    h_out, w_out = height - k + 1, width - k + 1
    cols = np.empty((batch, chans, k, k, h_out, w_out), dtype=x.dtype)
    for di in range(k):
        for dj in range(k):
            cols[:, :, di, dj] = x[:, :, di : di + h_out, dj : dj + w_out]
    return cols.reshape(batch, chans * k * k, h_out * w_out)


def _col2im(dcols, x_shape, k):
    batch, chans, height, width = x_shape
    h_out, w_out = height - k + 1, width - k + 1
    dcols = dcols.reshape(batch, chans, k, k, h_out, w_out)
    dx = np.zeros(x_shape, dtype=dcols.dtype)
    for di in range(k):
        for dj in range(k):
            dx[:, :, di : di + h_out, dj : dj + w_out] += dcols[:, :, di, dj]
    return dx


def dropout(x: np.ndarray, rate: float, rng: np.random.Generator, training: bool):
    """Inverted dropout: survivors scaled by 1/(1-rate); identity at inference.

    Returns (output, mask); mask is None in inference mode.
    """
    if not 0.0 <= rate < 1.0:
        raise InvalidRate(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x, None
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def bce_loss(p: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient w.r.t. p.

    p is clamped to [BCE_CLAMP, 1 - BCE_CLAMP] before the logs, so endpoint
    scores never produce NaN. Returns (loss, dL/dp).
    """
    if p.shape != y.shape:
        raise ShapeMismatch(f"bce: p {p.shape} vs y {y.shape}")
    pc = np.clip(p, BCE_CLAMP, 1.0 - BCE_CLAMP)
    n = p.size
    loss = -float(np.sum(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))) / n
    grad = (-(y / pc) + (1.0 - y) / (1.0 - pc)) / n
    return loss, grad


# --- optimizer --------------------------------------------------------------

class Adam:
    """Adam over a dict of named parameter arrays, updated in place."""

    def __init__(self, params: dict[str, np.ndarray], lr=0.0005,
                 beta1=ADAM_BETA1, beta2=ADAM_BETA2, eps=ADAM_EPS):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for name, theta in self.params.items():
            g = grads[name]
            if g.shape != theta.shape:
                raise ShapeMismatch(f"adam: grad {name} {g.shape} vs param {theta.shape}")
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            theta -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


def adam_step(params, grads, opt: Adam) -> None:
    """Functional alias kept for symmetry with the kernel ops."""
    opt.step(grads)


# --- layers -----------------------------------------------------------------

def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    """Forward/backward pair with named parameters. Subclasses cache what
    backward needs during forward."""

    def forward(self, x, training=False):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def params(self) -> dict[str, np.ndarray]:
        return {}

    def grads(self) -> dict[str, np.ndarray]:
        return {}


class Dense(Layer):
    def __init__(self, n_in, n_out, rng):
        self.w = glorot_uniform(rng, n_in, n_out, (n_in, n_out))
        self.b = np.zeros(n_out)
        self._x = None
        self.dw = None
        self.db = None

    def forward(self, x, training=False):
        self._x = x
        return dense_forward(x, self.w, self.b)

    def backward(self, dout):
        self.dw = self._x.T @ dout
        self.db = dout.sum(axis=0)
        return dout @ self.w.T

    def params(self):
        return {"w": self.w, "b": self.b}

    def grads(self):
        return {"w": self.dw, "b": self.db}


class ReLU(Layer):
    def forward(self, x, training=False):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dout):
        return dout * self._mask


class SigmoidLayer(Layer):
    def forward(self, x, training=False):
        self._out = sigmoid(x)
        return self._out

    def backward(self, dout):
        return dout * self._out * (1.0 - self._out)


class Dropout(Layer):
    def __init__(self, rate, rng):
        if not 0.0 <= rate < 1.0:
            raise InvalidRate(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self.rng = rng
        self._mask = None

    def forward(self, x, training=False):
        out, self._mask = dropout(x, self.rate, self.rng, training)
        return out

    def backward(self, dout):
        if self._mask is None:
            return dout
        return dout * self._mask


class Flatten(Layer):
    def forward(self, x, training=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        return dout.reshape(self._shape)


class LSTM(Layer):
    """LSTM over a (batch, time, features) block with full BPTT.

    return_sequences=True emits every step's hidden state; otherwise only
    the final one.
    """

    def __init__(self, n_in, units, rng, return_sequences=False):
        self.units = units
        self.return_sequences = return_sequences
        self.wx = glorot_uniform(rng, n_in, 4 * units, (n_in, 4 * units))
        self.wh = glorot_uniform(rng, units, 4 * units, (units, 4 * units))
        self.b = np.zeros(4 * units)

    def forward(self, x, training=False):
        batch, steps, _ = x.shape
        u = self.units
        self._x = x
        self._h = np.zeros((steps + 1, batch, u))
        self._c = np.zeros((steps + 1, batch, u))
        self._gates = np.empty((steps, batch, 4 * u))
        for t in range(steps):
            h, c, (i, f, g, o, _) = lstm_step(
                x[:, t], self._h[t], self._c[t], self.wx, self.wh, self.b
            )
            self._h[t + 1] = h
            self._c[t + 1] = c
            self._gates[t, :, :u] = i
            self._gates[t, :, u : 2 * u] = f
            self._gates[t, :, 2 * u : 3 * u] = g
            self._gates[t, :, 3 * u :] = o
        if self.return_sequences:
            return self._h[1:].transpose(1, 0, 2)
        return self._h[-1]

    def backward(self, dout):
        x, u = self._x, self.units
        batch, steps, _ = x.shape
        if self.return_sequences:
            dh_seq = dout.transpose(1, 0, 2)
        else:
            dh_seq = np.zeros((steps, batch, u))
            dh_seq[-1] = dout

        self.dwx = np.zeros_like(self.wx)
        self.dwh = np.zeros_like(self.wh)
        self.db = np.zeros_like(self.b)
        dx = np.empty_like(x)
        dh_next = np.zeros((batch, u))
        dc_next = np.zeros((batch, u))
        for t in range(steps - 1, -1, -1):
            i = self._gates[t, :, :u]
            f = self._gates[t, :, u : 2 * u]
            g = self._gates[t, :, 2 * u : 3 * u]
            o = self._gates[t, :, 3 * u :]
            c = self._c[t + 1]
            c_prev = self._c[t]
            tanh_c = np.tanh(c)

            dh = dh_seq[t] + dh_next
            dc = dc_next + dh * o * (1.0 - tanh_c ** 2)
            do = dh * tanh_c
            di = dc * g
            dg = dc * i
            df = dc * c_prev

            dz = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g ** 2),
                    do * o * (1.0 - o),
                ],
                axis=1,
            )
            self.dwx += x[:, t].T @ dz
            self.dwh += self._h[t].T @ dz
            self.db += dz.sum(axis=0)
            dx[:, t] = dz @ self.wx.T
            dh_next = dz @ self.wh.T
            dc_next = dc * f
        return dx

    def params(self):
        return {"wx": self.wx, "wh": self.wh, "b": self.b}

    def grads(self):
        return {"wx": self.dwx, "wh": self.dwh, "b": self.db}


class Conv2d(Layer):
    def __init__(self, c_in, c_out, k, rng):
        fan_in = c_in * k * k
        fan_out = c_out * k * k
        self.k = k
        self.w = glorot_uniform(rng, fan_in, fan_out, (c_out, c_in, k, k))
        self.b = np.zeros(c_out)

    def forward(self, x, training=False):
        self._x_shape = x.shape
        self._cols = _im2col(x, self.k)
        n_out = self.w.shape[0]
        h_out = x.shape[2] - self.k + 1
        w_out = x.shape[3] - self.k + 1
        out = np.matmul(self.w.reshape(n_out, -1), self._cols) + self.b.reshape(1, n_out, 1)
        return out.reshape(x.shape[0], n_out, h_out, w_out)

    def backward(self, dout):
        n_out = self.w.shape[0]
        dflat = dout.reshape(dout.shape[0], n_out, -1)  # (B, O, L)
        self.dw = np.matmul(dflat, self._cols.transpose(0, 2, 1)).sum(axis=0).reshape(self.w.shape)
        self.db = dflat.sum(axis=(0, 2))
        dcols = np.matmul(self.w.reshape(n_out, -1).T, dflat)
        return _col2im(dcols, self._x_shape, self.k)

    def params(self):
        return {"w": self.w, "b": self.b}

    def grads(self):
        return {"w": self.dw, "b": self.db}


class Sequential(Layer):
    def __init__(self, layers: list[Layer]):
        self.layers = layers

    def forward(self, x, training=False):
        for layer in self.layers:
            x = layer.forward(x, training=training)
        return x

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def params(self):
        out = {}
        for idx, layer in enumerate(self.layers):
            for name, value in layer.params().items():
                out[f"{idx}.{name}"] = value
        return out

    def grads(self):
        out = {}
        for idx, layer in enumerate(self.layers):
            for name, value in layer.grads().items():
                out[f"{idx}.{name}"] = value
        return out


# --- gradient verification --------------------------------------------------

def grad_check(model: Layer, x: np.ndarray, h: float = 1e-5, rng=None) -> dict:
    """Compare analytic gradients against central finite differences.

    Uses the scalar probe loss L = sum(forward(x) * r) for a fixed random r,
    so dL/d(out) = r. Checks every parameter and every input element; returns
    {"max_rel_error": float, "per_param": {name: err}}.
    """
    rng = rng or np.random.default_rng(0)
    out = model.forward(x, training=False)
    r = rng.standard_normal(out.shape)
    model.forward(x, training=False)
    dx = model.backward(r.copy())
    analytic = {name: g.copy() for name, g in model.grads().items()}
    analytic["__input__"] = dx

    def loss_at():
        return float(np.sum(model.forward(x, training=False) * r))

    report = {}
    targets = dict(model.params())
    targets["__input__"] = x
    for name, tensor in targets.items():
        numeric = np.empty_like(tensor)
        flat = tensor.reshape(-1)
        num_flat = numeric.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up = loss_at()
            flat[idx] = orig - h
            down = loss_at()
            flat[idx] = orig
            num_flat[idx] = (up - down) / (2.0 * h)
        a = analytic[name]
        denom = np.maximum(np.abs(a) + np.abs(numeric), 1.0)
        report[name] = float(np.max(np.abs(a - numeric) / denom))
    return {"max_rel_error": max(report.values()), "per_param": report}


# --- checkpoint format ------------------------------------------------------
#
# magic | uint32 LE header length | JSON header | raw little-endian float64
# tensor data in header order, C layout. Loading restores bit-identical
# inference outputs.

CHECKPOINT_MAGIC = b"LFXCKPT1"


def save_checkpoint(path, arch: dict, tensors: dict[str, np.ndarray]) -> None:
    names = sorted(tensors)
    header = {
        "arch": arch,
        "tensors": [{"name": n, "shape": list(tensors[n].shape)} for n in names],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for name in names:
            fh.write(np.ascontiguousarray(tensors[name], dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if data[:8] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    (hlen,) = struct.unpack("<I", data[8:12])
    header = json.loads(data[12 : 12 + hlen])
    offset = 12 + hlen
    tensors = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(shape)
        tensors[entry["name"]] = arr.astype(np.float64)
        offset += count * 8
    return header["arch"], tensors
