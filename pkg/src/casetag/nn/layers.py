"""Differentiable layers: embeddings, affine, LSTM, BiLSTM, char CNN, dropout.

Initialization: uniform ±sqrt(6/(fan_in+fan_out)) for matrices, zeros for
biases, forget-gate bias 1.0.  Every layer exposes named_params() with
stable identifiers used by the serialization container.
"""

from __future__ import annotations

import numpy as np

from casetag.errors import ConfigError, InputError
from casetag.nn.tensor import DTYPE, Tensor, concat, stack, zeros


def glorot(shape: tuple[int, int], rng: np.random.Generator) -> Tensor:
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return Tensor(rng.uniform(-limit, limit, size=shape).astype(DTYPE), requires_grad=True)


class Linear:
    """y = W x + b with W of shape (out_dim, in_dim)."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.W = glorot((out_dim, in_dim), rng)
        self.b = zeros((out_dim,), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.in_dim:
            raise ConfigError(
                f"linear layer expects inner dimension {self.in_dim}, "
                f"got input shape {x.shape} against weight shape {self.W.shape}")
        return x @ self.W.T + self.b

    def named_params(self):
        return [("W", self.W), ("b", self.b)]


class Embedding:
    """Row-lookup table; ids index rows of a (count, dim) matrix."""

    def __init__(self, count: int, dim: int, rng: np.random.Generator):
        self.table = glorot((count, dim), rng)

    def __call__(self, ids) -> Tensor:
        return self.table[np.asarray(ids, dtype=np.intp)]

    def named_params(self):
        return [("table", self.table)]


class LSTMCell:
    """Standard gated cell; gate blocks ordered input, forget, candidate, output."""

    def __init__(self, in_dim: int, hidden_dim: int, rng: np.random.Generator):
        self.in_dim = in_dim
        self.hidden_dim = hidden_dim
        self.W_ih = glorot((4 * hidden_dim, in_dim), rng)
        self.W_hh = glorot((4 * hidden_dim, hidden_dim), rng)
        b = np.zeros(4 * hidden_dim, dtype=DTYPE)
        b[hidden_dim:2 * hidden_dim] = 1.0
        self.b = Tensor(b, requires_grad=True)

    def step(self, x: Tensor, h: Tensor, c: Tensor) -> tuple[Tensor, Tensor]:
        gates = self.W_ih @ x + self.W_hh @ h + self.b
        return self._apply_gates(gates, c)

    def _apply_gates(self, gates: Tensor, c: Tensor) -> tuple[Tensor, Tensor]:
        H = self.hidden_dim
        i = gates[0:H].sigmoid()
        f = gates[H:2 * H].sigmoid()
        g = gates[2 * H:3 * H].tanh()
        o = gates[3 * H:4 * H].sigmoid()
        c_new = f * c + i * g
        h_new = o * c_new.tanh()
        return h_new, c_new

    def run(self, xs: Tensor, reverse: bool = False) -> Tensor:
        """Run over a (L, in_dim) sequence; returns (L, hidden_dim) states."""
        L = xs.shape[0]
        pre = xs @ self.W_ih.T + self.b  # (L, 4H), input projections hoisted out of the loop
        h = zeros((self.hidden_dim,))
        c = zeros((self.hidden_dim,))
        order = range(L - 1, -1, -1) if reverse else range(L)
        outs: list[Tensor | None] = [None] * L
        for t in order:
            gates = pre[t] + self.W_hh @ h
            h, c = self._apply_gates(gates, c)
            outs[t] = h
        return stack(outs, axis=0)

    def named_params(self):
        return [("W_ih", self.W_ih), ("W_hh", self.W_hh), ("b", self.b)]


class BiLSTM:
    """Concatenates forward and backward LSTM states per position, width 2*hidden."""

    def __init__(self, in_dim: int, hidden_dim: int, rng: np.random.Generator):
        self.hidden_dim = hidden_dim
        self.fwd = LSTMCell(in_dim, hidden_dim, rng)
        self.bwd = LSTMCell(in_dim, hidden_dim, rng)

    def __call__(self, xs: Tensor) -> Tensor:
        if xs.shape[0] == 0:
            raise InputError("BiLSTM over an empty sequence")
        return concat([self.fwd.run(xs), self.bwd.run(xs, reverse=True)], axis=1)

    def named_params(self):
        out = [("fwd." + n, p) for n, p in self.fwd.named_params()]
        out += [("bwd." + n, p) for n, p in self.bwd.named_params()]
        return out


class CharCNN:
    """Width-w convolution over a (n, in_dim) character matrix, tanh, max over positions."""

    def __init__(self, in_dim: int, filters: int, width: int, rng: np.random.Generator):
        if width < 1:
            raise ConfigError(f"kernel width must be >= 1, got {width}")
        self.in_dim = in_dim
        self.filters = filters
        self.width = width
        self.W = glorot((filters, width * in_dim), rng)
        self.b = zeros((filters,), requires_grad=True)

    def __call__(self, chars: Tensor) -> Tensor:
        n = chars.shape[0]
        if n == 0:
            raise InputError("char CNN over an empty character sequence")
        if chars.shape[1] != self.in_dim:
            raise ConfigError(
                f"char CNN expects vectors of dim {self.in_dim}, got {chars.shape[1]}")
        left = (self.width - 1) // 2
        right = self.width - 1 - left
        parts = []
        if left:
            parts.append(zeros((left, self.in_dim)))
        parts.append(chars)
        if right:
            parts.append(zeros((right, self.in_dim)))
        padded = concat(parts, axis=0) if len(parts) > 1 else chars
        windows = concat([padded[i:i + n] for i in range(self.width)], axis=1)  # (n, w*in_dim)
        acts = (windows @ self.W.T + self.b).tanh()  # (n, filters)
        return acts.max(axis=0)

    def named_params(self):
        return [("W", self.W), ("b", self.b)]


def dropout(x: Tensor, rate: float, rng: np.random.Generator | None, train: bool) -> Tensor:
    """Inverted dropout: identity in eval mode, survivors scaled by 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ConfigError(f"dropout rate must be in [0, 1), got {rate}")
    if not train or rate == 0.0:
        return x
    if rng is None:
        raise ConfigError("dropout in train mode needs an rng")
    mask = (rng.random(x.shape) >= rate).astype(DTYPE) / (1.0 - rate)
    return x * Tensor(mask)


def prefixed(prefix: str, layer) -> list[tuple[str, Tensor]]:
    return [(f"{prefix}.{name}", p) for name, p in layer.named_params()]
