"""Dense float64 matrices with reverse-mode gradients.

Every tensor is a 2-D row-major float64 array. Vectors are single-row
matrices, scalars are 1x1. Operations record a computation graph which
`backward` walks in reverse topological order; fused ops (lstm_cell,
dot_attention) exist for the training hot path and carry hand-derived
backward rules that the test suite checks against finite differences.
"""

from __future__ import annotations

import numpy as np

LOG_CLAMP = 1e-12


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class GraphError(RuntimeError):
    """Computation graph misuse (e.g. non-scalar backward root)."""


_grad_enabled = True


class no_grad:
    """Context manager that disables graph recording (values only)."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False
        return self

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


def _as_value(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    elif a.ndim != 2:
        raise ShapeError(f"tensors are 2-D; got array of shape {a.shape}")
    return a


class Tensor:
    """Node in the computation graph: a value plus an optional backward rule."""

    __slots__ = ("value", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, value, requires_grad=False, _parents=(), _backward=None):
        self.value = _as_value(value)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self) -> tuple[int, int]:
        return self.value.shape

    @property
    def rows(self) -> int:
        return self.value.shape[0]

    @property
    def cols(self) -> int:
        return self.value.shape[1]

    def item(self) -> float:
        if self.value.size != 1:
            raise ShapeError(f"item() needs a scalar tensor, got shape {self.shape}")
        return float(self.value[0, 0])

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(as_tensor(other), -1.0))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __matmul__(self, other):
        return matmul(self, other)


class Parameter(Tensor):
    """Trainable tensor with gradient and Adam/AMSGrad state."""

    __slots__ = ("name", "m", "v", "vhat_max", "step_count")

    def __init__(self, value, name: str = "param"):
        super().__init__(value, requires_grad=True)
        self.name = name
        self.grad = np.zeros_like(self.value)
        self.m = np.zeros_like(self.value)
        self.v = np.zeros_like(self.value)
        self.vhat_max = np.zeros_like(self.value)
        self.step_count = 0

    def zero_grad(self):
        self.grad[...] = 0.0

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.shape})"


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _accum(t: Tensor, g: np.ndarray):
    if t.grad is None:
        t.grad = np.zeros_like(t.value)
    t.grad += g


def _make(value, parents, backward_fn) -> Tensor:
    if _grad_enabled and any(p.requires_grad for p in parents):
        return Tensor(value, requires_grad=True, _parents=tuple(parents), _backward=backward_fn)
    return Tensor(value)


def _unbroadcast(g: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    if g.shape == shape:
        return g
    out = g
    for ax in (0, 1):
        if shape[ax] == 1 and out.shape[ax] != 1:
            out = out.sum(axis=ax, keepdims=True)
    return out


# ---------------------------------------------------------------------------
# Elementwise and linear ops
# ---------------------------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_val = a.value + b.value

    def bwd(grad):
        if a.requires_grad:
            _accum(a, _unbroadcast(grad, a.shape))
        if b.requires_grad:
            _accum(b, _unbroadcast(grad, b.shape))

    return _make(out_val, (a, b), bwd)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_val = a.value * b.value

    def bwd(grad):
        if a.requires_grad:
            _accum(a, _unbroadcast(grad * b.value, a.shape))
        if b.requires_grad:
            _accum(b, _unbroadcast(grad * a.value, b.shape))

    return _make(out_val, (a, b), bwd)


def scale(a, c: float) -> Tensor:
    a = as_tensor(a)
    c = float(c)

    def bwd(grad):
        if a.requires_grad:
            _accum(a, grad * c)

    return _make(a.value * c, (a,), bwd)


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.cols != b.rows:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")
    out_val = a.value @ b.value

    def bwd(grad):
        if a.requires_grad:
            _accum(a, grad @ b.value.T)
        if b.requires_grad:
            _accum(b, a.value.T @ grad)

    return _make(out_val, (a, b), bwd)


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out_val = np.tanh(a.value)

    def bwd(grad):
        if a.requires_grad:
            _accum(a, grad * (1.0 - out_val * out_val))

    return _make(out_val, (a,), bwd)


def _sigmoid_values(x: np.ndarray) -> np.ndarray:
    # exp overflow for very negative inputs saturates to exactly 0.0
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    out_val = _sigmoid_values(a.value)

    def bwd(grad):
        if a.requires_grad:
            _accum(a, grad * out_val * (1.0 - out_val))

    return _make(out_val, (a,), bwd)


def log(a) -> Tensor:
    """Natural log with inputs clamped at LOG_CLAMP to avoid -inf."""
    a = as_tensor(a)
    clamped = np.maximum(a.value, LOG_CLAMP)
    out_val = np.log(clamped)

    def bwd(grad):
        if a.requires_grad:
            _accum(a, grad / clamped)

    return _make(out_val, (a,), bwd)


# ---------------------------------------------------------------------------
# Structural ops
# ---------------------------------------------------------------------------


def concat_cols(tensors) -> Tensor:
    ts = [as_tensor(t) for t in tensors]
    if not ts:
        raise ShapeError("concat_cols of an empty list")
    n = ts[0].rows
    if any(t.rows != n for t in ts):
        raise ShapeError(f"concat_cols: row counts differ: {[t.shape for t in ts]}")
    out_val = np.concatenate([t.value for t in ts], axis=1)
    offsets = np.cumsum([0] + [t.cols for t in ts])

    def bwd(grad):
        for t, lo, hi in zip(ts, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                _accum(t, grad[:, lo:hi])

    return _make(out_val, ts, bwd)


def slice_cols(a, lo: int, hi: int) -> Tensor:
    a = as_tensor(a)
    if not (0 <= lo <= hi <= a.cols):
        raise ShapeError(f"slice_cols [{lo}:{hi}] out of range for shape {a.shape}")
    out_val = a.value[:, lo:hi].copy()

    def bwd(grad):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.value)
            a.grad[:, lo:hi] += grad

    return _make(out_val, (a,), bwd)


def take_rows(a, indices) -> Tensor:
    """Row gather (embedding lookup). Gradient scatter-adds into the source."""
    a = as_tensor(a)
    idx = np.asarray(indices, dtype=np.intp)
    if idx.ndim != 1:
        raise ShapeError("take_rows expects a flat index array")
    if idx.size and (idx.min() < 0 or idx.max() >= a.rows):
        raise IndexError(f"take_rows: index out of range for {a.rows} rows")
    out_val = a.value[idx]

    def bwd(grad):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.value)
            np.add.at(a.grad, idx, grad)

    return _make(out_val, (a,), bwd)


def row_sum(a) -> Tensor:
    a = as_tensor(a)
    out_val = a.value.sum(axis=1, keepdims=True)

    def bwd(grad):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.value)
            a.grad += grad  # (n,1) broadcasts across columns

    return _make(out_val, (a,), bwd)


def sum_all(a) -> Tensor:
    a = as_tensor(a)
    out_val = np.array([[a.value.sum()]])

    def bwd(grad):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.value)
            a.grad += grad[0, 0]

    return _make(out_val, (a,), bwd)


def mean_all(a) -> Tensor:
    a = as_tensor(a)
    return scale(sum_all(a), 1.0 / a.value.size)


def l2_norm(a) -> Tensor:
    """Euclidean norm over all entries, as a scalar tensor."""
    a = as_tensor(a)
    n = float(np.sqrt((a.value * a.value).sum()))
    out_val = np.array([[n]])

    def bwd(grad):
        if a.requires_grad and n > 0.0:
            _accum(a, (grad[0, 0] / n) * a.value)

    return _make(out_val, (a,), bwd)


# ---------------------------------------------------------------------------
# Softmax and cross-entropy
# ---------------------------------------------------------------------------


def softmax(a) -> Tensor:
    """Row-wise softmax with max subtraction for stability."""
    a = as_tensor(a)
    if a.cols == 0:
        raise ValueError("softmax of an empty vector")
    shifted = a.value - a.value.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    out_val = e / e.sum(axis=1, keepdims=True)

    def bwd(grad):
        if a.requires_grad:
            inner = (grad * out_val).sum(axis=1, keepdims=True)
            _accum(a, out_val * (grad - inner))

    return _make(out_val, (a,), bwd)


def masked_softmax(a, mask) -> Tensor:
    """Row-wise softmax over unmasked entries; masked entries are exactly 0.

    `mask` is a boolean array, True where the entry participates. Rows with
    no unmasked entry are a caller bug.
    """
    a = as_tensor(a)
    m = np.asarray(mask, dtype=bool)
    if m.shape != a.shape:
        raise ShapeError(f"mask shape {m.shape} does not match {a.shape}")
    if not m.any(axis=1).all():
        raise GraphError("masked_softmax: a row has every entry masked")
    neg = np.where(m, a.value, -np.inf)
    shifted = neg - neg.max(axis=1, keepdims=True)
    e = np.where(m, np.exp(np.where(m, shifted, 0.0)), 0.0)
    out_val = e / e.sum(axis=1, keepdims=True)

    def bwd(grad):
        if a.requires_grad:
            inner = (grad * out_val).sum(axis=1, keepdims=True)
            _accum(a, out_val * (grad - inner))

    return _make(out_val, (a,), bwd)


def cross_entropy(p, target_index: int) -> Tensor:
    """-ln p[target] for a probability row vector, input clamped at LOG_CLAMP."""
    p = as_tensor(p)
    if p.rows != 1:
        raise ShapeError(f"cross_entropy expects a row vector, got {p.shape}")
    if not (0 <= target_index < p.cols):
        raise IndexError(f"target index {target_index} out of range for {p.cols} classes")
    clamped = max(float(p.value[0, target_index]), LOG_CLAMP)
    out_val = np.array([[-np.log(clamped)]])

    def bwd(grad):
        if p.requires_grad:
            if p.grad is None:
                p.grad = np.zeros_like(p.value)
            p.grad[0, target_index] += grad[0, 0] * (-1.0 / clamped)

    return _make(out_val, (p,), bwd)


def cross_entropy_rows(p, targets, weights) -> Tensor:
    """Weighted sum of per-row -ln p[i, targets[i]]; weights are plain floats.

    Callers fold any normalization (1/token count, PAD masking) into
    `weights`, so the result is a ready-to-use scalar loss.
    """
    p = as_tensor(p)
    idx = np.asarray(targets, dtype=np.intp)
    w = np.asarray(weights, dtype=np.float64)
    if idx.shape != (p.rows,) or w.shape != (p.rows,):
        raise ShapeError(f"targets/weights must be flat arrays of length {p.rows}")
    if idx.size and (idx.min() < 0 or idx.max() >= p.cols):
        raise IndexError(f"target index out of range for {p.cols} classes")
    rows = np.arange(p.rows)
    picked = np.maximum(p.value[rows, idx], LOG_CLAMP)
    out_val = np.array([[float((w * -np.log(picked)).sum())]])

    def bwd(grad):
        if p.requires_grad:
            if p.grad is None:
                p.grad = np.zeros_like(p.value)
            np.add.at(p.grad, (rows, idx), grad[0, 0] * (-w / picked))

    return _make(out_val, (p,), bwd)


# ---------------------------------------------------------------------------
# Fused ops for the recurrent hot path
# ---------------------------------------------------------------------------


def _lstm_forward(xv, hv, cv, wxv, whv, bv):
    hd = hv.shape[1]
    gates = xv @ wxv
    gates += hv @ whv
    gates += bv
    sig = _sigmoid_values(gates[:, : 3 * hd])
    ig = sig[:, :hd]
    fg = sig[:, hd : 2 * hd]
    og = sig[:, 2 * hd :]
    gg = np.tanh(gates[:, 3 * hd :])
    c_new = fg * cv + ig * gg
    tc = np.tanh(c_new)
    h_new = og * tc
    return h_new, c_new, ig, fg, gg, og, tc


def lstm_step_values(xv, hv, cv, wxv, whv, bv) -> tuple[np.ndarray, np.ndarray]:
    """Plain-array LSTM step (no graph); same math as lstm_cell."""
    h_new, c_new, *_ = _lstm_forward(xv, hv, cv, wxv, whv, bv)
    return h_new, c_new


def lstm_cell(x, h, c, w_x, w_h, b) -> Tensor:
    """One LSTM step; returns [h' | c'] concatenated as a (batch, 2H) tensor.

    Gate layout in the 4H-wide weights is [input | forget | output | candidate].
    """
    x, h, c = as_tensor(x), as_tensor(h), as_tensor(c)
    w_x, w_h, b = as_tensor(w_x), as_tensor(w_h), as_tensor(b)
    hd = h.cols
    if w_x.cols != 4 * hd or w_h.cols != 4 * hd or b.cols != 4 * hd:
        raise ShapeError(f"lstm_cell: weights must be 4*{hd} wide")
    h_new, c_new, ig, fg, gg, og, tc = _lstm_forward(
        x.value, h.value, c.value, w_x.value, w_h.value, b.value
    )
    out_val = np.concatenate([h_new, c_new], axis=1)

    def bwd(grad):
        dh = grad[:, :hd]
        dc_direct = grad[:, hd:]
        do = dh * tc
        dc_total = dc_direct + dh * og * (1.0 - tc * tc)
        di = dc_total * gg
        df = dc_total * c.value
        dg = dc_total * ig
        d_gates = np.concatenate(
            [
                di * ig * (1.0 - ig),
                df * fg * (1.0 - fg),
                do * og * (1.0 - og),
                dg * (1.0 - gg * gg),
            ],
            axis=1,
        )
        if x.requires_grad:
            _accum(x, d_gates @ w_x.value.T)
        if h.requires_grad:
            _accum(h, d_gates @ w_h.value.T)
        if c.requires_grad:
            _accum(c, dc_total * fg)
        if w_x.requires_grad:
            _accum(w_x, x.value.T @ d_gates)
        if w_h.requires_grad:
            _accum(w_h, h.value.T @ d_gates)
        if b.requires_grad:
            _accum(b, d_gates.sum(axis=0, keepdims=True))

    return _make(out_val, (x, h, c, w_x, w_h, b), bwd)


def dot_attention(query, states, mask, stacked=None) -> tuple[Tensor, np.ndarray]:
    """Dot-product attention of `query` (B,H) over per-step `states` [(B,H)].

    Energies are query.state dot products; `mask` (B,T boolean) excludes
    positions from the softmax so their weights are exactly zero. Returns
    the context tensor and the weights as a plain array (the graph flows
    through the context only). `stacked` may carry the states prestacked
    as (B,T,H) when the caller runs many steps over the same states.
    """
    q = as_tensor(query)
    hs = [as_tensor(s) for s in states]
    if stacked is None:
        stacked = np.stack([s.value for s in hs], axis=1)  # (B, T, H)
    m = np.asarray(mask, dtype=bool)
    if m.shape != stacked.shape[:2]:
        raise ShapeError(f"mask shape {m.shape} does not match (batch, steps) {stacked.shape[:2]}")
    if not m.any(axis=1).all():
        raise GraphError("dot_attention: an example has every position masked")
    energies = np.einsum("bh,bth->bt", q.value, stacked)
    neg = np.where(m, energies, -np.inf)
    shifted = neg - neg.max(axis=1, keepdims=True)
    e = np.where(m, np.exp(np.where(m, shifted, 0.0)), 0.0)
    alpha = e / e.sum(axis=1, keepdims=True)
    context = np.einsum("bt,bth->bh", alpha, stacked)

    def bwd(grad):
        d_alpha = np.einsum("bh,bth->bt", grad, stacked)
        d_states = np.einsum("bt,bh->bth", alpha, grad)
        inner = (alpha * d_alpha).sum(axis=1, keepdims=True)
        d_energy = alpha * (d_alpha - inner)
        if q.requires_grad:
            _accum(q, np.einsum("bt,bth->bh", d_energy, stacked))
        d_states += np.einsum("bt,bh->bth", d_energy, q.value)
        for t, s in enumerate(hs):
            if s.requires_grad:
                _accum(s, d_states[:, t, :])

    ctx = _make(context, (q, *hs), bwd)
    return ctx, alpha


# ---------------------------------------------------------------------------
# Backward pass
# ---------------------------------------------------------------------------


def backward(root: Tensor):
    """Reverse-mode sweep from a scalar root, accumulating into .grad fields."""
    if root.value.size != 1:
        raise GraphError(f"backward root must be a scalar, got shape {root.shape}")
    if not root.requires_grad:
        return
    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    root.grad = np.ones_like(root.value)
    for node in reversed(topo):
        if node._backward is not None:
            node._backward(node.grad)
