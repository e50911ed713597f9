"""Dense N-D tensors with reverse-mode automatic differentiation.

Values are numpy arrays (float32 by default, float64 for gradient checks),
row-major contiguous with the last axis fastest. A ``Node`` wraps one value
plus the bookkeeping needed to backpropagate through the graph that produced
it. Gradients accumulate additively when a node is used more than once.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Node",
    "ShapeError",
    "NumericError",
    "as_node",
    "add",
    "mul",
    "neg",
    "relu",
    "leaky_relu",
    "exp",
    "log",
    "power",
    "sigmoid",
    "softplus",
    "silu",
    "where",
    "matmul",
    "reshape",
    "permute",
    "pad",
    "crop",
    "concat",
    "reduce_sum",
    "reduce_mean",
    "layernorm",
    "softmax",
    "conv3d",
    "conv2d",
    "conv_transpose3d",
    "grad_check",
]


class ShapeError(ValueError):
    """Operand shapes do not satisfy an operation's contract."""


class NumericError(ArithmeticError):
    """Non-finite values or numerically invalid arguments."""


class Node:
    """One tensor in the autodiff graph.

    ``value`` is the forward result, ``grad`` is materialized lazily during
    backward, ``_parents``/``_backward`` record how to push gradients to the
    producing operands. Leaf parameters are Nodes with ``requires_grad=True``
    and no parents.
    """

    __slots__ = ("value", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, value, requires_grad: bool = False):
        v = np.asarray(value)
        if v.dtype not in (np.float32, np.float64):
            v = v.astype(np.float32)
        self.value = v
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple = ()
        self._backward = None

    @property
    def shape(self):
        return self.value.shape

    @property
    def dtype(self):
        return self.value.dtype

    def detach(self) -> "Node":
        return Node(self.value)

    def backward(self) -> None:
        """Reverse-mode pass from a scalar root; visits each node once."""
        if self.value.size != 1:
            raise ShapeError(f"backward() needs a scalar root, got shape {self.shape}")
        if not np.isfinite(self.value).all():
            raise NumericError("backward() from a non-finite scalar")
        order = _toposort(self)
        self.grad = np.ones_like(self.value)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)
                # graph edges are single-use; free them so big runs don't hold
                # every intermediate buffer alive
                node._backward = None
                node._parents = ()

    def zero_grad(self) -> None:
        self.grad = None

    # -- operator sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        return add(self, neg(as_node(other, self.dtype)))

    def __rsub__(self, other):
        return add(neg(self), as_node(other, self.dtype))

    def __matmul__(self, other):
        return matmul(self, other)

    def __pow__(self, exponent):
        return power(self, exponent)

    def reshape(self, *shape):
        return reshape(self, shape[0] if len(shape) == 1 and isinstance(shape[0], (tuple, list)) else shape)

    def transpose(self, *axes):
        return permute(self, axes[0] if len(axes) == 1 and isinstance(axes[0], (tuple, list)) else axes)

    def sum(self, axis=None, keepdims=False):
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return reduce_mean(self, axis=axis, keepdims=keepdims)

    def __repr__(self):
        return f"Node(shape={tuple(self.shape)}, dtype={self.value.dtype.name}, requires_grad={self.requires_grad})"


def _toposort(root: Node) -> list:
    """Iterative post-order: parents appear before children."""
    order: list = []
    seen: set = set()
    stack: list = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        nid = id(node)
        if nid in seen:
            continue
        seen.add(nid)
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def as_node(x, dtype=None) -> Node:
    if isinstance(x, Node):
        return x
    v = np.asarray(x, dtype=dtype if dtype is not None else np.float32)
    return Node(v)


def _accumulate(node: Node, g: np.ndarray) -> None:
    if not node.requires_grad:
        return
    if node.grad is None:
        node.grad = g.astype(node.value.dtype, copy=True)
    else:
        node.grad += g


def _make(value: np.ndarray, parents, backward) -> Node:
    out = Node(value)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape) -> np.ndarray:
    """Sum-reduce a gradient over the axes an operand was broadcast along."""
    if g.shape == tuple(shape):
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _check_broadcast(a_shape, b_shape) -> None:
    for x, y in zip(reversed(a_shape), reversed(b_shape)):
        if x != y and x != 1 and y != 1:
            raise ShapeError(f"shapes {tuple(a_shape)} and {tuple(b_shape)} do not broadcast")


# -- elementwise ---------------------------------------------------------

def add(a, b) -> Node:
    a, b = as_node(a), as_node(b, dtype=a.dtype if isinstance(a, Node) else None)
    _check_broadcast(a.shape, b.shape)
    out_v = a.value + b.value

    def backward(g):
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(g, b.shape))

    return _make(out_v, (a, b), backward)


def mul(a, b) -> Node:
    a, b = as_node(a), as_node(b, dtype=a.dtype if isinstance(a, Node) else None)
    _check_broadcast(a.shape, b.shape)
    out_v = a.value * b.value

    def backward(g):
        _accumulate(a, _unbroadcast(g * b.value, a.shape))
        _accumulate(b, _unbroadcast(g * a.value, b.shape))

    return _make(out_v, (a, b), backward)


def neg(a) -> Node:
    a = as_node(a)

    def backward(g):
        _accumulate(a, -g)

    return _make(-a.value, (a,), backward)


def relu(a) -> Node:
    a = as_node(a)
    mask = a.value > 0
    out_v = np.where(mask, a.value, 0)

    def backward(g):
        _accumulate(a, g * mask)

    return _make(out_v, (a,), backward)


def leaky_relu(a, alpha: float = 0.01) -> Node:
    a = as_node(a)
    mask = a.value > 0
    out_v = np.where(mask, a.value, alpha * a.value)

    def backward(g):
        _accumulate(a, g * np.where(mask, 1.0, alpha).astype(g.dtype))

    return _make(out_v, (a,), backward)


def exp(a) -> Node:
    a = as_node(a)
    out_v = np.exp(a.value)

    def backward(g):
        _accumulate(a, g * out_v)

    return _make(out_v, (a,), backward)


def log(a) -> Node:
    a = as_node(a)
    if np.any(a.value <= 0):
        raise NumericError("log of a non-positive value")
    out_v = np.log(a.value)

    def backward(g):
        _accumulate(a, g / a.value)

    return _make(out_v, (a,), backward)


def power(a, exponent: float) -> Node:
    """a**exponent for a scalar exponent.

    Negative bases are only allowed for integer exponents; fractional
    exponents require a non-negative base.
    """
    a = as_node(a)
    e = float(exponent)
    if e != round(e) and np.any(a.value < 0):
        raise NumericError(f"fractional exponent {e} with negative base")
    out_v = a.value ** e

    def backward(g):
        with np.errstate(divide="ignore", invalid="ignore"):
            d = e * a.value ** (e - 1.0)
        _accumulate(a, g * d)

    return _make(out_v, (a,), backward)


def sigmoid(a) -> Node:
    a = as_node(a)
    v = a.value
    out_v = np.empty_like(v)
    pos = v >= 0
    out_v[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out_v[~pos] = ev / (1.0 + ev)

    def backward(g):
        _accumulate(a, g * out_v * (1.0 - out_v))

    return _make(out_v, (a,), backward)


def softplus(a) -> Node:
    a = as_node(a)
    out_v = np.logaddexp(0.0, a.value).astype(a.dtype)

    def backward(g):
        s = np.empty_like(a.value)
        pos = a.value >= 0
        s[pos] = 1.0 / (1.0 + np.exp(-a.value[pos]))
        ev = np.exp(a.value[~pos])
        s[~pos] = ev / (1.0 + ev)
        _accumulate(a, g * s)

    return _make(out_v, (a,), backward)


def silu(a) -> Node:
    a = as_node(a)
    return mul(a, sigmoid(a))


def where(mask: np.ndarray, a, b) -> Node:
    """Select a where mask else b; mask is a constant, grads route by mask."""
    a, b = as_node(a), as_node(b)
    m = np.asarray(mask, dtype=bool)
    out_v = np.where(m, a.value, b.value)

    def backward(g):
        _accumulate(a, _unbroadcast(g * m, a.shape))
        _accumulate(b, _unbroadcast(g * (~m), b.shape))

    return _make(out_v, (a, b), backward)


# -- linear algebra -------------------------------------------------------

def matmul(a, b) -> Node:
    a, b = as_node(a), as_node(b)
    if a.value.ndim < 2 or b.value.ndim < 2:
        raise ShapeError(f"matmul needs rank >= 2, got {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul inner extents differ: {tuple(a.shape)} @ {tuple(b.shape)}")
    _check_broadcast(a.shape[:-2], b.shape[:-2])
    out_v = a.value @ b.value

    def backward(g):
        _accumulate(a, _unbroadcast(g @ np.swapaxes(b.value, -1, -2), a.shape))
        _accumulate(b, _unbroadcast(np.swapaxes(a.value, -1, -2) @ g, b.shape))

    return _make(out_v, (a, b), backward)


# -- structural ops --------------------------------------------------------

def reshape(a, shape) -> Node:
    a = as_node(a)
    shape = tuple(int(s) for s in shape)
    try:
        out_v = a.value.reshape(shape)
    except ValueError:
        raise ShapeError(f"cannot reshape {tuple(a.shape)} ({a.value.size} elements) to {shape}") from None

    def backward(g):
        _accumulate(a, g.reshape(a.shape))

    return _make(out_v, (a,), backward)


def permute(a, axes) -> Node:
    a = as_node(a)
    axes = tuple(int(x) for x in axes)
    if sorted(axes) != list(range(a.value.ndim)):
        raise ShapeError(f"permute axes {axes} are not a bijection of rank {a.value.ndim}")
    inv = np.argsort(axes)
    out_v = a.value.transpose(axes)

    def backward(g):
        _accumulate(a, g.transpose(inv))

    return _make(out_v, (a,), backward)


def pad(a, pad_width) -> Node:
    """Zero padding; ``pad_width`` is a per-axis (before, after) sequence."""
    a = as_node(a)
    pw = tuple((int(lo), int(hi)) for lo, hi in pad_width)
    if len(pw) != a.value.ndim:
        raise ShapeError(f"pad_width has {len(pw)} entries for rank {a.value.ndim}")
    out_v = np.pad(a.value, pw)
    sl = tuple(slice(lo, lo + n) for (lo, _), n in zip(pw, a.shape))

    def backward(g):
        _accumulate(a, g[sl])

    return _make(out_v, (a,), backward)


def crop(a, slices) -> Node:
    """Slice view of a node; backward scatters into a zero tensor."""
    a = as_node(a)
    sl = tuple(slices)
    out_v = a.value[sl]

    def backward(g):
        full = np.zeros_like(a.value)
        full[sl] = g
        _accumulate(a, full)

    return _make(np.ascontiguousarray(out_v), (a,), backward)


def concat(nodes, axis: int = 0) -> Node:
    nodes = [as_node(n) for n in nodes]
    out_v = np.concatenate([n.value for n in nodes], axis=axis)
    sizes = [n.shape[axis] for n in nodes]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        for n, piece in zip(nodes, np.split(g, splits, axis=axis)):
            _accumulate(n, piece)

    return _make(out_v, tuple(nodes), backward)


def reduce_sum(a, axis=None, keepdims: bool = False) -> Node:
    a = as_node(a)
    out_v = a.value.sum(axis=axis, keepdims=keepdims)
    out_v = np.asarray(out_v, dtype=a.dtype)

    def backward(g):
        gg = g
        if not keepdims and axis is not None:
            axes = axis if isinstance(axis, tuple) else (axis,)
            for ax in sorted(ax % a.value.ndim for ax in axes):
                gg = np.expand_dims(gg, ax)
        _accumulate(a, np.broadcast_to(gg, a.shape).astype(a.value.dtype))

    return _make(out_v, (a,), backward)


def reduce_mean(a, axis=None, keepdims: bool = False) -> Node:
    a = as_node(a)
    if axis is None:
        n = a.value.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        n = int(np.prod([a.shape[ax] for ax in axes]))
    return mul(reduce_sum(a, axis=axis, keepdims=keepdims), 1.0 / n)


# -- normalization / attention helpers --------------------------------------

def layernorm(a, normalized_axes, eps: float = 1e-5, gamma=None, beta=None) -> Node:
    """Zero mean, unit variance along ``normalized_axes``; optional affine."""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    a = as_node(a)
    axes = tuple(ax % a.value.ndim for ax in (normalized_axes if isinstance(normalized_axes, (tuple, list)) else (normalized_axes,)))
    mean = reduce_mean(a, axis=axes, keepdims=True)
    centered = a - mean
    var = reduce_mean(mul(centered, centered), axis=axes, keepdims=True)
    inv_std = power(add(var, np.asarray(eps, dtype=a.dtype)), -0.5)
    out = mul(centered, inv_std)
    if gamma is not None:
        out = mul(out, gamma)
    if beta is not None:
        out = add(out, beta)
    return out


def softmax(a, axis: int = -1) -> Node:
    """Max-subtracted softmax; the subtracted max is treated as a constant,
    which leaves both the value and the gradient unchanged (shift invariance).
    """
    a = as_node(a)
    shift = np.max(a.value, axis=axis, keepdims=True)
    e = exp(add(a, Node(-shift)))
    denom = reduce_sum(e, axis=axis, keepdims=True)
    return mul(e, power(denom, -1.0))


# -- convolutions ------------------------------------------------------------

_COL_CHUNK_BYTES = 256 * 1024 * 1024


def _conv_out_extent(n: int, k: int, s: int, p: int) -> int:
    if k > n + 2 * p:
        raise ShapeError(f"kernel extent {k} exceeds padded input {n + 2 * p}")
    return (n + 2 * p - k) // s + 1


def _im2col(xp: np.ndarray, kshape, stride):
    """(B, C, *spatial_padded) -> (B, prod(out), C*prod(k)) patch matrix."""
    nd = len(kshape)
    win = np.lib.stride_tricks.sliding_window_view(xp, kshape, axis=tuple(range(2, 2 + nd)))
    sl = (slice(None), slice(None)) + tuple(slice(None, None, s) for s in stride)
    win = win[sl]  # (B, C, *out, *k)
    b, c = win.shape[0], win.shape[1]
    out_sp = win.shape[2:2 + nd]
    perm = (0,) + tuple(range(2, 2 + nd)) + (1,) + tuple(range(2 + nd, 2 + 2 * nd))
    col = win.transpose(perm).reshape(b, int(np.prod(out_sp)), c * int(np.prod(kshape)))
    return col, out_sp


def _convnd_forward(x: np.ndarray, w: np.ndarray, b, stride, padding):
    nd = w.ndim - 2
    kshape = w.shape[2:]
    out_sp = tuple(_conv_out_extent(x.shape[2 + i], kshape[i], stride[i], padding[i]) for i in range(nd))
    pw = ((0, 0), (0, 0)) + tuple((p, p) for p in padding)
    xp = np.pad(x, pw) if any(padding) else x
    w2 = w.reshape(w.shape[0], -1)

    bsz = x.shape[0]
    n_out = int(np.prod(out_sp))
    est = bsz * n_out * w2.shape[1] * x.dtype.itemsize
    out = np.empty((bsz, n_out, w.shape[0]), dtype=x.dtype)
    if est <= _COL_CHUNK_BYTES or nd < 2:
        col, _ = _im2col(xp, kshape, stride)
        np.matmul(col, w2.T, out=out)
    else:
        # chunk over the leading output spatial axis to bound the patch matrix
        d_out = out_sp[0]
        rows_per = max(1, _COL_CHUNK_BYTES // max(1, bsz * (n_out // d_out) * w2.shape[1] * x.dtype.itemsize))
        per_slab = n_out // d_out
        for d0 in range(0, d_out, rows_per):
            d1 = min(d_out, d0 + rows_per)
            lo = d0 * stride[0]
            hi = (d1 - 1) * stride[0] + kshape[0]
            colc, _ = _im2col(xp[:, :, lo:hi], kshape, stride)
            out[:, d0 * per_slab:d1 * per_slab] = colc @ w2.T
    if b is not None:
        out += b.reshape(1, 1, -1)
    out = np.moveaxis(out, -1, 1).reshape(bsz, w.shape[0], *out_sp)
    return np.ascontiguousarray(out), xp.shape


def _convnd_grad_weight(x: np.ndarray, gout: np.ndarray, w_shape, stride, padding):
    nd = len(w_shape) - 2
    kshape = w_shape[2:]
    pw = ((0, 0), (0, 0)) + tuple((p, p) for p in padding)
    xp = np.pad(x, pw) if any(padding) else x
    cout = gout.shape[1]
    g2 = gout.reshape(gout.shape[0], cout, -1)  # (B, Cout, n_out)
    bsz = x.shape[0]
    n_out = g2.shape[2]
    ck = int(np.prod(w_shape[1:]))
    est = bsz * n_out * ck * x.dtype.itemsize
    if est <= _COL_CHUNK_BYTES or nd < 2:
        col, _ = _im2col(xp, kshape, stride)
        gw = np.einsum("bnc,bno->co", col, np.moveaxis(g2, 1, 2), optimize=True)
        gw = gw.T
    else:
        d_out = gout.shape[2]
        per_slab = n_out // d_out
        rows_per = max(1, _COL_CHUNK_BYTES // max(1, bsz * per_slab * ck * x.dtype.itemsize))
        gw = np.zeros((cout, ck), dtype=x.dtype)
        for d0 in range(0, d_out, rows_per):
            d1 = min(d_out, d0 + rows_per)
            lo = d0 * stride[0]
            hi = (d1 - 1) * stride[0] + kshape[0]
            colc, _ = _im2col(xp[:, :, lo:hi], kshape, stride)
            gslab = g2[:, :, d0 * per_slab:d1 * per_slab]
            gw += np.einsum("bnc,bon->co", colc, gslab, optimize=True).T
    return gw.reshape(w_shape)


def _convnd_grad_input(gout: np.ndarray, w: np.ndarray, stride, padding, x_shape):
    """Gradient w.r.t. x as a stride-1 full correlation of the zero-stuffed
    output gradient with the flipped, channel-swapped kernel."""
    nd = w.ndim - 2
    kshape = w.shape[2:]
    bsz, cout = gout.shape[0], gout.shape[1]
    out_sp = gout.shape[2:]
    stuffed_sp = []
    pads = [(0, 0), (0, 0)]
    for i in range(nd):
        target = x_shape[2 + i] + 2 * padding[i] - kshape[i] + 1
        base = (out_sp[i] - 1) * stride[i] + 1
        stuffed_sp.append(base)
        pads.append((kshape[i] - 1, kshape[i] - 1 + (target - base)))
    stuffed = np.zeros((bsz, cout, *stuffed_sp), dtype=gout.dtype)
    stuffed[(slice(None), slice(None)) + tuple(slice(None, None, s) for s in stride)] = gout
    stuffed = np.pad(stuffed, pads)
    wf = w[(slice(None), slice(None)) + (slice(None, None, -1),) * nd]
    wf = np.ascontiguousarray(np.swapaxes(wf, 0, 1))  # (Cin, Cout, *k)
    gx_pad, _ = _convnd_forward(stuffed, wf, None, (1,) * nd, (0,) * nd)
    sl = (slice(None), slice(None)) + tuple(
        slice(padding[i], padding[i] + x_shape[2 + i]) for i in range(nd)
    )
    return np.ascontiguousarray(gx_pad[sl])


def _conv(a, weight, bias, stride, padding, nd: int) -> Node:
    a, weight = as_node(a), as_node(weight)
    bias = as_node(bias) if bias is not None else None
    if a.value.ndim != nd + 2 or weight.value.ndim != nd + 2:
        raise ShapeError(
            f"conv{nd}d expects rank-{nd + 2} input/weight, got {tuple(a.shape)} / {tuple(weight.shape)}"
        )
    if a.shape[1] != weight.shape[1]:
        raise ShapeError(f"input channels {a.shape[1]} != weight channels {weight.shape[1]}")
    stride = _astuple(stride, nd)
    padding = _astuple(padding, nd)
    out_v, _ = _convnd_forward(a.value, weight.value, None if bias is None else bias.value, stride, padding)

    def backward(g):
        g = np.ascontiguousarray(g)
        if bias is not None and bias.requires_grad:
            _accumulate(bias, g.sum(axis=(0,) + tuple(range(2, 2 + nd))))
        if weight.requires_grad:
            _accumulate(weight, _convnd_grad_weight(a.value, g, weight.shape, stride, padding))
        if a.requires_grad:
            _accumulate(a, _convnd_grad_input(g, weight.value, stride, padding, a.shape))

    parents = (a, weight) if bias is None else (a, weight, bias)
    return _make(out_v, parents, backward)


def conv3d(a, weight, bias=None, stride=1, padding=0) -> Node:
    """x (B,Cin,D,H,W) * weight (Cout,Cin,kd,kh,kw) -> (B,Cout,D',H',W')."""
    return _conv(a, weight, bias, stride, padding, 3)


def conv2d(a, weight, bias=None, stride=1, padding=0) -> Node:
    """x (B,Cin,H,W) * weight (Cout,Cin,kh,kw) -> (B,Cout,H',W')."""
    return _conv(a, weight, bias, stride, padding, 2)


def conv_transpose3d(a, weight, bias=None, stride=1) -> Node:
    """Transposed conv with kernel == stride (non-overlapping upsampling).

    weight (Cin, Cout, kd, kh, kw) with (kd,kh,kw) == stride; output spatial
    extents are the input extents times the stride.
    """
    a, weight = as_node(a), as_node(weight)
    bias = as_node(bias) if bias is not None else None
    stride = _astuple(stride, 3)
    if weight.shape[2:] != stride:
        raise ShapeError(f"conv_transpose3d requires kernel == stride, got {weight.shape[2:]} vs {stride}")
    if a.shape[1] != weight.shape[0]:
        raise ShapeError(f"input channels {a.shape[1]} != weight in-channels {weight.shape[0]}")
    b_, ci = a.shape[0], a.shape[1]
    co = weight.shape[1]
    d, h, w_ = a.shape[2:]
    kd, kh, kw = stride
    blocks = np.einsum("bidhw,iojkl->bodjhkwl", a.value, weight.value, optimize=True)
    out_v = np.ascontiguousarray(blocks.reshape(b_, co, d * kd, h * kh, w_ * kw))
    if bias is not None:
        out_v += bias.value.reshape(1, -1, 1, 1, 1)

    def backward(g):
        gb = g.reshape(b_, co, d, kd, h, kh, w_, kw)
        if bias is not None and bias.requires_grad:
            _accumulate(bias, g.sum(axis=(0, 2, 3, 4)))
        if weight.requires_grad:
            _accumulate(weight, np.einsum("bodjhkwl,bidhw->iojkl", gb, a.value, optimize=True))
        if a.requires_grad:
            _accumulate(a, np.einsum("bodjhkwl,iojkl->bidhw", gb, weight.value, optimize=True))

    parents = (a, weight) if bias is None else (a, weight, bias)
    return _make(out_v, parents, backward)


def _astuple(v, n: int):
    if isinstance(v, (tuple, list)):
        if len(v) != n:
            raise ShapeError(f"expected {n} per-axis values, got {v}")
        return tuple(int(x) for x in v)
    return (int(v),) * n


# -- gradient checking -------------------------------------------------------

def grad_check(f, x: np.ndarray, h: float | None = None, sample: int | None = None, rng=None) -> float:
    """Max relative error between autodiff and central differences.

    ``f`` maps a Node to a scalar Node. Runs in float64. ``sample`` limits the
    check to that many randomly chosen coordinates (all coordinates when None).
    The relative error denominator is max(|analytic|, |numeric|, 1e-8).
    """
    x64 = np.asarray(x, dtype=np.float64)
    node = Node(x64.copy(), requires_grad=True)
    out = f(node)
    if not np.isfinite(out.value).all():
        raise NumericError("grad_check objective is non-finite")
    out.backward()
    g = node.grad
    if g is None:
        raise NumericError("objective does not depend on x")

    idxs = list(np.ndindex(*x64.shape)) if x64.shape else [()]
    if sample is not None and sample < len(idxs):
        rng = rng or np.random.default_rng(0)
        chosen = rng.choice(len(idxs), size=sample, replace=False)
        idxs = [idxs[i] for i in chosen]

    worst = 0.0
    for idx in idxs:
        step = h if h is not None else 1e-5 * max(1.0, abs(float(x64[idx])))
        xp = x64.copy()
        xp[idx] += step
        xm = x64.copy()
        xm[idx] -= step
        fp = float(f(Node(xp)).value)
        fm = float(f(Node(xm)).value)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NumericError("non-finite value during finite differencing")
        fd = (fp - fm) / (2.0 * step)
        an = float(g[idx])
        rel = abs(an - fd) / max(abs(an), abs(fd), 1e-8)
        worst = max(worst, rel)
    return worst
