"""Differentiable core ops over Tensor.

Broadcasting is restricted to leading batch dimensions: for elementwise
binary ops the smaller operand's shape must be a suffix of the larger one's,
and matmul either matches leading dims exactly or applies a rank-2 operand
across them. Everything else raises ShapeError.
"""

import numpy as np
from scipy.special import erf

from ..errors import ShapeError
from .tensor import Tensor, as_tensor, check_finite, record

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _suffix_broadcast(a_shape, b_shape):
    """Return the output shape if one shape is a suffix of the other."""
    if len(a_shape) >= len(b_shape):
        big, small = a_shape, b_shape
    else:
        big, small = b_shape, a_shape
    if len(small) == 0 or big[len(big) - len(small):] == small:
        return big
    return None


def _reduce_to(grad, shape):
    """Sum a broadcast gradient back down to the original suffix shape."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    return grad


def _binary(a, b, fwd, da, db, name):
    a, b = as_tensor(a), as_tensor(b)
    out_shape = _suffix_broadcast(a.data.shape, b.data.shape)
    if out_shape is None:
        raise ShapeError(f"{name}: shapes {a.data.shape} and {b.data.shape} do not align")
    out = Tensor(check_finite(fwd(a.data, b.data), name),
                 requires_grad=a.requires_grad or b.requires_grad)

    def vjp(g):
        ga = _reduce_to(da(g, a.data, b.data), a.data.shape) if a.requires_grad or a.node else None
        gb = _reduce_to(db(g, a.data, b.data), b.data.shape) if b.requires_grad or b.node else None
        return ga, gb

    return record(out, (a, b), vjp)


def add(a, b):
    return _binary(a, b, lambda x, y: x + y,
                   lambda g, x, y: g, lambda g, x, y: g, "add")


def sub(a, b):
    return _binary(a, b, lambda x, y: x - y,
                   lambda g, x, y: g, lambda g, x, y: -g, "sub")


def mul(a, b):
    return _binary(a, b, lambda x, y: x * y,
                   lambda g, x, y: g * y, lambda g, x, y: g * x, "mul")


def scale(a, s):
    a = as_tensor(a)
    s = float(s)
    out = Tensor(check_finite(a.data * s, "scale"), requires_grad=a.requires_grad)
    return record(out, (a,), lambda g: (g * s,))


def neg(a):
    return scale(a, -1.0)


def square(a):
    return mul(a, a)


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    ad, bd = a.data, b.data
    if ad.ndim < 2 or bd.ndim < 2:
        raise ShapeError("matmul requires rank >= 2 operands")
    if ad.shape[-1] != bd.shape[-2]:
        raise ShapeError(f"matmul: inner dims {ad.shape} @ {bd.shape}")
    if ad.ndim != bd.ndim and bd.ndim != 2 and ad.ndim != 2:
        raise ShapeError(f"matmul: ranks {ad.ndim} and {bd.ndim} do not align")
    if ad.ndim == bd.ndim and ad.shape[:-2] != bd.shape[:-2]:
        raise ShapeError(f"matmul: batch dims {ad.shape[:-2]} vs {bd.shape[:-2]}")
    out = Tensor(check_finite(ad @ bd, "matmul"),
                 requires_grad=a.requires_grad or b.requires_grad)

    def vjp(g):
        ga = gb = None
        if a.requires_grad or a.node:
            ga = g @ np.swapaxes(bd, -1, -2)
            if ga.ndim > ad.ndim:
                ga = ga.sum(axis=tuple(range(ga.ndim - ad.ndim)))
        if b.requires_grad or b.node:
            gb = np.swapaxes(ad, -1, -2) @ g
            if gb.ndim > bd.ndim:
                gb = gb.sum(axis=tuple(range(gb.ndim - bd.ndim)))
        return ga, gb

    return record(out, (a, b), vjp)


def transpose(a, axes=None):
    a = as_tensor(a)
    if axes is None:
        axes = tuple(reversed(range(a.data.ndim)))
    inv = np.argsort(axes)
    out = Tensor(np.ascontiguousarray(a.data.transpose(axes)), requires_grad=a.requires_grad)
    return record(out, (a,), lambda g: (g.transpose(inv),))


def reshape(a, shape):
    a = as_tensor(a)
    old_shape = a.data.shape
    out = Tensor(a.data.reshape(shape), requires_grad=a.requires_grad)
    return record(out, (a,), lambda g: (g.reshape(old_shape),))


def sum_(a, axis=None, keepdims=False):
    a = as_tensor(a)
    out = Tensor(a.data.sum(axis=axis, keepdims=keepdims), requires_grad=a.requires_grad)
    in_shape = a.data.shape

    def vjp(g):
        if axis is None:
            return (np.broadcast_to(g, in_shape).astype(a.data.dtype, copy=True),)
        gx = g
        if not keepdims:
            gx = np.expand_dims(gx, axis)
        return (np.broadcast_to(gx, in_shape).astype(a.data.dtype, copy=True),)

    return record(out, (a,), vjp)


def mean_(a, axis=None, keepdims=False):
    a = as_tensor(a)
    if axis is None:
        count = a.data.size
    elif isinstance(axis, tuple):
        count = int(np.prod([a.data.shape[ax] for ax in axis]))
    else:
        count = a.data.shape[axis]
    return scale(sum_(a, axis=axis, keepdims=keepdims), 1.0 / count)


def gather_rows(table, indices):
    """Embedding lookup: select rows of `table` along axis 0."""
    table = as_tensor(table)
    idx = np.asarray(indices, dtype=np.int64)
    if np.any(idx < 0) or np.any(idx >= table.data.shape[0]):
        raise IndexError(f"gather index out of range for table with {table.data.shape[0]} rows")
    out = Tensor(table.data[idx], requires_grad=table.requires_grad)

    def vjp(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, idx, g)
        return (gt,)

    return record(out, (table,), vjp)


def take_last(a, indices):
    """Pick one entry per row along the last axis (used by cross-entropy)."""
    a = as_tensor(a)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.shape != a.data.shape[:-1]:
        raise ShapeError(f"take_last: indices shape {idx.shape} vs data {a.data.shape}")
    if np.any(idx < 0) or np.any(idx >= a.data.shape[-1]):
        raise IndexError("take_last index out of range")
    out = Tensor(np.take_along_axis(a.data, idx[..., None], axis=-1)[..., 0],
                 requires_grad=a.requires_grad)

    def vjp(g):
        gx = np.zeros_like(a.data)
        np.put_along_axis(gx, idx[..., None], g[..., None], axis=-1)
        return (gx,)

    return record(out, (a,), vjp)


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeError("concat of zero tensors")
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis),
                 requires_grad=any(t.requires_grad for t in tensors))
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def vjp(g):
        parts = np.split(g, splits, axis=axis)
        return tuple(np.ascontiguousarray(p) for p in parts)

    return record(out, tuple(tensors), vjp)


def layer_norm(x, gain, bias, eps=1e-5):
    """Normalize the last axis to zero mean, unit variance, then affine."""
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    d = x.data.shape[-1]
    if gain.data.shape != (d,) or bias.data.shape != (d,):
        raise ShapeError(f"layer_norm: gain/bias must have shape ({d},)")
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv_std
    out = Tensor(check_finite(xhat * gain.data + bias.data, "layer_norm"),
                 requires_grad=x.requires_grad or gain.requires_grad or bias.requires_grad)

    def vjp(g):
        gx = gg = gb = None
        if x.requires_grad or x.node:
            dxhat = g * gain.data
            gx = inv_std * (dxhat
                            - dxhat.mean(axis=-1, keepdims=True)
                            - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
        if gain.requires_grad or gain.node:
            gg = (g * xhat).reshape(-1, d).sum(axis=0)
        if bias.requires_grad or bias.node:
            gb = g.reshape(-1, d).sum(axis=0)
        return gx, gg, gb

    return record(out, (x, gain, bias), vjp)


def gelu(x):
    """Exact Gaussian error linear unit, x * Phi(x)."""
    x = as_tensor(x)
    xd = x.data
    phi_cdf = 0.5 * (1.0 + erf(xd * _INV_SQRT2))
    out = Tensor(check_finite(xd * phi_cdf, "gelu"), requires_grad=x.requires_grad)

    def vjp(g):
        pdf = np.exp(-0.5 * xd * xd) * _INV_SQRT2PI
        return (g * (phi_cdf + xd * pdf),)

    return record(out, (x,), vjp)


def softmax(x):
    """Numerically stable softmax over the last axis."""
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)
    out = Tensor(check_finite(s, "softmax"), requires_grad=x.requires_grad)

    def vjp(g):
        dot = (g * s).sum(axis=-1, keepdims=True)
        return ((g - dot) * s,)

    return record(out, (x,), vjp)


def log_softmax(x):
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out_data = shifted - lse
    out = Tensor(check_finite(out_data, "log_softmax"), requires_grad=x.requires_grad)

    def vjp(g):
        sm = np.exp(out_data)
        return (g - sm * g.sum(axis=-1, keepdims=True),)

    return record(out, (x,), vjp)


def dropout(x, p, rng=None, training=True):
    """Zero each entry with probability p and rescale; identity in eval mode."""
    x = as_tensor(x)
    if not training or p == 0.0:
        return x
    if not 0.0 <= p < 1.0:
        raise ShapeError(f"dropout probability {p} outside [0, 1)")
    if rng is None:
        raise ValueError("dropout in training mode requires an rng")
    keep = (rng.random(x.data.shape) >= p).astype(x.data.dtype)
    factor = 1.0 / (1.0 - p)
    out = Tensor(x.data * keep * factor, requires_grad=x.requires_grad)
    return record(out, (x,), lambda g: (g * keep * factor,))


def attention(q, k, v):
    """Scaled dot-product attention; composite, so backward comes for free."""
    q, k, v = as_tensor(q), as_tensor(k), as_tensor(v)
    d = q.data.shape[-1]
    scores = scale(matmul(q, transpose_last(k)), 1.0 / np.sqrt(d))
    return matmul(softmax(scores), v)


def transpose_last(a):
    """Swap the last two axes, keeping leading batch dims in place."""
    a = as_tensor(a)
    axes = list(range(a.data.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return transpose(a, tuple(axes))


def cross_entropy(logits, targets):
    """Mean negative log-likelihood of integer targets over the last axis."""
    picked = take_last(log_softmax(logits), targets)
    return neg(mean_(reshape(picked, (-1,)), axis=0))
