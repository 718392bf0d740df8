"""Dense f32/f64 tensors with a reverse-mode tape.

Training runs in float32; gradient checking casts to float64 because central
finite differences are unreliable in single precision. Ops live in ops.py and
record themselves on the thread-local active tape via `record`.
"""

import threading

import numpy as np

from ..errors import NoTapeError, ShapeError

_FLOAT_DTYPES = (np.float32, np.float64)

# Per-op finiteness checks; cheap at desk scale, disable for throughput runs.
FINITE_CHECKS = True

_STATE = threading.local()


def _tape_stack():
    stack = getattr(_STATE, "stack", None)
    if stack is None:
        stack = []
        _STATE.stack = stack
    return stack


def active_tape():
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tape:
    """Context manager that enables recording of the operation graph."""

    def __enter__(self):
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _tape_stack().pop()
        return False


class Node:
    """One recorded op: parent tensors and a vector-Jacobian product."""

    __slots__ = ("parents", "vjp")

    def __init__(self, parents, vjp):
        self.parents = parents
        self.vjp = vjp


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "node")

    def __init__(self, data, requires_grad=False, dtype=None):
        arr = np.asarray(data)
        if dtype is None:
            dtype = arr.dtype if arr.dtype in _FLOAT_DTYPES else np.float32
        if arr.dtype != dtype:
            arr = arr.astype(dtype)
        if arr.ndim > 0 and not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.node = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def item(self):
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def detach(self):
        return Tensor(self.data, requires_grad=False)

    def astype(self, dtype):
        t = Tensor(self.data.astype(dtype), requires_grad=self.requires_grad)
        return t

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype.name}, requires_grad={self.requires_grad})"


def as_tensor(x, dtype=None):
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x), dtype=dtype)


def record(out, parents, vjp):
    """Attach a graph node to `out` if a tape is active and grads are needed."""
    if out.requires_grad and active_tape() is not None:
        out.node = Node(tuple(parents), vjp)
    return out


def check_finite(data, op_name):
    if FINITE_CHECKS and not np.all(np.isfinite(data)):
        raise OverflowError(f"non-finite values produced by {op_name}")
    return data


def backward(loss, params=None):
    """Accumulate d(loss)/d(leaf) into `.grad` of every reachable leaf.

    Gradients add across fan-out. Leaves in `params` that do not participate
    in the graph receive explicit zeros so optimizers can treat every
    parameter uniformly.
    """
    if not isinstance(loss, Tensor):
        raise TypeError("backward expects a Tensor loss")
    if loss.data.size != 1:
        raise ShapeError(f"loss must be scalar, got shape {loss.data.shape}")
    if loss.node is None:
        raise NoTapeError("loss was not recorded under an active Tape")

    topo = []
    visited = set()
    stack = [(loss, False)]
    while stack:
        t, expanded = stack.pop()
        if expanded:
            topo.append(t)
            continue
        if id(t) in visited:
            continue
        visited.add(id(t))
        stack.append((t, True))
        if t.node is not None:
            for p in t.node.parents:
                if id(p) not in visited:
                    stack.append((p, False))

    grads = {id(loss): np.ones_like(loss.data)}
    for t in reversed(topo):
        g = grads.pop(id(t), None)
        if g is None:
            continue
        if t.node is None:
            if t.requires_grad:
                t.grad = g.copy() if t.grad is None else t.grad + g
            continue
        parent_grads = t.node.vjp(g)
        for p, pg in zip(t.node.parents, parent_grads):
            if pg is None:
                continue
            if pg.shape != p.data.shape:
                raise ShapeError(
                    f"backward produced grad of shape {pg.shape} for tensor of shape {p.data.shape}"
                )
            acc = grads.get(id(p))
            grads[id(p)] = pg if acc is None else acc + pg

    if params is not None:
        for p in params:
            if p.requires_grad and p.grad is None:
                p.grad = np.zeros_like(p.data)
