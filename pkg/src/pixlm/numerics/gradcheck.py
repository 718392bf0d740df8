"""Finite-difference gradient verification.

The numeric side uses central differences in float64 and is deliberately
independent of the tape: it only ever calls the forward function.
"""

import numpy as np

from .tensor import Tape, Tensor, backward


def check_gradients(f, xs, eps=1e-5):
    """Max relative error between analytic and central-difference gradients.

    `f` maps the tensor(s) to a scalar Tensor. `xs` may be a single Tensor or
    a sequence; copies are promoted to float64 before checking. The relative
    error per component is |analytic - numeric| / max(|analytic|, |numeric|,
    1e-8).
    """
    single = isinstance(xs, Tensor)
    xs = [xs] if single else list(xs)
    xs64 = [Tensor(x.data.astype(np.float64), requires_grad=True) for x in xs]

    def call():
        out = f(xs64[0]) if single else f(xs64)
        return out

    with Tape():
        loss = call()
        backward(loss, params=xs64)
    analytic = [x.grad.copy() for x in xs64]
    for x in xs64:
        x.zero_grad()

    max_err = 0.0
    for x, ga in zip(xs64, analytic):
        flat = x.data.reshape(-1)
        gflat = ga.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = float(call().data)
            flat[i] = orig - eps
            down = float(call().data)
            flat[i] = orig
            numeric = (up - down) / (2.0 * eps)
            denom = max(abs(gflat[i]), abs(numeric), 1e-8)
            max_err = max(max_err, abs(gflat[i] - numeric) / denom)
    return max_err
