""" Differentiable primitives over :class:`Variable` values

    Every op computes its forward value with numpy, then registers a
    vector-Jacobian product with the owning tape. Leading dimensions are
    treated as batch dimensions unless stated otherwise.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from mgan.autodiff.tape import Variable
from mgan.exceptions import DegenerateMaskError, DimensionError, TapeError


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """sum `grad` back down to `shape` after numpy broadcasting"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _swap_last(arr: np.ndarray) -> np.ndarray:
    return np.swapaxes(arr, -1, -2)


def linear(x: Variable, weight: Variable, bias: Optional[Variable] = None) -> Variable:
    """Affine map `y = x W^T + bias` over the last axis of `x`

    Args:
        x (Variable): Input of shape `[..., in]`
        weight (Variable): Weight of shape `[out, in]`
        bias (Variable): Optional bias of shape `[out]`
    Returns:
        Variable: Output of shape `[..., out]`
    Raises:
        DimensionError: When the inner dimensions disagree"""
    xv, wv = x.value, weight.value
    if wv.ndim != 2 or xv.ndim < 1 or xv.shape[-1] != wv.shape[1]:
        raise DimensionError(f"linear: input shape {xv.shape} does not match weight shape {wv.shape}")
    out = xv @ wv.T
    if bias is not None:
        if bias.shape != (wv.shape[0],):
            raise DimensionError(f"linear: bias shape {bias.shape} does not match weight shape {wv.shape}")
        out = out + bias.value

    def vjp(grad):
        flat_g = grad.reshape(-1, grad.shape[-1])
        flat_x = xv.reshape(-1, xv.shape[-1])
        return grad @ wv, flat_g.T @ flat_x, flat_g.sum(axis=0)

    return x.tape.emit("linear", out, (x, weight, bias), vjp)


def relu(x: Variable) -> Variable:
    """Elementwise `max(0, x)`; the subgradient at 0 is 0"""
    xv = x.value
    live = xv > 0
    return x.tape.emit("relu", np.where(live, xv, 0.0), (x,), lambda grad: (grad * live,))


def sigmoid(x: Variable) -> Variable:
    """Elementwise logistic function"""
    out = 0.5 * (np.tanh(0.5 * x.value) + 1.0)
    return x.tape.emit("sigmoid", out, (x,), lambda grad: (grad * out * (1.0 - out),))


def tanh(x: Variable) -> Variable:
    """Elementwise hyperbolic tangent"""
    out = np.tanh(x.value)
    return x.tape.emit("tanh", out, (x,), lambda grad: (grad * (1.0 - out * out),))


def elu(x: Variable) -> Variable:
    """Elementwise exponential linear unit with alpha 1"""
    xv = x.value
    live = xv > 0
    out = np.where(live, xv, np.expm1(np.minimum(xv, 0.0)))
    return x.tape.emit("elu", out, (x,), lambda grad: (grad * np.where(live, 1.0, out + 1.0),))


def absolute(x: Variable) -> Variable:
    """Elementwise absolute value; the subgradient at 0 is 0"""
    xv = x.value
    return x.tape.emit("absolute", np.abs(xv), (x,), lambda grad: (grad * np.sign(xv),))


def _binary_operands(op: str, a: Variable, b: Variable) -> Tuple[np.ndarray, np.ndarray]:
    av, bv = a.value, b.value
    try:
        np.broadcast_shapes(av.shape, bv.shape)
    except ValueError:
        raise DimensionError(f"{op}: shapes {av.shape} and {bv.shape} do not broadcast") from None
    return av, bv


def add(a: Variable, b: Variable) -> Variable:
    """Elementwise sum with numpy broadcasting"""
    av, bv = _binary_operands("add", a, b)

    def vjp(grad):
        return _unbroadcast(grad, av.shape), _unbroadcast(grad, bv.shape)

    return a.tape.emit("add", av + bv, (a, b), vjp)


def sub(a: Variable, b: Variable) -> Variable:
    """Elementwise difference with numpy broadcasting"""
    av, bv = _binary_operands("sub", a, b)

    def vjp(grad):
        return _unbroadcast(grad, av.shape), -_unbroadcast(grad, bv.shape)

    return a.tape.emit("sub", av - bv, (a, b), vjp)


def mul(a: Variable, b: Variable) -> Variable:
    """Elementwise product with numpy broadcasting"""
    av, bv = _binary_operands("mul", a, b)

    def vjp(grad):
        return _unbroadcast(grad * bv, av.shape), _unbroadcast(grad * av, bv.shape)

    return a.tape.emit("mul", av * bv, (a, b), vjp)


def scale(x: Variable, factor: float) -> Variable:
    """Multiply by a python scalar"""
    factor = float(factor)
    return x.tape.emit("scale", x.value * factor, (x,), lambda grad: (grad * factor,))


def matmul(a: Variable, b: Variable) -> Variable:
    """Batched matrix product over the last two axes

    Args:
        a (Variable): Shape `[..., n, k]`
        b (Variable): Shape `[..., k, m]` with the same leading dimensions
    Returns:
        Variable: Shape `[..., n, m]`
    Raises:
        DimensionError: When the shapes disagree"""
    av, bv = a.value, b.value
    if av.ndim < 2 or av.ndim != bv.ndim or av.shape[:-2] != bv.shape[:-2] or av.shape[-1] != bv.shape[-2]:
        raise DimensionError(f"matmul: shapes {av.shape} and {bv.shape} do not agree")

    def vjp(grad):
        return grad @ _swap_last(bv), _swap_last(av) @ grad

    return a.tape.emit("matmul", av @ bv, (a, b), vjp)


def transpose(x: Variable) -> Variable:
    """Swap the last two axes"""
    if x.ndim < 2:
        raise DimensionError(f"transpose: needs at least 2 dimensions; got shape {x.shape}")
    return x.tape.emit("transpose", _swap_last(x.value), (x,), lambda grad: (_swap_last(grad),))


def reshape(x: Variable, shape: Sequence[int]) -> Variable:
    """Reshape, keeping row-major order"""
    xv = x.value
    try:
        out = xv.reshape(tuple(shape))
    except ValueError:
        raise DimensionError(f"reshape: cannot reshape {xv.shape} into {tuple(shape)}") from None
    return x.tape.emit("reshape", out, (x,), lambda grad: (grad.reshape(xv.shape),))


def reduce_sum(x: Variable, axis: Optional[int] = None, keepdims: bool = False) -> Variable:
    """Sum over `axis`, or over everything when `axis` is None"""
    xv = x.value
    out = np.sum(xv, axis=axis, keepdims=keepdims)

    def vjp(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, xv.shape).copy(),)

    return x.tape.emit("reduce_sum", np.asarray(out, dtype=np.float64), (x,), vjp)


def concat(a: Variable, b: Variable) -> Variable:
    """Concatenate along the last axis

    Args:
        a (Variable): Shape `[..., p]`
        b (Variable): Shape `[..., q]`; `q` may be 0
    Returns:
        Variable: Shape `[..., p + q]`
    Raises:
        DimensionError: When the leading dimensions differ"""
    av, bv = a.value, b.value
    if av.ndim == 0 or av.shape[:-1] != bv.shape[:-1]:
        raise DimensionError(f"concat: leading dimensions of {av.shape} and {bv.shape} differ")
    split = av.shape[-1]

    def vjp(grad):
        return grad[..., :split], grad[..., split:]

    return a.tape.emit("concat", np.concatenate([av, bv], axis=-1), (a, b), vjp)


def stack(xs: Sequence[Variable], axis: int = 0) -> Variable:
    """Stack same-shaped values along a new axis"""
    if not xs:
        raise DimensionError("stack: nothing to stack")
    shapes = {x.shape for x in xs}
    if len(shapes) != 1:
        raise DimensionError(f"stack: shapes differ {sorted(shapes)}")
    out = np.stack([x.value for x in xs], axis=axis)

    def vjp(grad):
        return tuple(np.take(grad, i, axis=axis) for i in range(len(xs)))

    return xs[0].tape.emit("stack", out, tuple(xs), vjp)


def take_along(x: Variable, index: np.ndarray) -> Variable:
    """Pick one entry along the last axis per leading position

    Args:
        x (Variable): Shape `[..., k]`
        index (np.ndarray): Integer array of shape `[...]`
    Returns:
        Variable: Shape `[...]`"""
    xv = x.value
    idx = np.asarray(index, dtype=np.int64)
    if idx.shape != xv.shape[:-1]:
        raise DimensionError(f"take_along: index shape {idx.shape} does not match {xv.shape}")
    if idx.size and (idx.min() < 0 or idx.max() >= xv.shape[-1]):
        raise IndexError("take_along: index out of range")
    out = np.take_along_axis(xv, idx[..., None], axis=-1)[..., 0]

    def vjp(grad):
        res = np.zeros_like(xv)
        np.put_along_axis(res, idx[..., None], grad[..., None], axis=-1)
        return (res,)

    return x.tape.emit("take_along", out, (x,), vjp)


def masked_softmax(logits: Variable, mask: Union[np.ndarray, Sequence], allow_empty: bool = False) -> Variable:
    """Softmax over the last axis restricted to the entries where `mask` is 1

    Args:
        logits (Variable): Shape `[..., n]`
        mask (array-like): {0, 1} values broadcastable to the logits
        allow_empty (bool): `True` maps rows with an all-zero mask to all zeros \
            instead of raising; used for padded and dead rows
    Returns:
        Variable: Masked entries are exactly 0; live entries are positive and sum to 1
    Raises:
        DegenerateMaskError: When a row has no live entry and `allow_empty` is False
    Note:
        Computed with max-subtraction so large logits do not overflow"""
    zv = logits.value
    try:
        live = np.broadcast_to(np.asarray(mask) != 0, zv.shape)
    except ValueError:
        raise DimensionError(f"masked_softmax: mask shape {np.shape(mask)} does not match {zv.shape}") from None
    has_live = live.any(axis=-1, keepdims=True)
    if not allow_empty and not has_live.all():
        raise DegenerateMaskError("masked_softmax: mask has no live entry")
    peak = np.max(np.where(live, zv, -np.inf), axis=-1, keepdims=True)
    peak = np.where(has_live, peak, 0.0)
    expz = np.exp(np.where(live, zv - peak, -np.inf))
    total = expz.sum(axis=-1, keepdims=True)
    out = expz / np.where(total > 0, total, 1.0)

    def vjp(grad):
        return (out * (grad - np.sum(grad * out, axis=-1, keepdims=True)),)

    return logits.tape.emit("masked_softmax", out, (logits,), vjp)


def gru_cell(x: Variable, h: Variable, prefix: str = "gru") -> Variable:
    """One GRU update reading its weights from the tape's parameters

    Args:
        x (Variable): Input of shape `[b, in]`
        h (Variable): Hidden state of shape `[b, hid]`
        prefix (str): Parameter prefix; gates `reset`, `update` and `candidate` each \
            hold `weight_ih`, `bias_ih`, `weight_hh` and `bias_hh`
    Returns:
        Variable: The new hidden state of shape `[b, hid]`
    Raises:
        DimensionError: When the shapes disagree with the parameters"""
    tape = x.tape
    if h.tape is not tape:
        raise TapeError("gru_cell: inputs recorded on different tapes")

    def gate_terms(gate: str) -> Tuple[Variable, Variable]:
        names = [f"{prefix}.{gate}.{kind}" for kind in ("weight_ih", "bias_ih", "weight_hh", "bias_hh")]
        w_ih, b_ih, w_hh, b_hh = (tape.parameter(name) for name in names)
        return linear(x, w_ih, b_ih), linear(h, w_hh, b_hh)

    reset_x, reset_h = gate_terms("reset")
    update_x, update_h = gate_terms("update")
    cand_x, cand_h = gate_terms("candidate")
    reset = sigmoid(add(reset_x, reset_h))
    update = sigmoid(add(update_x, update_h))
    cand = tanh(add(cand_x, mul(reset, cand_h)))
    # (1 - z) * n + z * h
    return add(cand, mul(update, sub(h, cand)))
