""" Reverse-mode gradient tape
    License: MIT
"""

from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from mgan.autodiff.parameters import ParameterTree
from mgan.exceptions import ParameterError, TapeError
from mgan.utilities import check_finite

VjpT = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Variable:
    """A value produced on a :class:`Tape`

    Args:
        value (np.ndarray): The 64-bit value
        tape (Tape): The tape that owns the value
        index (int): Position of the value on the tape
        requires_grad (bool): Whether gradients flow back through this value
    Note:
        Variables are created by the tape and the primitive ops; do not
        instantiate them directly"""

    __slots__ = ("_value", "_tape", "_index", "_requires_grad")

    def __init__(self, value: np.ndarray, tape: "Tape", index: int, requires_grad: bool) -> None:
        self._value = value
        self._tape = tape
        self._index = index
        self._requires_grad = requires_grad

    def __repr__(self) -> str:
        return f"Variable(shape={self.shape}, requires_grad={self.requires_grad})"

    @property
    def value(self) -> np.ndarray:
        """np.ndarray: The computed value

        Note:
            Not settable"""
        return self._value

    @property
    def shape(self) -> Tuple[int, ...]:
        """tuple: The shape of the value"""
        return self._value.shape

    @property
    def ndim(self) -> int:
        """int: The number of dimensions of the value"""
        return self._value.ndim

    @property
    def tape(self) -> "Tape":
        """Tape: The owning tape"""
        return self._tape

    @property
    def index(self) -> int:
        """int: The position of the value on the tape"""
        return self._index

    @property
    def requires_grad(self) -> bool:
        """bool: Whether an adjoint is propagated into this value"""
        return self._requires_grad


class _Record(NamedTuple):
    op: str
    output: int
    parents: Tuple[Optional[int], ...]
    needs: Tuple[bool, ...]
    vjp: VjpT


class Tape:
    """Ordered record of executed primitive ops

    Args:
        params (ParameterTree): The parameters that ops may read by name
        record (bool): `False` evaluates ops without recording adjoints; used for \
            rollouts and target computations
    Note:
        A tape is consumed by :func:`backward` and cannot be reused afterwards"""

    __slots__ = ("_params", "_records", "_recording", "_consumed", "_param_vars", "_counter")

    def __init__(self, params: Optional[ParameterTree] = None, record: bool = True) -> None:
        self._params = params if params is not None else ParameterTree()
        self._records: List[_Record] = []
        self._recording = bool(record)
        self._consumed = False
        self._param_vars: Dict[str, Variable] = {}
        self._counter = 0

    def __len__(self) -> int:
        """number of recorded ops"""
        return len(self._records)

    @property
    def params(self) -> ParameterTree:
        """ParameterTree: The parameters readable from this tape"""
        return self._params

    @property
    def recording(self) -> bool:
        """bool: Whether ops are recorded for the backward pass"""
        return self._recording

    @property
    def consumed(self) -> bool:
        """bool: Whether :func:`backward` already ran on this tape"""
        return self._consumed

    def op_names(self) -> List[str]:
        """Names of the recorded ops in execution order

        Returns:
            list(str): The op names"""
        return [rec.op for rec in self._records]

    def op_count(self, op: str) -> int:
        """Count the recorded ops named `op`"""
        return sum(1 for rec in self._records if rec.op == op)

    def constant(self, value: Union[np.ndarray, float, Sequence]) -> Variable:
        """Wrap a value that receives no gradient

        Args:
            value (array-like): The value
        Returns:
            Variable: The wrapped value
        Raises:
            NonFiniteError: When the value holds a NaN or Inf"""
        self._check_usable()
        arr = check_finite(np.array(value, dtype=np.float64), "constant")
        return self._new_variable(arr, False)

    def parameter(self, name: str) -> Variable:
        """Read the parameter `name`; repeated reads return the same variable

        Args:
            name (str): The hierarchical parameter name
        Returns:
            Variable: The parameter
        Raises:
            ParameterError: When the name is not in the parameter tree"""
        self._check_usable()
        var = self._param_vars.get(name)
        if var is None:
            if name not in self._params:
                raise ParameterError(f"Unknown parameter: {name}")
            requires = self._recording and self._params.is_trainable(name)
            var = self._new_variable(self._params[name], requires)
            self._param_vars[name] = var
        return var

    def emit(self, op: str, value: np.ndarray, parents: Sequence[Optional[Variable]], vjp: VjpT) -> Variable:
        """Register the output of a primitive op

        Args:
            op (str): The op name
            value (np.ndarray): The op output
            parents (list): The op inputs, in the order `vjp` returns their gradients
            vjp (function): Maps the output adjoint to the input adjoints
        Returns:
            Variable: The output
        Raises:
            TapeError: When an input belongs to another tape or the tape is consumed
            NonFiniteError: When the output holds a NaN or Inf"""
        self._check_usable()
        for parent in parents:
            if parent is not None and parent.tape is not self:
                raise TapeError(f"{op}: inputs recorded on different tapes")
        check_finite(value, op)
        needs = tuple(parent is not None and parent.requires_grad for parent in parents)
        requires = self._recording and any(needs)
        out = self._new_variable(value, requires)
        if requires:
            ids = tuple(parent.index if parent is not None else None for parent in parents)
            self._records.append(_Record(op, out.index, ids, needs, vjp))
        return out

    def gradient(self, output: Variable) -> Dict[str, np.ndarray]:
        """Shortcut for :func:`backward` on this tape"""
        return backward(self, output)

    def _new_variable(self, value: np.ndarray, requires_grad: bool) -> Variable:
        var = Variable(value, self, self._counter, requires_grad)
        self._counter += 1
        return var

    def _check_usable(self) -> None:
        if self._consumed:
            raise TapeError("Tape already consumed by a backward pass")


def backward(tape: Tape, output: Variable) -> Dict[str, np.ndarray]:
    """Reverse accumulation of the adjoints of a scalar output

    Args:
        tape (Tape): The tape the output was produced on
        output (Variable): A scalar (single element) output
    Returns:
        dict: Gradient for every trainable parameter of the tape's tree, keyed by name; \
            parameters that did not take part get a zero gradient
    Raises:
        TapeError: Non-scalar output, foreign output or a consumed tape"""
    if tape.consumed:
        raise TapeError("Tape already consumed by a backward pass")
    if output.tape is not tape:
        raise TapeError("Output was not produced on this tape")
    if output.value.size != 1:
        raise TapeError(f"backward requires a scalar output; got shape {output.shape}")
    tape._consumed = True

    adjoints: Dict[int, np.ndarray] = {output.index: np.ones_like(output.value)}
    for rec in reversed(tape._records):
        grad = adjoints.pop(rec.output, None)
        if grad is None:
            continue
        for parent, need, pgrad in zip(rec.parents, rec.needs, rec.vjp(grad)):
            if not need or pgrad is None:
                continue
            prev = adjoints.get(parent)  # type: ignore
            adjoints[parent] = pgrad if prev is None else prev + pgrad  # type: ignore

    res: Dict[str, np.ndarray] = {}
    for name in tape.params.trainable_names():
        var = tape._param_vars.get(name)
        grad = adjoints.get(var.index) if var is not None else None
        res[name] = np.zeros_like(tape.params[name]) if grad is None else np.array(grad, dtype=np.float64)
    return res
