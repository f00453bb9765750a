"""
Reverse-mode automatic differentiation over numpy arrays.

A Tensor wraps an ndarray and, when it was produced by an operation that
needs gradients, the parents and the closure that pushes its gradient back
to them. `build_graph` orders the recorded nodes topologically and
`Tensor.backward` walks that order in reverse, visiting each node once.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .exceptions import GradientError, NonFiniteError, ShapeError

_FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))

# float32 for training, float64 for gradient checks
_default_dtype = np.dtype(np.float32)
_local = threading.local()


def _check_float_dtype(dtype) -> np.dtype:
    dtype = np.dtype(dtype)
    if dtype not in _FLOAT_DTYPES:
        raise ValueError(f"unsupported precision {dtype}; use float32 or float64")
    return dtype


def default_dtype() -> np.dtype:
    """Return the dtype new tensors get when none is given."""
    override = getattr(_local, "dtype", None)
    return override if override is not None else _default_dtype


def set_default_dtype(dtype) -> None:
    """Set the process-wide default precision (float32 or float64)."""
    global _default_dtype
    _default_dtype = _check_float_dtype(dtype)


@contextmanager
def precision(dtype) -> Iterator[None]:
    """Temporarily switch the default precision for the current thread."""
    previous = getattr(_local, "dtype", None)
    _local.dtype = _check_float_dtype(dtype)
    try:
        yield
    finally:
        _local.dtype = previous


def is_grad_enabled() -> bool:
    return getattr(_local, "grad_enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph recording in the current thread (forward-only evaluation)."""
    previous = is_grad_enabled()
    _local.grad_enabled = False
    try:
        yield
    finally:
        _local.grad_enabled = previous


def check_finite(data: np.ndarray, op: str) -> None:
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"non-finite values produced by {op}")


class Tensor:
    """
    N-dimensional array with an optional gradient buffer.

    Invariants:
        - data holds only finite values (checked on creation)
        - grad, when present, has the same shape and dtype as data
    """

    __slots__ = ("data", "grad", "requires_grad", "op", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        target = _check_float_dtype(dtype) if dtype is not None else None
        if isinstance(data, np.ndarray) and target is None and data.dtype in _FLOAT_DTYPES:
            arr = data
        else:
            arr = np.asarray(data, dtype=target or default_dtype())
        check_finite(arr, "tensor creation")
        self.data: np.ndarray = arr
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = bool(requires_grad)
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Optional[Callable[[np.ndarray], None]] = None

    # ------------------------------------------------------------------
    # Construction helpers
    # ------------------------------------------------------------------
    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: tuple["Tensor", ...],
        backward: Callable[[np.ndarray], None],
        op: str,
    ) -> "Tensor":
        """Wrap an op result, recording the graph edge only when a parent needs grad."""
        check_finite(data, op)
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.op = op
        out.requires_grad = is_grad_enabled() and any(p.requires_grad for p in parents)
        if out.requires_grad:
            out._parents = parents
            out._backward = backward
        else:
            out._parents = ()
            out._backward = None
        return out

    @classmethod
    def zeros(cls, shape, requires_grad: bool = False, dtype=None) -> "Tensor":
        return cls(np.zeros(shape, dtype=dtype or default_dtype()), requires_grad=requires_grad)

    # ------------------------------------------------------------------
    # Array-like surface
    # ------------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    @property
    def parents(self) -> tuple["Tensor", ...]:
        return self._parents

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def copy(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=self.requires_grad)

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        grad = np.asarray(grad, dtype=self.data.dtype)
        if grad.shape != self.data.shape:
            raise ShapeError(f"gradient shape {grad.shape} does not match tensor shape {self.shape}")
        self.grad = grad.copy() if self.grad is None else self.grad + grad

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, op={self.op}{flag})"

    # ------------------------------------------------------------------
    # Operators (implemented in ops)
    # ------------------------------------------------------------------
    def __add__(self, other):
        from .ops import add
        return add(self, other)

    def __radd__(self, other):
        from .ops import add
        return add(other, self)

    def __sub__(self, other):
        from .ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .ops import sub
        return sub(other, self)

    def __mul__(self, other):
        from .ops import mul, scale
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        from .ops import scale
        return scale(self, -1.0)

    def __truediv__(self, other):
        from .ops import scale
        if not isinstance(other, (int, float)):
            raise TypeError("Tensor division is only defined by a Python scalar")
        return scale(self, 1.0 / float(other))

    def __matmul__(self, other):
        from .ops import matmul
        return matmul(self, other)

    @property
    def T(self) -> "Tensor":
        from .ops import transpose
        return transpose(self)

    # ------------------------------------------------------------------
    # Backward
    # ------------------------------------------------------------------
    def backward(self, grad: Optional[np.ndarray] = None) -> "Graph":
        """
        Accumulate gradients of this tensor into every leaf that requires grad.

        Args:
            grad: upstream gradient; defaults to 1 for single-element tensors

        Returns:
            The Graph that was traversed
        """
        if not self.requires_grad:
            raise GradientError("backward() called on a tensor that does not require grad")
        if grad is None:
            if self.size != 1:
                raise GradientError("backward() without a gradient needs a single-element tensor")
            grad = np.ones_like(self.data)
        graph = build_graph(self)
        self.accumulate_grad(grad)
        for node in reversed(graph.nodes):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)
        return graph


@dataclass
class Graph:
    """Recorded operations in topological order (inputs before outputs)."""

    nodes: list[Tensor] = field(default_factory=list)

    @property
    def leaves(self) -> list[Tensor]:
        return [n for n in self.nodes if n.is_leaf]

    def __len__(self) -> int:
        return len(self.nodes)


def build_graph(root: Tensor) -> Graph:
    """Topologically order the nodes reachable from `root` (iterative DFS)."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in reversed(node._parents):
            if id(parent) not in visited:
                stack.append((parent, False))
    return Graph(nodes=order)
