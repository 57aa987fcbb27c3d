"""Scalar computation graph with a recorded tape and reverse-mode gradients.

Nodes are appended in creation order, so predecessor indices always precede
the node that uses them and the tape is acyclic by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pinnbench.errors import ContractError, EvaluationError

TINY = 1e-300

_UNARY = {"neg", "tanh", "sin", "cos", "exp", "log", "sqrt", "pow"}
_BINARY = {"add", "sub", "mul", "div"}


@dataclass(frozen=True)
class GradientVector:
    entries: np.ndarray
    registry: tuple[str, ...]

    def __post_init__(self):
        if len(self.entries) != len(self.registry):
            raise ContractError("gradient length does not match registry")

    def __getitem__(self, name):
        return self.entries[self.registry.index(name)]


@dataclass
class _Node:
    op: str
    preds: tuple[int, ...]
    arg: float | str | None = None
    value: float = math.nan


class Var:
    """Handle to a node; arithmetic on handles records new nodes."""

    __slots__ = ("graph", "index")

    def __init__(self, graph: ComputationGraph, index: int):
        self.graph = graph
        self.index = index

    def _lift(self, other):
        if isinstance(other, Var):
            return other
        return self.graph.const(float(other))

    def __add__(self, other):
        return self.graph._push("add", self, self._lift(other))

    def __radd__(self, other):
        return self.graph._push("add", self._lift(other), self)

    def __sub__(self, other):
        return self.graph._push("sub", self, self._lift(other))

    def __rsub__(self, other):
        return self.graph._push("sub", self._lift(other), self)

    def __mul__(self, other):
        return self.graph._push("mul", self, self._lift(other))

    def __rmul__(self, other):
        return self.graph._push("mul", self._lift(other), self)

    def __truediv__(self, other):
        return self.graph._push("div", self, self._lift(other))

    def __rtruediv__(self, other):
        return self.graph._push("div", self._lift(other), self)

    def __neg__(self):
        return self.graph._push("neg", self)

    def __pow__(self, exponent):
        if isinstance(exponent, Var):
            raise ContractError("only constant exponents are supported")
        return self.graph._push("pow", self, arg=float(exponent))

    def tanh(self):
        return self.graph._push("tanh", self)

    def sin(self):
        return self.graph._push("sin", self)

    def cos(self):
        return self.graph._push("cos", self)

    def exp(self):
        return self.graph._push("exp", self)

    def log(self):
        return self.graph._push("log", self)

    def sqrt(self):
        return self.graph._push("sqrt", self)


@dataclass
class ComputationGraph:
    nodes: list[_Node] = field(default_factory=list)
    outputs: list[int] = field(default_factory=list)
    params: list[str] = field(default_factory=list)
    _evaluated: bool = False

    def _push(self, op, *preds, arg=None):
        idx = len(self.nodes)
        self.nodes.append(_Node(op, tuple(p.index for p in preds), arg))
        self._evaluated = False
        return Var(self, idx)

    def input(self, name: str) -> Var:
        return self._push("input", arg=name)

    def param(self, name: str) -> Var:
        if name in self.params:
            raise ContractError(f"parameter {name!r} registered twice")
        self.params.append(name)
        return self._push("param", arg=name)

    def const(self, value: float) -> Var:
        return self._push("const", arg=float(value))

    def output(self, *vars: Var) -> None:
        self.outputs.extend(v.index for v in vars)

    def evaluate(self, bindings: dict[str, float]) -> list[float]:
        for i, node in enumerate(self.nodes):
            node.value = self._forward(i, node, bindings)
            if not math.isfinite(node.value):
                raise EvaluationError(f"non-finite value at node {i} ({node.op})", node=i)
        self._evaluated = True
        return [self.nodes[i].value for i in self.outputs]

    def _forward(self, i, node, bindings):
        op = node.op
        if op in ("input", "param"):
            if node.arg not in bindings:
                raise ContractError(f"no binding for leaf {node.arg!r}")
            return float(bindings[node.arg])
        if op == "const":
            return node.arg
        vals = [self.nodes[p].value for p in node.preds]
        if op == "add":
            return vals[0] + vals[1]
        if op == "sub":
            return vals[0] - vals[1]
        if op == "mul":
            return vals[0] * vals[1]
        if op == "div":
            if abs(vals[1]) < TINY:
                raise EvaluationError(f"division by ~0 at node {i}", node=i)
            return vals[0] / vals[1]
        x = vals[0]
        if op == "neg":
            return -x
        if op == "tanh":
            return math.tanh(x)
        if op == "sin":
            return math.sin(x)
        if op == "cos":
            return math.cos(x)
        if op == "exp":
            try:
                return math.exp(x)
            except OverflowError:
                raise EvaluationError(f"exp overflow at node {i}", node=i) from None
        if op in ("log", "sqrt"):
            if x <= 0.0:
                raise EvaluationError(f"{op} of non-positive argument at node {i}", node=i)
            return math.log(x) if op == "log" else math.sqrt(x)
        if op == "pow":
            try:
                return x ** node.arg
            except (OverflowError, ZeroDivisionError):
                raise EvaluationError(f"pow domain error at node {i}", node=i) from None
        raise ContractError(f"unknown op {op!r}")

    def reverse_grad(self, output: int = 0) -> GradientVector:
        if not self._evaluated:
            raise ContractError("evaluate() must run before reverse_grad()")
        if not 0 <= output < len(self.outputs):
            raise ContractError(f"output index {output} is not a scalar output of this graph")
        adj = [0.0] * len(self.nodes)
        adj[self.outputs[output]] = 1.0
        for i in range(self.outputs[output], -1, -1):
            a = adj[i]
            if a == 0.0:
                continue
            node = self.nodes[i]
            for p, local in zip(node.preds, self._local_partials(node)):
                adj[p] += a * local
        grad = np.zeros(len(self.params))
        for i, node in enumerate(self.nodes):
            if node.op == "param":
                grad[self.params.index(node.arg)] = adj[i]
        return GradientVector(grad, tuple(self.params))

    def _local_partials(self, node):
        op = node.op
        vals = [self.nodes[p].value for p in node.preds]
        if op == "add":
            return (1.0, 1.0)
        if op == "sub":
            return (1.0, -1.0)
        if op == "mul":
            return (vals[1], vals[0])
        if op == "div":
            return (1.0 / vals[1], -vals[0] / vals[1] ** 2)
        if op == "neg":
            return (-1.0,)
        if op == "tanh":
            return (1.0 - node.value**2,)
        if op == "sin":
            return (math.cos(vals[0]),)
        if op == "cos":
            return (-math.sin(vals[0]),)
        if op == "exp":
            return (node.value,)
        if op == "log":
            return (1.0 / vals[0],)
        if op == "sqrt":
            return (0.5 / node.value,)
        if op == "pow":
            n = node.arg
            return (n * vals[0] ** (n - 1.0) if n != 0 else 0.0,)
        return ()
