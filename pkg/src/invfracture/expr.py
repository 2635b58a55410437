"""Minimal arithmetic-expression evaluator for user stored-energy functions.

Grammar: numeric literals, the variable ``F``, ``+ - * / ^`` (``**`` is
accepted as a synonym for ``^``), unary minus, parentheses and calls to
``sqrt``, ``exp``, ``log``. Nothing else parses, so config files cannot
execute code.
"""

import ast
import operator

import numpy as np

from .exceptions import ConfigError

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: np.power,
}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"sqrt": np.sqrt, "exp": np.exp, "log": np.log}


def _compile(node, source):
    if isinstance(node, ast.Expression):
        return _compile(node.body, source)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        value = float(node.value)
        return lambda F: value
    if isinstance(node, ast.Name):
        if node.id != "F":
            raise ConfigError(f"unknown variable {node.id!r} in {source!r} (only F allowed)")
        return lambda F: F
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left = _compile(node.left, source)
        right = _compile(node.right, source)
        return lambda F: op(left(F), right(F))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        op = _UNOPS[type(node.op)]
        operand = _compile(node.operand, source)
        return lambda F: op(operand(F))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        fn = _FUNCS[node.func.id]
        arg = _compile(node.args[0], source)
        return lambda F: fn(arg(F))
    raise ConfigError(f"unsupported syntax in expression {source!r}")


def parse_expression(source):
    """Compile ``source`` into a vectorised function of ``F``.

    >>> f = parse_expression("(1 - 1/F)^2")
    >>> float(f(2.0))
    0.25
    """
    if not isinstance(source, str) or not source.strip():
        raise ConfigError("empty expression")
    text = source.replace("^", "**")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {source!r}: {exc.msg}") from None
    body = _compile(tree, source)

    def func(F):
        F = np.asarray(F, dtype=float)
        out = body(F)
        return np.broadcast_to(np.asarray(out, dtype=float), F.shape).copy() if np.ndim(F) else float(out)

    return func
