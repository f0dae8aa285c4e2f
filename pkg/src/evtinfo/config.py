"""Plain-text von Mises spec files.

Format: one ``key = value`` per line, ``#`` starts a comment::

    # exponential with rate 2
    c = 1
    z0 = 0
    x0 = inf
    g_expr = 0.5

Required keys: ``c``, ``z0``, ``x0``, ``g_expr``. Optional: ``G_expr`` (closed
form of G, same grammar), ``lower`` (left support end), ``name``.

Expression grammar (variable ``u``)::

    expr   := expr ('+' | '-') term | term
    term   := term ('*' | '/') factor | factor
    factor := ('+' | '-') factor | power
    power  := atom ['**' factor]
    atom   := number | 'u' | 'pi' | 'e' | func '(' expr [',' expr] ')' | '(' expr ')'
    func   := exp | log | sqrt | pow

It is parsed with Python's ``ast`` module and only the nodes above are
accepted; evaluation is pure numpy.
"""
from __future__ import annotations

import ast
import math
from pathlib import Path
from typing import Callable

import numpy as np

from .distributions import VonMises, VonMisesSpec

__all__ = ["ConfigError", "parse_expression", "parse_spec_text", "load_spec_file", "load_distribution"]


class ConfigError(ValueError):
    pass


_FUNCS = {"exp": (np.exp, 1), "log": (np.log, 1), "sqrt": (np.sqrt, 1), "pow": (np.power, 2)}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}


def _compile(node) -> Callable:
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        v = float(node.value)
        return lambda u: v
    if isinstance(node, ast.Name):
        if node.id == "u":
            return lambda u: u
        if node.id in _CONSTS:
            v = _CONSTS[node.id]
            return lambda u: v
        raise ConfigError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        inner = _compile(node.operand)
        if isinstance(node.op, ast.USub):
            return lambda u: -inner(u)
        return inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left), _compile(node.right)
        return lambda u: op(left(u), right(u))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        if node.func.id not in _FUNCS:
            raise ConfigError(f"unknown function {node.func.id!r}")
        fn, arity = _FUNCS[node.func.id]
        if len(node.args) != arity:
            raise ConfigError(f"{node.func.id} takes {arity} argument(s)")
        args = [_compile(a) for a in node.args]
        return lambda u: fn(*(a(u) for a in args))
    raise ConfigError(f"unsupported syntax: {ast.dump(node)[:60]}")


def parse_expression(text: str) -> Callable:
    """Compile an arithmetic expression in ``u`` into a vectorised function."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from None
    fn = _compile(tree)

    def evaluate(u):
        arr = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            out = np.broadcast_to(np.asarray(fn(arr), dtype=float), arr.shape)
        return float(out) if out.ndim == 0 else np.array(out)

    return evaluate


def _float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {value!r}") from None


def parse_spec_text(text: str) -> tuple[VonMisesSpec, float | None]:
    """Parse spec text into (VonMisesSpec, lower support end or None)."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    allowed = {"c", "z0", "x0", "g_expr", "G_expr", "lower", "name"}
    unknown = set(entries) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")
    missing = {"c", "z0", "x0", "g_expr"} - set(entries)
    if missing:
        raise ConfigError(f"missing key(s): {', '.join(sorted(missing))}")
    spec = VonMisesSpec(
        c=_float("c", entries["c"]),
        z0=_float("z0", entries["z0"]),
        x0=_float("x0", entries["x0"]),
        g=parse_expression(entries["g_expr"]),
        big_g=parse_expression(entries["G_expr"]) if "G_expr" in entries else None,
        name=entries.get("name", "custom"),
    )
    lower = _float("lower", entries["lower"]) if "lower" in entries else None
    return spec, lower


def load_spec_file(path: str | Path) -> tuple[VonMisesSpec, float | None]:
    return parse_spec_text(Path(path).read_text())


def load_distribution(path: str | Path) -> VonMises:
    spec, lower = load_spec_file(path)
    return VonMises(spec, lower=lower)
