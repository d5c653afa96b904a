"""Named test functions for the CLI experiments.

Each entry records a bound ``lam`` with ``1/lam <= f <= lam``.

Two-variable functions on [0, 1)^2 (``f(x, y)``):

  const:c          f = c
  sep-exp[:a,b]    f = exp(a sin 2 pi x) * exp(b cos 2 pi y), a = b = 0.5
  two-block[:c]    f = 1 + x for y < c, else 1; c = 0.5
  smooth[:a]       f = exp(a sin 2 pi (x + y)), a = 0.5

One-variable functions on [0, 1) (``g(x)``):

  const:c          g = c
  indicator        g = 2 on [0, 1/2), 1 elsewhere
  exp-sin[:a]      g = exp(a sin 2 pi x), a = 1
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CatalogFunction:
    name: str
    f: Callable
    lam: float
    params: tuple = ()


def _args(arg, defaults):
    if not arg:
        return defaults
    vals = tuple(float(v) for v in arg.split(","))
    if len(vals) != len(defaults):
        raise ValueError(f"expected {len(defaults)} parameter(s), got {arg!r}")
    return vals


def _const_lam(c):
    if not c > 0:
        raise ValueError("constant must be positive")
    return max(c, 1.0 / c)


def function2d(spec):
    name, _, arg = spec.partition(":")
    if name == "const":
        if not arg:
            raise ValueError("const needs a value, e.g. const:2")
        c = float(arg)
        return CatalogFunction(spec, lambda x, y: np.full(np.broadcast(x, y).shape, c), _const_lam(c), (c,))
    if name == "sep-exp":
        a, b = _args(arg, (0.5, 0.5))
        return CatalogFunction(
            spec,
            lambda x, y: np.exp(a * np.sin(TWO_PI * x)) * np.exp(b * np.cos(TWO_PI * y)),
            math.exp(abs(a) + abs(b)),
            (a, b),
        )
    if name == "two-block":
        (c,) = _args(arg, (0.5,))
        if not 0.0 < c < 1.0:
            raise ValueError("two-block split must lie in (0, 1)")
        return CatalogFunction(spec, lambda x, y: np.where(y < c, 1.0 + x, 1.0), 2.0, (c,))
    if name == "smooth":
        (a,) = _args(arg, (0.5,))
        return CatalogFunction(
            spec, lambda x, y: np.exp(a * np.sin(TWO_PI * (x + y))), math.exp(abs(a)), (a,)
        )
    raise ValueError(f"unknown catalog function {spec!r}")


def function1d(spec):
    name, _, arg = spec.partition(":")
    if name == "const":
        if not arg:
            raise ValueError("const needs a value, e.g. const:2")
        c = float(arg)
        return CatalogFunction(spec, lambda x: np.full(np.shape(x), c), _const_lam(c), (c,))
    if name == "indicator" and not arg:
        return CatalogFunction(spec, lambda x: np.where(x < 0.5, 2.0, 1.0), 2.0)
    if name == "exp-sin":
        (a,) = _args(arg, (1.0,))
        return CatalogFunction(spec, lambda x: np.exp(a * np.sin(TWO_PI * x)), math.exp(abs(a)), (a,))
    raise ValueError(f"unknown catalog function {spec!r}")
