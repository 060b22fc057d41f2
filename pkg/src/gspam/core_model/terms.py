"""Small expression grammar for component functions.

Univariate expressions map an array ``x`` to an array of the same shape.
Bivariate expressions map two broadcastable arrays ``(x, y)``.  Every
expression round-trips through a JSON-compatible dict, which is how model
configs describe custom terms::

    {"poly": [0, 0, -3]}                        # -3 x^2
    {"sin": {"amp": 10, "freq": 3.14159}}       # 10 sin(pi x)
    {"exp": {"amp": 5, "rate": -2}}             # 5 exp(-2 x)
    {"sum": [{...}, {...}]}
    {"product": [{"poly": [0, 4]}, {"poly": [0, 1]}]}   # 4 x y
    {"of_product": {"sin": {"amp": 10, "freq": 3.14159}}} # 10 sin(pi x y)
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ModelError


@dataclass(frozen=True)
class Poly:
    coef: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, self.coef) + 0.0 * x

    def to_dict(self):
        return {"poly": list(self.coef)}


@dataclass(frozen=True)
class Sin:
    amp: float = 1.0
    freq: float = 1.0
    phase: float = 0.0

    def __call__(self, x):
        return self.amp * np.sin(self.freq * np.asarray(x, dtype=float) + self.phase)

    def to_dict(self):
        return {"sin": {"amp": self.amp, "freq": self.freq, "phase": self.phase}}


@dataclass(frozen=True)
class Cos:
    amp: float = 1.0
    freq: float = 1.0
    phase: float = 0.0

    def __call__(self, x):
        return self.amp * np.cos(self.freq * np.asarray(x, dtype=float) + self.phase)

    def to_dict(self):
        return {"cos": {"amp": self.amp, "freq": self.freq, "phase": self.phase}}


@dataclass(frozen=True)
class Exp:
    amp: float = 1.0
    rate: float = 1.0

    def __call__(self, x):
        return self.amp * np.exp(self.rate * np.asarray(x, dtype=float))

    def to_dict(self):
        return {"exp": {"amp": self.amp, "rate": self.rate}}


@dataclass(frozen=True)
class Sum:
    parts: tuple

    def __call__(self, *args):
        out = self.parts[0](*args)
        for part in self.parts[1:]:
            out = out + part(*args)
        return out

    def to_dict(self):
        return {"sum": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True)
class Product:
    """``g(x) * h(y)``."""

    left: object
    right: object

    def __call__(self, x, y):
        return self.left(x) * self.right(y)

    def to_dict(self):
        return {"product": [self.left.to_dict(), self.right.to_dict()]}


@dataclass(frozen=True)
class OfProduct:
    """``g(x * y)``."""

    outer: object

    def __call__(self, x, y):
        return self.outer(np.asarray(x, dtype=float) * np.asarray(y, dtype=float))

    def to_dict(self):
        return {"of_product": self.outer.to_dict()}


def _single_key(spec):
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ModelError(f"term expression must be a dict with one key, got {spec!r}")
    return next(iter(spec.items()))


def parse_univariate(spec):
    """Build a univariate expression from its dict form."""
    key, val = _single_key(spec)
    if key == "poly":
        if not val:
            raise ModelError("poly needs at least one coefficient")
        return Poly(tuple(float(c) for c in val))
    if key in ("sin", "cos"):
        cls = Sin if key == "sin" else Cos
        return cls(float(val.get("amp", 1.0)), float(val.get("freq", 1.0)),
                   float(val.get("phase", 0.0)))
    if key == "exp":
        return Exp(float(val.get("amp", 1.0)), float(val.get("rate", 1.0)))
    if key == "sum":
        return Sum(tuple(parse_univariate(v) for v in val))
    raise ModelError(f"unknown univariate expression {key!r}")


def parse_bivariate(spec):
    """Build a bivariate expression from its dict form."""
    key, val = _single_key(spec)
    if key == "product":
        if len(val) != 2:
            raise ModelError("product takes exactly two univariate factors")
        return Product(parse_univariate(val[0]), parse_univariate(val[1]))
    if key == "of_product":
        return OfProduct(parse_univariate(val))
    if key == "sum":
        return Sum(tuple(parse_bivariate(v) for v in val))
    raise ModelError(f"unknown bivariate expression {key!r}")
