"""Unique ANOVA form of a model under the uniform measure on [-1, 1]^d."""

from dataclasses import dataclass

import numpy as np

from .model import ModelSpec

MIN_QUAD_N = 16
QUAD_TOL = 1e-8


def simpson_rule(quad_n):
    """Nodes and mean-weights of composite Simpson on [-1, 1].

    ``quad_n`` is the number of nodes; an even count is bumped by one so the
    panel count stays even.  Weights sum to one, so ``w @ f(nodes)`` is the
    uniform expectation.
    """
    if quad_n < MIN_QUAD_N:
        raise ValueError(f"quad_n must be >= {MIN_QUAD_N}, got {quad_n}")
    n = quad_n + 1 if quad_n % 2 == 0 else quad_n
    nodes = np.linspace(-1.0, 1.0, n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (2.0 / (n - 1)) / 3.0 / 2.0
    return nodes, w


class _Quad:
    def __init__(self, quad_n):
        self.nodes, self.w = simpson_rule(quad_n)

    def mean1(self, fn):
        return float(self.w @ fn(self.nodes))

    def mean2(self, fn):
        vals = fn(self.nodes[:, None], self.nodes[None, :])
        return float(self.w @ vals @ self.w)

    def mean_first(self, fn, y):
        # E over the first argument, as a function of the second
        y = np.asarray(y, dtype=float)
        vals = fn(self.nodes[:, None], y.reshape(1, -1))
        return (self.w @ vals).reshape(y.shape)

    def mean_second(self, fn, x):
        x = np.asarray(x, dtype=float)
        vals = fn(x.reshape(-1, 1), self.nodes[None, :])
        return (vals @ self.w).reshape(x.shape)


@dataclass
class CanonicalModel:
    """``f = c + sum phi_p + sum phi_(l,l') + sum phi_q`` with centered parts.

    ``univariate`` maps p in S1 to a callable, ``bivariate`` maps pairs to
    callables of two arrays, ``net_marginal`` maps variables of degree > 1 to
    callables.  ``quad_n`` records the quadrature used for every expectation.
    """

    c: float
    univariate: dict
    bivariate: dict
    net_marginal: dict
    degrees: dict
    quad_n: int
    d: int

    def evaluate(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(X.shape[0], self.c)
        for p, fn in self.univariate.items():
            out += fn(X[:, p - 1])
        for (a, b), fn in self.bivariate.items():
            out += fn(X[:, a - 1], X[:, b - 1])
        for q, fn in self.net_marginal.items():
            out += fn(X[:, q - 1])
        return out

    @property
    def S1(self):
        return frozenset(self.univariate)

    @property
    def S2(self):
        return frozenset(self.bivariate)


def _centered_uni(fn, mean):
    return lambda x: fn(x) - mean


def _centered_pair(fn, quad, deg_a, deg_b):
    if deg_a == 1 and deg_b == 1:
        m = quad.mean2(fn)
        return lambda x, y: fn(x, y) - m
    if deg_a == 1:
        return lambda x, y: fn(x, y) - quad.mean_first(fn, np.broadcast_to(y, np.broadcast(x, y).shape))
    if deg_b == 1:
        return lambda x, y: fn(x, y) - quad.mean_second(fn, np.broadcast_to(x, np.broadcast(x, y).shape))
    m = quad.mean2(fn)

    def centered(x, y):
        shape = np.broadcast(x, y).shape
        xb, yb = np.broadcast_to(x, shape), np.broadcast_to(y, shape)
        return fn(x, y) - quad.mean_first(fn, yb) - quad.mean_second(fn, xb) + m

    return centered


def _net_marginal(q, pairs, extra, quad):
    # pairs: list of (fn, q_is_first); extra: optional univariate on q
    consts = [quad.mean2(fn) for fn, _ in pairs]
    extra_mean = quad.mean1(extra) if extra is not None else 0.0

    def marginal(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for (fn, first), m in zip(pairs, consts):
            out += (quad.mean_second(fn, x) if first else quad.mean_first(fn, x)) - m
        if extra is not None:
            out += extra(x) - extra_mean
        return out

    return marginal


def _with_univariate(fn, left=None, right=None):
    def merged(x, y):
        out = fn(x, y)
        if left is not None:
            out = out + left(x)
        if right is not None:
            out = out + right(y)
        return out

    return merged


def anova_canonicalize(model: ModelSpec, quad_n=256):
    """Return the :class:`CanonicalModel` of ``model``.

    Expectations use composite Simpson with ``quad_n`` nodes per axis.
    Univariate terms on variables that also appear in a pair are folded into
    the bivariate side: into the pair itself when the variable has degree one,
    otherwise into that variable's net marginal.
    """
    quad = _Quad(quad_n)
    degrees = model.degrees
    uni = dict(model.univariate)
    c = sum(quad.mean1(fn) for fn in uni.values())
    c += sum(quad.mean2(fn) for _, fn in model.bivariate)

    merged = {}
    for (a, b), fn in model.bivariate:
        left = uni.get(a) if degrees[a] == 1 else None
        right = uni.get(b) if degrees[b] == 1 else None
        merged[(a, b)] = _with_univariate(fn, left, right) if (left is not None or right is not None) else fn

    univariate = {p: _centered_uni(fn, quad.mean1(fn))
                  for p, fn in uni.items() if p not in degrees}
    bivariate = {pair: _centered_pair(fn, quad, degrees[pair[0]], degrees[pair[1]])
                 for pair, fn in merged.items()}
    net = {}
    for q, deg in degrees.items():
        if deg > 1:
            pairs = [(fn, pair[0] == q) for pair, fn in merged.items() if q in pair]
            net[q] = _net_marginal(q, pairs, uni.get(q), quad)
    return CanonicalModel(c, univariate, bivariate, net, dict(degrees), quad_n, model.d)
