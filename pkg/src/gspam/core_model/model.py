"""Ground-truth sparse additive models with pairwise interactions.

Variables are labelled ``1..d`` in every set-valued quantity (S1, S2, ...).
Arrays are ordinary numpy arrays, so variable ``p`` lives in column ``p - 1``.
"""

from dataclasses import dataclass, field
from collections import Counter

import numpy as np

from ..exceptions import ModelError

FD_STEP = 1e-5
_PROBE_STEP = 1e-3
_PROBE_TOL = 1e-8


def _is_truly_bivariate(fn, n_probe=9):
    # mixed second difference on a probe grid; zero everywhere means the
    # callable splits into g(x) + h(y)
    t = np.linspace(-1.0, 1.0, n_probe)
    xx, yy = np.meshgrid(t, t, indexing="ij")
    h = _PROBE_STEP
    mixed = (fn(xx + h, yy + h) - fn(xx + h, yy - h)
             - fn(xx - h, yy + h) + fn(xx - h, yy - h)) / (4 * h * h)
    return bool(np.max(np.abs(mixed)) > _PROBE_TOL)


@dataclass(frozen=True)
class ModelSpec:
    """A function ``f = sum_p phi_p(x_p) + sum_(l,l') phi_(l,l')(x_l, x_l')``.

    Parameters
    ----------
    d : int
        Ambient dimension.
    univariate : sequence of (int, callable)
        Pairs ``(p, phi_p)`` with ``p`` in ``1..d``.
    bivariate : sequence of ((int, int), callable)
        Pairs ``((l, l'), phi)`` with ``l < l'``.  Each callable must depend
        jointly on both arguments.
    name : str
        Label used in reports.
    constants : dict
        Default problem constants (B3, D1, D2, lambda1, lambda2) shipped with
        builtin models; empty for custom models.
    """

    d: int
    univariate: tuple = ()
    bivariate: tuple = ()
    name: str = "custom"
    constants: dict = field(default_factory=dict, compare=False)
    check_bivariate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ModelError(f"dimension must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "univariate", tuple((int(p), fn) for p, fn in self.univariate))
        object.__setattr__(self, "bivariate",
                           tuple(((int(a), int(b)), fn) for (a, b), fn in self.bivariate))
        for p, _ in self.univariate:
            if not 1 <= p <= self.d:
                raise ModelError(f"univariate index {p} outside [1, {self.d}]")
        dup = [p for p, c in Counter(p for p, _ in self.univariate).items() if c > 1]
        if dup:
            raise ModelError(f"duplicate univariate index {dup[0]}")
        seen = set()
        for (a, b), fn in self.bivariate:
            if not (1 <= a <= self.d and 1 <= b <= self.d):
                raise ModelError(f"pair ({a}, {b}) outside [1, {self.d}]")
            if not a < b:
                raise ModelError(f"pair ({a}, {b}) must satisfy l < l'")
            if (a, b) in seen:
                raise ModelError(f"duplicate pair ({a}, {b})")
            seen.add((a, b))
            if self.check_bivariate and not _is_truly_bivariate(fn):
                raise ModelError(f"term on ({a}, {b}) has a vanishing cross partial")

    # -- structure ---------------------------------------------------------
    @property
    def S2(self):
        return frozenset(pair for pair, _ in self.bivariate)

    @property
    def S2_var(self):
        return frozenset(v for pair in self.S2 for v in pair)

    @property
    def S1(self):
        """Univariate support after merging shared variables into S2."""
        return frozenset(p for p, _ in self.univariate) - self.S2_var

    def degree(self, l):
        return sum(l in pair for pair in self.S2)

    @property
    def degrees(self):
        return {v: self.degree(v) for v in sorted(self.S2_var)}

    @property
    def rho_m(self):
        return max(self.degrees.values(), default=0)

    @property
    def k(self):
        return len(self.S1 | self.S2_var)

    @property
    def support(self):
        return self.S1, self.S2

    # -- evaluation --------------------------------------------------------
    def evaluate(self, X):
        """Evaluate f at the rows of ``X`` (shape ``(n, d)`` or ``(d,)``)."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.d:
            raise ModelError(f"expected points with {self.d} coordinates, got {X.shape[1]}")
        out = np.zeros(X.shape[0])
        for p, fn in self.univariate:
            out += fn(X[:, p - 1])
        for (a, b), fn in self.bivariate:
            out += fn(X[:, a - 1], X[:, b - 1])
        return out[0] if single else out

    __call__ = evaluate


def true_gradient(model, x, h=FD_STEP):
    """Gradient of ``model`` at ``x`` by central differences on each term."""
    x = np.asarray(x, dtype=float)
    g = np.zeros(model.d)
    for p, fn in model.univariate:
        t = x[p - 1]
        g[p - 1] += (fn(t + h) - fn(t - h)) / (2 * h)
    for (a, b), fn in model.bivariate:
        s, t = x[a - 1], x[b - 1]
        g[a - 1] += (fn(s + h, t) - fn(s - h, t)) / (2 * h)
        g[b - 1] += (fn(s, t + h) - fn(s, t - h)) / (2 * h)
    return g


def true_hessian(model, x, h=FD_STEP):
    """Hessian of ``model`` at ``x``; only structurally nonzero entries are filled."""
    x = np.asarray(x, dtype=float)
    H = np.zeros((model.d, model.d))
    for p, fn in model.univariate:
        t = x[p - 1]
        H[p - 1, p - 1] += (fn(t + h) - 2 * fn(t) + fn(t - h)) / h**2
    for (a, b), fn in model.bivariate:
        s, t = x[a - 1], x[b - 1]
        i, j = a - 1, b - 1
        H[i, i] += (fn(s + h, t) - 2 * fn(s, t) + fn(s - h, t)) / h**2
        H[j, j] += (fn(s, t + h) - 2 * fn(s, t) + fn(s, t - h)) / h**2
        mixed = (fn(s + h, t + h) - fn(s + h, t - h)
                 - fn(s - h, t + h) + fn(s - h, t - h)) / (4 * h * h)
        H[i, j] += mixed
        H[j, i] += mixed
    return H
