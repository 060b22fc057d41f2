"""Least-squares cubic splines on uniform knots, with exact uniform means.

The B-spline basis is evaluated with :class:`scipy.interpolate.BSpline`;
fitting, centering and serialization are done here.  Because clamped
B-splines form a partition of unity, every centering operation reduces to a
shift of coefficients and estimates stay in spline form.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

DEGREE = 3
MIN_SAMPLES = 8
_HEADER = "gspam-spline 1"


def uniform_knots(n_intervals):
    inner = np.linspace(-1.0, 1.0, n_intervals + 1)
    return np.concatenate([[-1.0] * DEGREE, inner, [1.0] * DEGREE])


def mean_weights(knots):
    """Uniform-measure means of each B-spline on [-1, 1]."""
    knots = np.asarray(knots, dtype=float)
    n_basis = knots.size - DEGREE - 1
    return (knots[DEGREE + 1:DEGREE + 1 + n_basis] - knots[:n_basis]) / (DEGREE + 1) / 2.0


def design(knots, x):
    x = np.clip(np.asarray(x, dtype=float).ravel(), -1.0, 1.0)
    return BSpline.design_matrix(x, knots, DEGREE).toarray()


def _check_axis(t):
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples per axis, got {t.size}")
    ref = np.linspace(-1.0, 1.0, t.size)
    if not np.allclose(t, ref, rtol=0, atol=1e-12):
        raise ValueError("samples must be uniformly spaced on [-1, 1] and include both endpoints")
    return t


@dataclass(frozen=True)
class SplineEstimate:
    """A cubic spline (``arity`` 1) or tensor-product cubic spline (``arity`` 2).

    ``coef`` has shape ``(nb,)`` or ``(nb_x, nb_y)``; ``knots`` holds one
    clamped knot vector per axis and ``n`` the samples per axis behind it.
    """

    arity: int
    knots: tuple
    coef: np.ndarray
    n: int

    def __call__(self, x, y=None):
        if self.arity == 1:
            x = np.asarray(x, dtype=float)
            return (design(self.knots[0], x) @ self.coef).reshape(x.shape)
        shape = np.broadcast(x, y).shape
        xb = np.broadcast_to(x, shape)
        yb = np.broadcast_to(y, shape)
        Bx = design(self.knots[0], xb)
        By = design(self.knots[1], yb)
        return np.sum((Bx @ self.coef) * By, axis=1).reshape(shape)

    # -- expectations under the uniform measure ---------------------------
    def weights(self, axis=0):
        return mean_weights(self.knots[axis])

    def mean(self):
        if self.arity == 1:
            return float(self.weights() @ self.coef)
        return float(self.weights(0) @ self.coef @ self.weights(1))

    def mean_over(self, axis):
        """Expectation over one argument of a bivariate spline, as a 1-D spline."""
        if self.arity != 2:
            raise ValueError("mean_over needs a bivariate spline")
        if axis == 0:
            return SplineEstimate(1, (self.knots[1],), self.weights(0) @ self.coef, self.n)
        return SplineEstimate(1, (self.knots[0],), self.coef @ self.weights(1), self.n)

    # -- centering ---------------------------------------------------------
    def minus_constant(self, c):
        return SplineEstimate(self.arity, self.knots, self.coef - c, self.n)

    def centered(self):
        return self.minus_constant(self.mean())

    def minus_marginal(self, axis):
        """Subtract the mean over ``axis`` (a function of the other argument)."""
        g = self.mean_over(axis).coef
        coef = self.coef - (g[None, :] if axis == 0 else g[:, None])
        return SplineEstimate(2, self.knots, coef, self.n)

    def double_centered(self):
        # the second pass also adds back the overall mean removed twice
        return self.minus_marginal(0).minus_marginal(1)

    # -- text format -------------------------------------------------------
    def to_text(self):
        lines = [_HEADER, f"arity {self.arity}", f"samples {self.n}"]
        for k in self.knots:
            lines.append("knots " + " ".join(repr(float(v)) for v in k))
        lines.append("shape " + " ".join(str(s) for s in self.coef.shape))
        lines.append("coef " + " ".join(repr(float(v)) for v in self.coef.ravel()))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0] != _HEADER:
            raise ValueError("not a serialized spline estimate")
        fields = {}
        knots = []
        for ln in lines[1:]:
            key, _, rest = ln.partition(" ")
            if key == "knots":
                knots.append(np.array([float(v) for v in rest.split()]))
            else:
                fields[key] = rest
        arity = int(fields["arity"])
        shape = tuple(int(v) for v in fields["shape"].split())
        coef = np.array([float(v) for v in fields["coef"].split()]).reshape(shape)
        if len(knots) != arity:
            raise ValueError(f"expected {arity} knot vectors, found {len(knots)}")
        return cls(arity, tuple(knots), coef, int(fields["samples"]))


def quasi_interpolate_1d(t, values):
    """Least-squares cubic spline through ``n`` uniform samples on ``ceil(n/4)`` intervals."""
    t = _check_axis(t)
    values = np.asarray(values, dtype=float)
    if values.shape != t.shape:
        raise ValueError("one value per sample point is required")
    knots = uniform_knots(math.ceil(t.size / 4))
    coef, *_ = np.linalg.lstsq(design(knots, t), values, rcond=None)
    return SplineEstimate(1, (knots,), coef, t.size)


def quasi_interpolate_2d(s, t, F):
    """Tensor-product least-squares fit to grid samples ``F[i, j] = u(s_i, t_j)``."""
    s = _check_axis(s)
    t = _check_axis(t)
    F = np.asarray(F, dtype=float)
    if F.shape != (s.size, t.size):
        raise ValueError(f"grid values must have shape {(s.size, t.size)}, got {F.shape}")
    kx = uniform_knots(math.ceil(s.size / 4))
    ky = uniform_knots(math.ceil(t.size / 4))
    coef = np.linalg.pinv(design(kx, s)) @ F @ np.linalg.pinv(design(ky, t)).T
    return SplineEstimate(2, (kx, ky), coef, s.size)
