"""Component estimates from queries along one- and two-dimensional slices.

Every slice keeps all coordinates outside it at zero.  The raw fit of a
slice therefore carries the wanted component plus functions of fewer
variables, which the degree-dependent centering removes.
"""

from dataclasses import dataclass, field

import numpy as np

from ..core_model.canonical import simpson_rule
from .splines import quasi_interpolate_1d, quasi_interpolate_2d

DEFAULT_N = 64
DEFAULT_N1 = 32
GAUSSIAN_REPEATS = 50
_SLICE_QUAD = 257


def _axis(n):
    return np.linspace(-1.0, 1.0, n)


def _query(oracle, X, phase, repeats):
    return oracle(X, phase, repeats)


def _default_repeats(oracle, repeats):
    if repeats is not None:
        return int(repeats)
    return GAUSSIAN_REPEATS if getattr(oracle.noise, "kind", "") == "gaussian" else 1


def _univariate_raw(oracle, p, n, repeats):
    t = _axis(n)
    X = np.zeros((n, oracle.d))
    X[:, p - 1] = t
    return quasi_interpolate_1d(t, _query(oracle, X, "components", repeats))


def _bivariate_raw(oracle, cols_s, cols_t, n1, repeats):
    t = _axis(n1)
    ss, tt = np.meshgrid(t, t, indexing="ij")
    X = np.zeros((n1 * n1, oracle.d))
    for c in cols_s:
        X[:, c - 1] = ss.ravel()
    for c in cols_t:
        X[:, c - 1] = tt.ravel()
    F = _query(oracle, X, "components", repeats).reshape(n1, n1)
    return quasi_interpolate_2d(t, t, F)


def estimate_univariate(oracle, p, n=DEFAULT_N, repeats=None):
    """Centered estimate of ``phi_p`` from ``n`` queries on the ``x_p`` axis."""
    raw = _univariate_raw(oracle, p, n, _default_repeats(oracle, repeats))
    return raw.centered()


def _center_pair(raw, deg_l, deg_lp):
    if deg_l == 1 and deg_lp == 1:
        return raw.centered()
    if deg_l == 1:
        return raw.minus_marginal(0)
    if deg_lp == 1:
        return raw.minus_marginal(1)
    return raw.double_centered()


def estimate_bivariate(oracle, pair, degrees, n1=DEFAULT_N1, repeats=None):
    """Centered estimate of ``phi_(l,l')`` from the ``n1 x n1`` slice grid.

    ``degrees`` is ``(degree(l), degree(l'))`` in the interaction graph.
    With both degrees one, the pair absorbs the univariate parts of both
    variables and only its mean is removed; a degree-one side keeps its
    univariate part and the other side's is removed through the marginal
    mean; with both degrees above one, both marginal means are removed.
    """
    l, lp = pair
    raw = _bivariate_raw(oracle, [l], [lp], n1, _default_repeats(oracle, repeats))
    return _center_pair(raw, *degrees)


def estimate_net_marginal(oracle, l, S2_var, n1=DEFAULT_N1, repeats=None):
    """Net univariate effect of a variable of degree above one.

    Variable ``l`` runs along the first axis and every other variable of
    ``S2_var`` is tied to the second; the estimate is the mean over the
    second axis minus the overall mean.
    """
    others = [v for v in sorted(S2_var) if v != l]
    raw = _bivariate_raw(oracle, [l], others, n1, _default_repeats(oracle, repeats))
    return raw.mean_over(1).centered()


@dataclass
class ComponentEstimates:
    """``f ~ c + sum phi_p + sum phi_(l,l') + sum phi_q`` with spline parts."""

    c: float
    univariate: dict = field(default_factory=dict)
    bivariate: dict = field(default_factory=dict)
    net_marginal: dict = field(default_factory=dict)
    d: int = None

    def evaluate(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(X.shape[0], self.c)
        for p, s in self.univariate.items():
            out += s(X[:, p - 1])
        for (a, b), s in self.bivariate.items():
            out += s(X[:, a - 1], X[:, b - 1])
        for q, s in self.net_marginal.items():
            out += s(X[:, q - 1])
        return out

    def to_text(self):
        blocks = [f"constant {self.c!r}"]
        for p, s in sorted(self.univariate.items()):
            blocks.append(f"univariate {p}\n{s.to_text()}")
        for (a, b), s in sorted(self.bivariate.items()):
            blocks.append(f"bivariate {a} {b}\n{s.to_text()}")
        for q, s in sorted(self.net_marginal.items()):
            blocks.append(f"net_marginal {q}\n{s.to_text()}")
        return "\n".join(blocks)


def _slice_mean(est, cols_s, cols_t=()):
    """Uniform mean of ``est`` without its constant over a slice through the origin."""
    nodes, w = simpson_rule(_SLICE_QUAD)
    if cols_t:
        ss, tt = np.meshgrid(nodes, nodes, indexing="ij")
        weights = np.outer(w, w).ravel()
        X = np.zeros((ss.size, est.d))
        X[:, [c - 1 for c in cols_s]] = ss.reshape(-1, 1)
        X[:, [c - 1 for c in cols_t]] = tt.reshape(-1, 1)
    else:
        weights = w
        X = np.zeros((nodes.size, est.d))
        X[:, [c - 1 for c in cols_s]] = nodes.reshape(-1, 1)
    return float(weights @ (est.evaluate(X) - est.c))


def estimate_components(oracle, S1, S2, n=DEFAULT_N, n1=DEFAULT_N1, repeats=None):
    """Estimate every component and the constant ``c`` given the supports.

    The mean of each raw slice fit equals ``c`` plus the mean of the other
    components over that slice, so ``c`` is the average over slices of the
    raw mean minus the estimated components' slice mean.  No extra queries
    are spent on it.
    """
    repeats = _default_repeats(oracle, repeats)
    S2 = sorted(tuple(p) for p in S2)
    degrees = {}
    for a, b in S2:
        degrees[a] = degrees.get(a, 0) + 1
        degrees[b] = degrees.get(b, 0) + 1
    S2_var = set(degrees)
    est = ComponentEstimates(0.0, d=oracle.d)
    slices = []
    for p in sorted(set(S1) - S2_var):
        raw = _univariate_raw(oracle, p, n, repeats)
        est.univariate[p] = raw.centered()
        slices.append((raw.mean(), [p], []))
    for pair in S2:
        raw = _bivariate_raw(oracle, [pair[0]], [pair[1]], n1, repeats)
        est.bivariate[pair] = _center_pair(raw, degrees[pair[0]], degrees[pair[1]])
        slices.append((raw.mean(), [pair[0]], [pair[1]]))
    for q in sorted(v for v, deg in degrees.items() if deg > 1):
        est.net_marginal[q] = estimate_net_marginal(oracle, q, S2_var, n1, repeats)
    if slices:
        est.c = float(np.mean([m - _slice_mean(est, cs, ct) for m, cs, ct in slices]))
    else:
        est.c = float(_query(oracle, np.zeros((1, oracle.d)), "components", repeats)[0])
    return est
