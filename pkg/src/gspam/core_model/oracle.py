"""Noise models, query accounting and the point-query oracle."""

import threading
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DomainError

DEFAULT_R = 0.1


@dataclass(frozen=True)
class Noiseless:
    kind = "noiseless"

    def draw(self, rng, size):
        return np.zeros(size)


@dataclass(frozen=True)
class BoundedNoise:
    """Arbitrary noise bounded by ``eps`` in absolute value.

    ``generator(rng, size)`` must return values in ``(-eps, eps)``; uniform
    draws are used when it is omitted.
    """

    eps: float
    generator: object = field(default=None, compare=False)
    kind = "bounded"

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")

    def draw(self, rng, size):
        if self.eps == 0:
            return np.zeros(size)
        if self.generator is None:
            return rng.uniform(-self.eps, self.eps, size=size)
        out = np.asarray(self.generator(rng, size), dtype=float)
        if np.any(np.abs(out) >= self.eps):
            raise ValueError("noise generator left the open interval (-eps, eps)")
        return out


def sign_flip_generator(eps, shrink=1e-9):
    """Adversarial generator alternating between +eps and -eps (just inside)."""
    state = {"n": 0}
    amp = eps * (1.0 - shrink)

    def generate(rng, size):
        size = int(np.prod(size))
        idx = state["n"] + np.arange(size)
        state["n"] += size
        return np.where(idx % 2 == 0, amp, -amp)

    return generate


@dataclass(frozen=True)
class GaussianNoise:
    sigma2: float
    kind = "gaussian"

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")

    @property
    def sigma(self):
        return float(np.sqrt(self.sigma2))

    def draw(self, rng, size):
        return rng.normal(0.0, self.sigma, size=size)


def noise_from_config(block):
    """``None``/``{}`` -> noiseless; ``{"eps": e}`` -> bounded; ``{"sigma2": s}`` -> Gaussian."""
    if not block:
        return Noiseless()
    if "sigma2" in block and block["sigma2"]:
        return GaussianNoise(float(block["sigma2"]))
    if "eps" in block:
        return BoundedNoise(float(block["eps"]))
    return Noiseless()


class QueryLedger:
    """Thread-safe query counters, total and per phase."""

    def __init__(self):
        self._lock = threading.Lock()
        self._phases = Counter()

    def record(self, phase, n=1):
        if n < 0:
            raise ValueError("query counts cannot decrease")
        with self._lock:
            self._phases[phase] += int(n)

    @property
    def total_queries(self):
        with self._lock:
            return sum(self._phases.values())

    @property
    def per_phase(self):
        with self._lock:
            return dict(self._phases)

    def merge(self, other):
        for phase, n in other.per_phase.items():
            self.record(phase, n)
        return self

    def snapshot(self):
        return {"total": self.total_queries, "per_phase": self.per_phase}

    def __repr__(self):
        return f"QueryLedger(total={self.total_queries}, per_phase={self.per_phase})"


class QueryOracle:
    """Black-box access to ``f`` on the enlarged cube ``[-(1+r), 1+r]^d``.

    Calling the oracle with an ``(n, d)`` array returns ``n`` values and
    charges ``n * repeats`` queries to ``phase``.  With ``repeats > 1`` each
    point is queried that many times and the answers are averaged.
    """

    def __init__(self, model, noise=None, rng=None, ledger=None, r=DEFAULT_R):
        self.model = model
        self.noise = noise if noise is not None else Noiseless()
        self.rng = rng if rng is not None else np.random.default_rng()
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.r = max(float(r), DEFAULT_R)

    @property
    def d(self):
        return self.model.d

    def __call__(self, X, phase="default", repeats=1):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        bound = 1.0 + self.r
        if np.any(np.abs(X) > bound * (1 + 1e-12)):
            worst = float(np.max(np.abs(X)))
            raise DomainError(f"query coordinate {worst:.6g} outside [-{bound:.6g}, {bound:.6g}]")
        repeats = int(repeats)
        values = self.model.evaluate(X)
        if not isinstance(self.noise, Noiseless):
            if repeats == 1:
                values = values + self.noise.draw(self.rng, values.shape)
            else:
                values = values + self.noise.draw(self.rng, (repeats, values.size)).mean(axis=0)
        self.ledger.record(phase, X.shape[0] * repeats)
        return float(values[0]) if single else values


def query(model, x, noise, rng, ledger, phase, r=DEFAULT_R):
    """Single noisy evaluation of ``model`` at ``x`` (charged to ``phase``)."""
    return QueryOracle(model, noise, rng, ledger, r)(np.asarray(x, dtype=float), phase)
