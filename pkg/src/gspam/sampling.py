"""Hash families, canonical grids and random direction ensembles."""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import GspamError

DEFAULT_C_HASH = 1.7
MAX_RETRIES = 50


@dataclass(frozen=True)
class HashFamily:
    """A (d, 2)-hash family stored as an ``(n_functions, d)`` array over {1, 2}."""

    d: int
    functions: np.ndarray
    t: int = 2

    def __len__(self):
        return self.functions.shape[0]

    def __iter__(self):
        return iter(self.functions)

    def separates_all_pairs(self):
        """Exhaustive check that every pair i < j is split by some function."""
        for i in range(self.d - 1):
            same = np.all(self.functions[:, i:i + 1] == self.functions[:, i + 1:], axis=0)
            if np.any(same):
                return False
        return True


def hash_family_size(d, C1=DEFAULT_C_HASH):
    # ceil(C1 log d) functions, but never fewer than log2 d bits: below that
    # two variables must share a codeword and no family can cover every pair
    return max(1, math.ceil(C1 * math.log(d)), math.ceil(math.log2(d)))


def hash_family_bound(d, C1=DEFAULT_C_HASH, t=2):
    return math.ceil(t * (C1 + 1) * math.e ** t * math.log(d))


def build_hash_family(d, C1=DEFAULT_C_HASH, rng=None):
    """Draw a random (d, 2)-hash family.

    Variable ``i`` receives the column ``(h_1(i), ..., h_s(i))``; a family
    covers every pair exactly when these codewords are distinct, so the draw
    is uniform over covering families of size ``s``.  Coverage is re-checked
    by enumeration before returning.
    """
    if d < 2:
        raise ValueError(f"hash families need d >= 2, got {d}")
    if not C1 > 1:
        raise ValueError(f"C1 must exceed 1, got {C1}")
    rng = np.random.default_rng(rng)
    s = hash_family_size(d, C1)
    if s > hash_family_bound(d, C1):
        raise GspamError(f"family size {s} exceeds the bound {hash_family_bound(d, C1)}")
    bits = np.arange(s, dtype=np.int64)
    for _ in range(MAX_RETRIES):
        codes = rng.choice(2**s, size=d, replace=False).astype(np.int64)
        functions = ((codes[None, :] >> bits[:, None]) & 1) + 1
        family = HashFamily(d, functions.astype(np.int8))
        if family.separates_all_pairs():
            return family
    raise GspamError(f"no covering hash family after {MAX_RETRIES} draws (d={d}, C1={C1})")


@dataclass(frozen=True)
class GridSet:
    """Grid points as an ``(n, dim)`` array plus how they were built."""

    points: np.ndarray
    m_x: int
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return self.points.shape[0]


def lattice(m_x):
    if m_x < 1:
        raise ValueError(f"grid resolution must be >= 1, got {m_x}")
    return np.arange(-m_x, m_x + 1) / m_x


def _plane(e1, e2, m_x):
    c = lattice(m_x)
    c1, c2 = np.meshgrid(c, c, indexing="ij")
    return c1.reshape(-1, 1) * e1 + c2.reshape(-1, 1) * e2


def grid_chi(h, m_x):
    """Points ``c1 e1(h) + c2 e2(h)`` in lexicographic ``(c1, c2)`` order."""
    h = np.asarray(h)
    e1 = (h == 1).astype(float)
    e2 = (h == 2).astype(float)
    return GridSet(_plane(e1, e2, m_x), m_x, {"kind": "chi", "h": tuple(int(v) for v in h)})


def grid_chi_i(i, processed, k, m_x):
    """Grid of the two-dimensional probe for variable ``i`` (labels 1..k).

    Returns the grid and the direction ``e2(i)``, which is one on every
    variable other than ``i`` that has not been processed yet.
    """
    processed = set(processed)
    if i in processed:
        raise ValueError(f"variable {i} is already processed")
    e1 = np.zeros(k)
    e1[i - 1] = 1.0
    e2 = np.ones(k)
    e2[i - 1] = 0.0
    for j in processed:
        e2[j - 1] = 0.0
    grid = GridSet(_plane(e1, e2, m_x), m_x,
                   {"kind": "chi_i", "i": i, "processed": tuple(sorted(processed))})
    return grid, e2


def grid_chi_diag(d, m_x):
    """The ``2 m_x + 1`` points ``(x, ..., x)`` on the main diagonal."""
    c = lattice(m_x)
    return GridSet(np.repeat(c[:, None], d, axis=1), m_x, {"kind": "diag"})


@dataclass(frozen=True)
class DirectionSet:
    rows: np.ndarray
    kind: str

    @property
    def m(self):
        return self.rows.shape[0]

    @property
    def dim(self):
        return self.rows.shape[1]


def sample_directions(m, d, kind="bernoulli", rng=None):
    """Random directions, one per row.

    ``bernoulli``: entries ``+-1/sqrt(m)`` with probability 1/2 each.
    ``ternary``: entries ``+-sqrt(3/m)`` with probability 1/6 each, else 0.
    """
    if m < 1:
        raise ValueError(f"need at least one direction, got m={m}")
    rng = np.random.default_rng(rng)
    if kind == "bernoulli":
        rows = rng.choice([-1.0, 1.0], size=(m, d)) / np.sqrt(m)
    elif kind == "ternary":
        u = rng.random((m, d))
        rows = np.where(u < 1 / 6, 1.0, np.where(u < 1 / 3, -1.0, 0.0)) * np.sqrt(3.0 / m)
    else:
        raise ValueError(f"unknown direction kind {kind!r}")
    return DirectionSet(rows, kind)
