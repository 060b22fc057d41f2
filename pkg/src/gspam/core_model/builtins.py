"""Builtin benchmark models and config-driven model construction."""

import numpy as np

from ..exceptions import ModelError
from .model import ModelSpec
from .terms import Cos, Exp, OfProduct, Poly, Product, Sin, Sum, parse_bivariate, parse_univariate

PI = np.pi

F1_CONSTANTS = {"B3": 6.0, "D1": 2.0, "D2": 3.0, "lambda1": 0.3, "lambda2": 1.0}
F23_CONSTANTS = {"B3": 35.0, "D1": 8.0, "D2": 4.0, "lambda1": 0.3, "lambda2": 0.3}

_X = Poly((0.0, 1.0))


def _bilinear(c):
    return Product(Poly((0.0, c)), _X)


def _f1(d, overlap):
    second = (4, 5) if overlap else (5, 6)
    uni = [(1, Poly((0.0, 2.0))), (2, Poly((0.0, 0.0, -3.0)))]
    biv = [((3, 4), _bilinear(4.0)), (second, _bilinear(-5.0))]
    return uni, biv, F1_CONSTANTS


def _f2(d, overlap):
    second = (4, 5) if overlap else (5, 6)
    uni = [(1, Sin(10.0, PI)), (2, Exp(5.0, -2.0))]
    biv = [((3, 4), OfProduct(Sin(10.0, PI))), (second, OfProduct(Exp(5.0, -2.0)))]
    return uni, biv, F23_CONSTANTS


def _f3(d, overlap):
    second = (4, 5) if overlap else (5, 6)
    g1 = Sum((Cos(10.0 / 3.0, PI), Poly((0.0, 0.0, 8.0))))
    g2 = Poly((0.0, 0.0, -5.0, 0.0, 5.0))
    g3 = Poly((0.0, 4.0, -5.0, 0.0, 5.0))
    # the x2 term carries 0.8*x4 inside the bracket, so x4 also has a
    # univariate part; canonicalization folds it into the (3, 4) pair
    uni = [(1, g1), (2, g2), (4, Poly((0.0, 4.0)))]
    biv = [((3, 4), OfProduct(g1)), (second, OfProduct(g3))]
    return uni, biv, F23_CONSTANTS


def _alphas(rng, n):
    return rng.uniform(2.0, 5.0, size=n)


def _k_family(T, seed, overlap):
    # non-overlap blocks need six variables each, so they use stride 6
    rng = np.random.default_rng(seed)
    a = _alphas(rng, 4)
    uni, biv = [], []
    stride = 5 if overlap else 6
    for i in range(T):
        o = stride * i
        uni += [(o + 1, Poly((0.0, a[0]))), (o + 2, Poly((0.0, 0.0, -a[1])))]
        last = (o + 4, o + 5) if overlap else (o + 5, o + 6)
        biv += [((o + 3, o + 4), _bilinear(a[2])), (last, _bilinear(-a[3]))]
    return uni, biv, F1_CONSTANTS


def _rho_family(T, seed):
    rng = np.random.default_rng(seed)
    a1, a2 = _alphas(rng, 2)
    a3 = _alphas(rng, T)
    a4 = _alphas(rng, 5)
    uni = [(1, Poly((0.0, a1))), (2, Poly((0.0, 0.0, -a2)))]
    coef = {}
    for i in range(1, T + 1):
        coef[(3, i + 3)] = coef.get((3, i + 3), 0.0) + a3[i - 1]
    for i in range(1, 6):
        pair = (2 + 2 * i, 3 + 2 * i)
        coef[pair] = coef.get(pair, 0.0) + a4[i - 1]
    biv = [(pair, _bilinear(c)) for pair, c in sorted(coef.items())]
    return uni, biv, F1_CONSTANTS


BUILTINS = ("f1_nonoverlap", "f1_overlap", "f2_nonoverlap", "f2_overlap",
            "f3_nonoverlap", "f3_overlap", "k_family", "k_family_nonoverlap", "rho_family")


def build_model(config):
    """Build a validated :class:`ModelSpec` from a config tree.

    Parameters
    ----------
    config : dict
        Either ``{"builtin": name, "d": int, "T": int, "seed": int}`` or
        ``{"d": int, "univariate": [{"index": p, "fn": expr}, ...],
        "bivariate": [{"pair": [l, l'], "fn": expr}, ...]}`` with expressions
        in the grammar of :mod:`gspam.core_model.terms`.  A plain string is
        treated as a builtin name with its minimal dimension.
    """
    if isinstance(config, str):
        config = {"builtin": config}
    config = dict(config)
    name = config.get("builtin")
    if name is not None:
        T = int(config.get("T", 1))
        seed = int(config.get("seed", 0))
        if name in ("f1_nonoverlap", "f1_overlap", "f2_nonoverlap", "f2_overlap",
                    "f3_nonoverlap", "f3_overlap"):
            maker = {"f1": _f1, "f2": _f2, "f3": _f3}[name[:2]]
            uni, biv, consts = maker(None, name.endswith("_overlap"))
        elif name == "k_family":
            uni, biv, consts = _k_family(T, seed, overlap=True)
        elif name == "k_family_nonoverlap":
            uni, biv, consts = _k_family(T, seed, overlap=False)
        elif name == "rho_family":
            if not 1 <= T <= 10:
                raise ModelError("rho_family needs 1 <= T <= 10")
            uni, biv, consts = _rho_family(T, seed)
        else:
            raise ModelError(f"unknown builtin model {name!r}; choose from {', '.join(BUILTINS)}")
        top = max([p for p, _ in uni] + [b for (_, b), _ in biv], default=1)
        d = int(config.get("d", top))
        if d < top:
            raise ModelError(f"builtin {name!r} references x{top} but d={d}")
        label = name if name not in ("k_family", "k_family_nonoverlap", "rho_family") else f"{name}[T={T}]"
        return ModelSpec(d, uni, biv, name=label, constants=dict(consts))

    if "d" not in config:
        raise ModelError("custom model config needs 'd'")
    uni = [(int(t["index"]), parse_univariate(t["fn"])) for t in config.get("univariate", [])]
    biv = []
    for t in config.get("bivariate", []):
        a, b = (int(v) for v in t["pair"])
        biv.append(((a, b), parse_bivariate(t["fn"])))
    return ModelSpec(int(config["d"]), uni, biv, name=config.get("name", "custom"),
                     constants=dict(config.get("constants", {})))
