"""``gspam`` command line: recover, experiment, components, selftest."""

import argparse
import json
import sys

import numpy as np

from ..component_estimation import estimate_components
from ..core_model import build_model
from ..core_model.oracle import QueryLedger, QueryOracle, noise_from_config
from ..exceptions import GspamError
from ..structure_learning import recover
from .config import DEFAULT_CTILDE, ConfigError, ExperimentConfig
from .runner import run_study


def format_support(S1, S2):
    s1 = ",".join(str(p) for p in sorted(S1))
    s2 = ",".join(f"({a},{b})" for a, b in sorted(S2))
    return f"S1={{{s1}}}", f"S2={{{s2}}}"


def parse_s1(text):
    text = text.strip().strip("{}")
    return frozenset(int(v) for v in text.split(",") if v.strip())


def parse_s2(text):
    """``"3-4,5-6"`` or ``"(3,4),(5,6)"`` -> ``{(3, 4), (5, 6)}``."""
    text = text.strip().strip("{}").replace(" ", "")
    if not text:
        return frozenset()
    if "(" in text:
        parts = [p.strip("(),") for p in text.split(")") if p.strip("(),")]
        pairs = [tuple(int(v) for v in p.split(",")) for p in parts]
    else:
        pairs = [tuple(int(v) for v in p.split("-")) for p in text.split(",")]
    if any(len(p) != 2 for p in pairs):
        raise argparse.ArgumentTypeError(f"cannot parse pairs from {text!r}")
    return frozenset(tuple(sorted(p)) for p in pairs)


def _model_tree(args):
    if args.model_config:
        with open(args.model_config) as fh:
            tree = json.load(fh)
    else:
        tree = {"builtin": args.model, "T": args.T}
    if args.d is not None:
        tree["d"] = args.d
    return tree


def _noise_block(args):
    if args.sigma2:
        return {"sigma2": args.sigma2}
    if args.eps:
        return {"eps": args.eps}
    return {}


def _pick_algorithm(name, model):
    if name != "auto":
        return name
    return "alg1_2" if model.rho_m <= 1 else "alg3"


def cmd_recover(args):
    model = build_model(_model_tree(args))
    algorithm = _pick_algorithm(args.algorithm, model)
    ctilde = args.ctilde if args.ctilde is not None else DEFAULT_CTILDE[algorithm]
    overrides = {k: v for k, v in (("N1", args.N1), ("N2", args.N2)) if v is not None}
    result = recover(model, algorithm, ctilde, noise_from_config(_noise_block(args)), args.seed,
                     overrides=overrides or None, on_excess=args.on_excess, solver=args.solver)
    s1, s2 = format_support(result.S1, result.S2)
    print(s1)
    print(s2)
    print(f"queries={result.total_queries}")
    if args.verbose:
        for phase, n in sorted(result.ledger["per_phase"].items()):
            print(f"queries[{phase}]={n}")
        print(f"exact={int(result.matches(model))}")
    return 0


def cmd_experiment(args):
    config = ExperimentConfig.load(args.config)
    if args.trials is not None:
        config.trials = args.trials
    if args.seed is not None:
        config.seed = args.seed
    result = run_study(config, args.output)
    if result.path is None:
        sys.stdout.write(result.csv_text)
    else:
        print(f"wrote {len(result.records)} trials to {result.path}", file=sys.stderr)
    for agg in result.aggregates:
        print(f"cell {agg['cell']}: d={agg['d']} ctilde={agg['ctilde']:g} "
              f"success={agg['success']:.2f} queries={agg['queries']:.0f}", file=sys.stderr)
    return 0


def cmd_components(args):
    model = build_model(_model_tree(args))
    S1 = parse_s1(args.S1) if args.S1 is not None else model.S1
    S2 = parse_s2(args.S2) if args.S2 is not None else model.S2
    ledger = QueryLedger()
    oracle = QueryOracle(model, noise_from_config(_noise_block(args)),
                         np.random.default_rng(args.seed), ledger)
    est = estimate_components(oracle, S1, S2, n=args.n, n1=args.n1, repeats=args.repeats)
    text = est.to_text()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    X = np.random.default_rng(args.seed + 1).uniform(-1.0, 1.0, size=(200, model.d))
    err = float(np.max(np.abs(est.evaluate(X) - model.evaluate(X))))
    print(f"queries={ledger.total_queries}", file=sys.stderr)
    print(f"max_abs_error={err:.3e}", file=sys.stderr)
    return 0


def cmd_selftest(args):
    from .selftest import run_selftest
    return 0 if run_selftest(verbose=not args.quiet) else 1


def _add_model_args(p):
    p.add_argument("--model", default="f1_nonoverlap", help="builtin model name")
    p.add_argument("--model-config", help="JSON model tree (overrides --model)")
    p.add_argument("--d", type=int, help="dimension")
    p.add_argument("--T", type=int, default=1, help="size of the k/rho families")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma2", type=float, default=0.0, help="Gaussian noise variance")
    p.add_argument("--eps", type=float, default=0.0, help="bounded noise level")


def build_parser():
    parser = argparse.ArgumentParser(prog="gspam", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="{recover,experiment,components,selftest}")
    sub.required = True

    p = sub.add_parser("recover", help="run one structure recovery")
    _add_model_args(p)
    p.add_argument("--algorithm", default="auto", choices=["auto", *DEFAULT_CTILDE])
    p.add_argument("--ctilde", type=float)
    p.add_argument("--N1", type=int)
    p.add_argument("--N2", type=int)
    p.add_argument("--solver", default="iht", choices=["iht", "l1_equality"])
    p.add_argument("--on-excess", default="raise", choices=["raise", "best_effort"])
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("experiment", help="run a Monte-Carlo study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="CSV path (default: config value or stdout)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="override the master seed")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("components", help="estimate components given supports")
    _add_model_args(p)
    p.add_argument("--S1", help="e.g. 1,2 (default: the model's own)")
    p.add_argument("--S2", help="e.g. 3-4,5-6 (default: the model's own)")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--n1", type=int, default=32)
    p.add_argument("--repeats", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("selftest", help="run the quick invariant suite")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GspamError, ConfigError) as exc:
        print(f"gspam {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gspam {args.command}: {exc}", file=sys.stderr)
        return 1


cli_main = main
