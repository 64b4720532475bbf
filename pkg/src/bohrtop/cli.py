#!/usr/bin/env python3
"""
Command line surface: JSON in, JSON (or DOT) out on stdout, diagnostics
on stderr.

Exit codes: 0 ok, 1 property violation or exceeded cap, 2 invalid input,
3 numerically ambiguous result.
"""

import argparse
import json
import sys

import numpy as np
from csbdeep.utils import load_json, save_json

from . import fixtures
from ._version import __version__
from .bohr import bohr_frame, is_boolean_frame
from .cstar import (
    CLOSURE_POLICIES,
    ContextPoset,
    HermObs,
    MatrixAlg,
    bloch_context,
    context_from_obs,
    diagonal_contexts,
    random_hermitian,
    random_unitary,
    rotate_context,
    young_context,
    young_sequences,
)
from .dasein import RatInterval, dasein_open
from .oml import Oml, blocks, example_x, example_x_family, mono_heyting, validate_oml
from .order import FinLattice, FinPoset, distributive_ideals, ideals, regular_ideals
from .state import DensityState, ks_search, truth_value, validate_ks_family
from .utils import (
    BohrtopError,
    CapExceeded,
    Config,
    DegenerateIntersection,
    NotUpperSet,
    SchemaError,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_SCHEMA = 2
EXIT_NUMERIC = 3

EXAMPLE_X_COUNTS = {"trivial": (257, 72), "distributive": (257, 32)}


def _diag(*parts):
    """Errors and violation witnesses; always shown."""
    print(*parts, file=sys.stderr)
    sys.stderr.flush()


def _info(cfg, *parts):
    """Summaries; shown with ``--verbose``."""
    if cfg.verbose:
        _diag(*parts)


def _write_json(data, fpath):
    if fpath is None:
        sys.stdout.write(json.dumps(data, sort_keys=True) + "\n")
    else:
        save_json(data, fpath, sort_keys=True)


def _emit(args, data, dot=None):
    if args.dot and dot is not None:
        sys.stdout.write(dot)
    else:
        _write_json(data, args.output)


def _load(value, kind, parse, path):
    """``@name`` resolves a built-in fixture of ``kind``; anything else is a JSON file."""
    if value.startswith("@"):
        try:
            return fixtures.get_fixture(kind, value[1:])
        except ValueError as err:
            raise SchemaError(str(err), path)
    try:
        data = load_json(value)
    except OSError as err:
        raise SchemaError(f"cannot read {value}: {err}", path)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON in {value}: {err}", path)
    return parse(data)


def _scenario(args):
    return {} if args.fixture is None else fixtures.get_fixture("scenario", args.fixture)


def _contexts(args, cfg, scenario):
    if args.contexts is None:
        "contexts" in scenario or _raise_schema("--contexts is required", "--contexts")
        return scenario["contexts"]
    return _load(
        args.contexts,
        "contexts",
        lambda d: ContextPoset.from_json(d, "--contexts", tol_rank=cfg.tol_rank),
        "--contexts",
    )


def _observable(args, scenario):
    if args.obs is None:
        "observable" in scenario or _raise_schema("--obs is required", "--obs")
        return scenario["observable"]
    return _load(args.obs, "observable", lambda d: HermObs.from_json(d, "--obs"), "--obs")


def _state(args, scenario):
    if args.state is None:
        "state" in scenario or _raise_schema("--state is required", "--state")
        return scenario["state"]
    return _load(args.state, "state", lambda d: DensityState.from_json(d, "--state"), "--state")


def _interval(args, scenario):
    q = args.q if args.q is not None else scenario.get("q")
    r = args.r if args.r is not None else scenario.get("r")
    q is not None and r is not None or _raise_schema("--q and --r are required", "--q")
    return RatInterval.parse(q, r, "interval")


def _raise_schema(message, path):
    raise SchemaError(message, path)


def cmd_examplex(args, cfg):
    expected = EXAMPLE_X_COUNTS[args.covers]
    h = mono_heyting(example_x_family(), cap=cfg.mono_cap, show_progress=cfg.verbose)
    frame = distributive_ideals(example_x().lattice, covers=args.covers, cap=cfg.cap)
    counts = (h.count(), frame.count())
    _info(cfg, f"monotone Heyting algebra: {counts[0]}; distributive ideals: {counts[1]}")
    data = {"monotone_heyting": counts[0], "distributive_ideals": counts[1]}
    ok = counts == expected
    if args.verify_adjunction:
        passed, witness = h.check_adjunction()
        data["adjunction"] = passed
        passed or _diag(f"adjunction fails at {witness}")
        ok = ok and passed
    dot = h.to_lattice().to_dot(name="MonoHeyting") + frame.to_dot(name="DistributiveIdeals")
    _emit(args, data, dot)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_frame(args, cfg):
    poset = _contexts(args, cfg, _scenario(args))
    frame = bohr_frame(poset, cap=cfg.mono_cap, show_progress=cfg.verbose)
    data = {"contexts": list(poset.names), "bound_log2": frame.bound_log2}
    data["opens"] = frame.count()
    ok = True
    if args.verify_adjunction:
        passed, witness = frame.check_adjunction()
        data["adjunction"] = passed
        passed or _diag(f"adjunction fails at {witness}")
        ok = passed
    if args.boolean:
        report = is_boolean_frame(frame)
        data["boolean"] = report.passed
        data["distributive"] = report.distributive
        if report.witness is not None:
            data["witness"] = report.witness.to_json()
        ok = ok and report.distributive
    _emit(args, data, poset.poset.to_dot(name="Contexts"))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_truth(args, cfg):
    scenario = _scenario(args)
    s, a = _state(args, scenario), _observable(args, scenario)
    iv, poset = _interval(args, scenario), _contexts(args, cfg, scenario)
    tv = truth_value(s, a, iv, poset, tol_truth=cfg.tol_truth, tol_eig=cfg.tol_eig)
    data = {"contexts": list(tv.names), "upper_set": tv.upper_set}
    _emit(args, data, poset.poset.to_dot(highlight=tv.contexts, name="TruthValue"))
    return EXIT_OK


def cmd_dasein(args, cfg):
    scenario = _scenario(args)
    a, iv, poset = _observable(args, scenario), _interval(args, scenario), _contexts(
        args, cfg, scenario
    )
    g = dasein_open(a, iv, poset, tol_eig=cfg.tol_eig, n_workers=args.workers)
    _emit(args, g.to_json(), g.to_dot(name="Daseinisation"))
    return EXIT_OK


def cmd_ks(args, cfg):
    poset = _contexts(args, cfg, _scenario(args))
    data = {}
    if args.validate:
        report = validate_ks_family(poset)
        data["family"] = {"passed": report.passed, "projections": report.projections}
        if not report.passed:
            _diag(f"family check failed: {report.failures[:5]}")
            _emit(args, data)
            return EXIT_VIOLATION
    result = ks_search(poset, show_progress=cfg.verbose)
    data["nodes"] = result.nodes
    if result.assignment is None:
        data["result"] = "UNSAT"
    else:
        data["result"] = "SAT"
        data.update(result.assignment.to_json())
    _info(cfg, f"{data['result']} after {result.nodes} nodes")
    _emit(args, data)
    return EXIT_OK


def cmd_ctxgen(args, cfg):
    rng = np.random.default_rng(cfg.seed)
    # rotated families need the full matrix algebra
    full = args.rotate or args.random is not None
    if args.diagonal is not None:
        n = args.diagonal
        cs = diagonal_contexts(n, MatrixAlg.full(n) if full else None)
    elif args.young is not None:
        k, n = args.young
        alg = MatrixAlg.full(n) if full else None
        cs = [young_context(seq, n, alg) for seq in young_sequences(k, n)]
    elif args.bloch:
        cs = []
        for k, text in enumerate(args.bloch):
            try:
                x, y, z = (float(v) for v in text.split(","))
            except ValueError:
                raise SchemaError("expected x,y,z", f"--bloch[{k}]")
            cs.append(bloch_context(x, y, z))
    elif args.random is not None:
        args.random >= 1 and args.dim >= 1 or _raise_schema(
            "--random and --dim must be positive", "--random"
        )
        alg = MatrixAlg.full(args.dim)
        cs = [
            context_from_obs(random_hermitian(rng, alg), tol_cluster=cfg.tol_cluster)
            for _ in range(args.random)
        ]
    else:
        raise SchemaError(
            "one of --diagonal, --young, --bloch or --random is required", "ctxgen"
        )
    if args.rotate:
        u = random_unitary(rng, cs[0].algebra.total_dim)
        cs = [rotate_context(c, u, name=c.name) for c in cs]
    data = {
        "algebra": cs[0].algebra.to_json(),
        "closure": args.closure,
        "contexts": [c.to_json() for c in cs],
    }
    _info(cfg, f"{len(cs)} contexts")
    if args.dot:
        poset = ContextPoset(cs, closure=args.closure, tol_rank=cfg.tol_rank)
        _emit(args, data, poset.poset.to_dot(name="Contexts"))
    else:
        _emit(args, data)
    return EXIT_OK


def cmd_young(args, cfg):
    _emit(args, [list(seq) for seq in young_sequences(args.k, args.n)])
    return EXIT_OK


def cmd_oml_validate(args, cfg):
    o = _load(args.oml, "oml", lambda d: Oml.from_json(d, "--oml"), "--oml")
    report = validate_oml(o)
    data = {"passed": report.passed, "failures": [list(f) for f in report.failures]}
    if report.passed:
        family = blocks(o, index=args.index)
        data["blocks"] = len(family)
        data["block_sizes"] = [len(b) for b in family.blocks]
    _emit(args, data, o.to_dot())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_bruns_lakser(args, cfg):
    lattice = _load(
        args.lattice,
        "lattice",
        lambda d: FinLattice(FinPoset.from_json(d, "--lattice")),
        "--lattice",
    )
    frame = distributive_ideals(lattice, covers=args.covers, cap=cfg.cap)
    data = {
        "elements": lattice.n,
        "ideals": ideals(lattice, cfg.cap).n,
        "regular_ideals": regular_ideals(lattice, cfg.cap).n,
        "distributive_ideals": frame.count(),
    }
    passed, witness = frame.check_infinite_distributivity()
    data["frame_distributive"] = passed
    _emit(args, data, frame.to_dot(name="DistributiveIdeals"))
    return EXIT_OK if passed else EXIT_VIOLATION


def cmd_fixtures(args, cfg):
    keys, aliases = fixtures.get_registered_fixtures(args.kind, verbose=False)
    if args.kind is None:
        data = {k: {key: list(aliases[k][key]) for key in keys[k]} for k in keys}
    else:
        data = {args.kind: {key: list(aliases[key]) for key in keys}}
    _emit(args, data)
    return EXIT_OK


def _common(parser):
    parser.add_argument("--tol-herm", type=float, default=None)
    parser.add_argument("--tol-proj", type=float, default=None)
    parser.add_argument("--tol-eig", type=float, default=None)
    parser.add_argument("--tol-cluster", type=float, default=None)
    parser.add_argument("--tol-rank", type=float, default=None)
    parser.add_argument("--tol-truth", type=float, default=None)
    parser.add_argument("--cap", type=int, default=None, help="enumeration cap")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    parser.add_argument("--json", dest="output", default=None, metavar="PATH",
                        help="write JSON to PATH instead of stdout")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--fixture", default=None, help="built-in scenario for missing inputs")


def _inputs(parser, *names):
    helps = {
        "contexts": "context family JSON or @fixture",
        "obs": "observable JSON or @fixture",
        "state": "state JSON or @fixture",
    }
    for name in names:
        parser.add_argument(f"--{name}", default=None, help=helps[name])


def _interval_args(parser):
    parser.add_argument("--q", default=None, help="lower endpoint as p/q")
    parser.add_argument("--r", default=None, help="upper endpoint as p/q")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bohrtop", description="Bohrified state spaces of finite quantum systems"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("examplex", help="257 and 72 for example X")
    _common(p)
    p.add_argument("--verify-adjunction", action="store_true")
    p.add_argument("--covers", choices=sorted(EXAMPLE_X_COUNTS), default="trivial")
    p.set_defaults(func=cmd_examplex)

    p = sub.add_parser("frame", help="count the opens of a Bohrified state space")
    _common(p)
    _inputs(p, "contexts")
    p.add_argument("--verify-adjunction", action="store_true")
    p.add_argument("--boolean", action="store_true", help="check excluded middle")
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("truth", help="truth value of a in (q, r) in a state")
    _common(p)
    _inputs(p, "state", "obs", "contexts")
    _interval_args(p)
    p.set_defaults(func=cmd_truth)

    p = sub.add_parser("dasein", help="daseinisation of a in (q, r)")
    _common(p)
    _inputs(p, "obs", "contexts")
    _interval_args(p)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_dasein)

    p = sub.add_parser("ks", help="noncontextual valuation search")
    _common(p)
    _inputs(p, "contexts")
    p.add_argument("--validate", action="store_true", help="check rank and multiplicity")
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("ctxgen", help="generate a context family")
    _common(p)
    p.add_argument("--diagonal", type=int, default=None, metavar="N")
    p.add_argument("--young", type=int, nargs=2, default=None, metavar=("K", "N"))
    p.add_argument("--bloch", action="append", default=[], metavar="X,Y,Z")
    p.add_argument("--random", type=int, default=None, metavar="K",
                   help="K spectral contexts of random observables")
    p.add_argument("--dim", type=int, default=2, help="matrix size for --random")
    p.add_argument("--rotate", action="store_true",
                   help="conjugate the family by one random unitary")
    p.add_argument("--closure", choices=CLOSURE_POLICIES, default="meets")
    p.set_defaults(func=cmd_ctxgen)

    p = sub.add_parser("young", help="list Y(k, n)")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_young)

    p = sub.add_parser("oml-validate", help="check orthomodular axioms and list blocks")
    _common(p)
    p.add_argument("--oml", required=True, help="OML JSON or @fixture")
    p.add_argument("--index", choices=("maximal", "orthogonal"), default="maximal")
    p.set_defaults(func=cmd_oml_validate)

    p = sub.add_parser("bruns-lakser", help="distributive ideals of a finite lattice")
    _common(p)
    p.add_argument("--lattice", required=True, help="lattice JSON or @fixture")
    p.add_argument("--covers", choices=("trivial", "distributive"), default="distributive")
    p.set_defaults(func=cmd_bruns_lakser)

    p = sub.add_parser("fixtures", help="list built-in fixtures")
    _common(p)
    p.add_argument("--kind", choices=fixtures.KINDS, default=None)
    p.set_defaults(func=cmd_fixtures)
    return parser


def _config(args):
    options = {
        name: getattr(args, name)
        for name in ("tol_herm", "tol_proj", "tol_eig", "tol_cluster", "tol_rank", "tol_truth")
        if getattr(args, name) is not None
    }
    if args.cap is not None:
        options["cap"] = args.cap
        options["mono_cap"] = args.cap
    return Config.from_env(seed=args.seed, verbose=args.verbose, **options)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ValueError as err:
        _diag(f"error: {err}")
        return EXIT_SCHEMA
    try:
        return args.func(args, cfg)
    except CapExceeded as err:
        _diag(f"error: {err}")
        _write_json(
            {"cap": err.cap, "lower_bound": err.lower_bound, "bound_log2": err.bound_log2},
            args.output,
        )
        return EXIT_VIOLATION
    except (DegenerateIntersection, NotUpperSet) as err:
        _diag(f"error: {err}")
        return EXIT_NUMERIC
    except SchemaError as err:
        _diag(f"error: {err}")
        return EXIT_SCHEMA
    except (BohrtopError, ValueError) as err:
        _diag(f"error: {type(err).__name__}: {err}")
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
