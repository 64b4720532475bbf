"""
Registry of built-in fixtures: lattices, orthomodular lattices, block
families, context posets, observables, states and whole CLI scenarios.

Fixtures are registered per kind under a key and optional aliases; a
fixture is a zero-argument builder so nothing is constructed until asked.
"""

from collections import OrderedDict
from fractions import Fraction
from warnings import warn

import numpy as np

from .utils import _raise

KINDS = ("lattice", "oml", "family", "contexts", "observable", "state", "scenario")

_FIXTURES = {}
_ALIASES = {}


def clear_fixtures_and_aliases(*kinds):
    if len(kinds) == 0:
        _FIXTURES.clear()
        _ALIASES.clear()
    else:
        for k in kinds:
            if k in _FIXTURES:
                del _FIXTURES[k]
            if k in _ALIASES:
                del _ALIASES[k]


def register_fixture(kind, key, builder, description=""):
    kind in KINDS or _raise(ValueError(f"unknown fixture kind '{kind}'"))
    fixtures = _FIXTURES.setdefault(kind, OrderedDict())
    key not in fixtures or warn(f"re-registering fixture '{key}' of kind '{kind}'")
    fixtures[key] = dict(builder=builder, description=description)


def register_aliases(kind, key, *names):
    if len(names) == 0:
        return
    fixtures = _FIXTURES.get(kind, {})
    key in fixtures or _raise(ValueError(f"fixture '{key}' is not registered as '{kind}'"))
    aliases = _ALIASES.setdefault(kind, OrderedDict())
    for name in names:
        aliases.get(name, key) == key or warn(
            f"alias '{name}' was previously registered with fixture '{aliases[name]}'"
        )
        aliases[name] = key


def get_registered_fixtures(kind=None, return_aliases=True, verbose=False):
    kinds = KINDS if kind is None else (kind,)
    keys = {}
    key_aliases = {}
    for k in kinds:
        fixtures = _FIXTURES.get(k, {})
        aliases = _ALIASES.get(k, {})
        keys[k] = tuple(fixtures.keys())
        key_aliases[k] = {
            key: tuple(name for name in aliases if aliases[name] == key) for key in fixtures
        }
    if verbose:
        for k in kinds:
            n = len(keys[k])
            if n == 0:
                continue
            print(f"There {'is' if n == 1 else 'are'} {n} registered '{k}' fixture(s):")
            width = 2 + max(len(key) for key in keys[k])
            for key in keys[k]:
                names = key_aliases[k][key]
                alias_text = "'" + "', '".join(names) + "'" if names else "None"
                description = _FIXTURES[k][key]["description"]
                print(f"  {key:{width}} {alias_text:20} {description}")
    if kind is not None:
        keys, key_aliases = keys[kind], key_aliases[kind]
    return (keys, key_aliases) if return_aliases else keys


def get_fixture_details(kind, key_or_alias, verbose=False):
    fixtures = _FIXTURES.get(kind, {})
    if key_or_alias in fixtures:
        key = key_or_alias
        alias = None
    else:
        aliases = _ALIASES.get(kind, {})
        alias = key_or_alias
        alias in aliases or _raise(
            ValueError(f"'{alias}' is neither a key or alias for '{kind}' fixtures")
        )
        key = aliases[alias]
    if verbose:
        alias_text = "" if alias is None else f" with alias '{alias}'"
        print(f"Found fixture '{key}'{alias_text} of kind '{kind}'.")
    return key, alias, fixtures[key]


def get_fixture(kind, key_or_alias):
    _, _, details = get_fixture_details(kind, key_or_alias)
    return details["builder"]()


def _sigma_z():
    from .cstar import HermObs

    return HermObs.diag([1, -1])


def _sigma_x():
    from .cstar import HermObs, MatrixAlg

    return HermObs(MatrixAlg.full(2), [[0, 1], [1, 0]])


def _qubit_contexts(*axes):
    from .cstar import ContextPoset, bloch_context

    names = {(0, 0, 1): "C_z", (1, 0, 0): "C_x", (0, 1, 0): "C_y"}
    return ContextPoset([bloch_context(*v, name=names[v]) for v in axes])


def _trivial_qubit():
    from .cstar import ContextPoset, MatrixAlg, trivial_context

    return ContextPoset([trivial_context(MatrixAlg.full(2))])


def _diagonal(n):
    from .cstar import ContextPoset, diagonal_contexts

    return ContextPoset(diagonal_contexts(n))


def example_x_contexts():
    """
    Four two-atom contexts of M_3 that pairwise meet in the scalars: three
    coordinate projections and one rank-one projection orthogonal to the
    first of them.
    """
    from .cstar import ContextPoset, Context, MatrixAlg, Projection

    alg = MatrixAlg.full(3)
    vectors = {"a": (1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1), "d": (0, 1, 1)}
    contexts = []
    for name, v in vectors.items():
        p = Projection.from_vector(alg, v).matrix
        contexts.append(Context(alg, [p, np.eye(3) - p], name=name))
    return ContextPoset(contexts, closure="none")


def _scenario_sigma_z():
    from .cstar import HermObs
    from .state import DensityState

    return dict(
        state=DensityState.pure([1, 0]),
        observable=HermObs.diag([1, -1]),
        contexts=_qubit_contexts((0, 0, 1), (1, 0, 0)),
        q=Fraction(1, 2),
        r=Fraction(3, 2),
    )


def _register_builtins():
    from .cstar import MatrixAlg
    from .oml import amalgamate, example_x, example_x_family, horizontal_sum
    from .order import FinLattice
    from .state import DensityState, cabello_family

    register_fixture("lattice", "examplex", lambda: example_x().lattice, "example X as a lattice")
    register_fixture("lattice", "diamond", FinLattice.diamond, "M3")
    register_fixture("lattice", "pentagon", FinLattice.pentagon, "N5")
    register_fixture("lattice", "boolean-2", lambda: FinLattice.boolean(2), "2^2")
    register_fixture("oml", "examplex", example_x, "horizontal sum 2^3 + 2^2")
    register_fixture("oml", "mo2", lambda: amalgamate(horizontal_sum(2, 2)), "MO2")
    register_fixture("family", "examplex", example_x_family, "five blocks over 0 < a,b,c,d")
    register_fixture("contexts", "qubit-trivial", _trivial_qubit, "M_2, scalars only")
    register_fixture("contexts", "qubit-z", lambda: _qubit_contexts((0, 0, 1)), "{C, C_z}")
    register_fixture(
        "contexts", "qubit-zx", lambda: _qubit_contexts((0, 0, 1), (1, 0, 0)), "{C, C_z, C_x}"
    )
    register_fixture("contexts", "diagonal-3", lambda: _diagonal(3), "Bell(3) partitions")
    register_fixture("contexts", "examplex", example_x_contexts, "example X as contexts")
    register_fixture("contexts", "cabello18", cabello_family, "18 vectors, 9 bases in C^4")
    register_fixture("observable", "sigma_z", _sigma_z, "diag(1, -1)")
    register_fixture("observable", "sigma_x", _sigma_x, "Pauli x")
    register_fixture("state", "ket0", lambda: DensityState.pure([1, 0]), "|0><0|")
    register_fixture(
        "state", "mixed2", lambda: DensityState.maximally_mixed(MatrixAlg.full(2)), "1/2"
    )
    register_fixture("scenario", "sigma-z-truth", _scenario_sigma_z, "sigma_z in (1/2, 3/2)")

    register_aliases("contexts", "cabello18", "ks18", "cabello")
    register_aliases("oml", "examplex", "X")
    register_aliases("family", "examplex", "X")
    register_aliases("contexts", "qubit-zx", "qubit")


_register_builtins()
