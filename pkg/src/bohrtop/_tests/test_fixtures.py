import pytest

from bohrtop.cstar import ContextPoset, HermObs
from bohrtop.fixtures import (
    KINDS,
    get_fixture,
    get_fixture_details,
    get_registered_fixtures,
    register_aliases,
)
from bohrtop.oml import BlockFamily, Oml
from bohrtop.order import FinLattice
from bohrtop.state import DensityState


def test_every_kind_has_fixtures():
    keys = get_registered_fixtures(return_aliases=False)
    assert set(keys) == set(KINDS)
    assert all(len(keys[k]) > 0 for k in KINDS)


def test_aliases():
    keys, aliases = get_registered_fixtures("contexts")
    assert "cabello18" in keys
    assert aliases["cabello18"] == ("ks18", "cabello")
    key, alias, _ = get_fixture_details("contexts", "ks18")
    assert (key, alias) == ("cabello18", "ks18")
    with pytest.raises(ValueError):
        get_fixture_details("contexts", "nonexistent")
    with pytest.raises(ValueError):
        register_aliases("contexts", "nonexistent", "x")


def test_verbose_listing(capsys):
    get_registered_fixtures("state", verbose=True)
    out = capsys.readouterr().out
    assert "2 registered 'state' fixture(s)" in out
    assert "ket0" in out


@pytest.mark.parametrize(
    "kind, key, cls",
    [
        ("lattice", "diamond", FinLattice),
        ("oml", "X", Oml),
        ("family", "examplex", BlockFamily),
        ("contexts", "qubit", ContextPoset),
        ("observable", "sigma_x", HermObs),
        ("state", "mixed2", DensityState),
    ],
)
def test_get_fixture(kind, key, cls):
    assert isinstance(get_fixture(kind, key), cls)


def test_fixture_values():
    assert get_fixture("oml", "mo2").n == 6
    assert len(get_fixture("contexts", "diagonal-3")) == 5
    assert get_fixture("contexts", "qubit-zx").names == ("trivial", "C_z", "C_x")
    scenario = get_fixture("scenario", "sigma-z-truth")
    assert set(scenario) == {"state", "observable", "contexts", "q", "r"}
