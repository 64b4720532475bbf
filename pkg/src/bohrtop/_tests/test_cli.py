import json

import pytest
from csbdeep.utils import save_json

from bohrtop import __version__
from bohrtop.cli import EXIT_NUMERIC, EXIT_OK, EXIT_SCHEMA, EXIT_VIOLATION, main
from bohrtop.cstar import ContextPoset, bloch_context
from bohrtop.utils import CAP_ENV


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_examplex(capsys):
    code, out, err = run(capsys, "examplex", "--verbose")
    assert code == EXIT_OK
    assert "monotone Heyting algebra: 257; distributive ideals: 72" in err
    assert json.loads(out) == {"monotone_heyting": 257, "distributive_ideals": 72}


def test_examplex_distributive_covers(capsys):
    code, out, _ = run(capsys, "examplex", "--covers", "distributive", "--verify-adjunction")
    assert code == EXIT_OK
    assert json.loads(out) == {
        "monotone_heyting": 257,
        "distributive_ideals": 32,
        "adjunction": True,
    }


def test_cap_exceeded(capsys):
    code, out, err = run(capsys, "examplex", "--cap", "100")
    assert code == EXIT_VIOLATION
    assert json.loads(out) == {"cap": 100, "lower_bound": 101, "bound_log2": 9}
    assert "error" in err


def test_cap_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(CAP_ENV, "100")
    code, _, _ = run(capsys, "frame", "--contexts", "@examplex")
    assert code == EXIT_VIOLATION
    monkeypatch.setenv(CAP_ENV, "1000")
    code, out, _ = run(capsys, "frame", "--contexts", "@examplex")
    assert code == EXIT_OK
    assert json.loads(out)["opens"] == 257


def test_young(capsys):
    code, out, _ = run(capsys, "young", "--k", "2", "--n", "2")
    assert code == EXIT_OK
    assert json.loads(out) == [[1, 2]]


def test_ctxgen_diagonal(capsys):
    code, out, err = run(capsys, "ctxgen", "--diagonal", "3", "--verbose")
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data["contexts"]) == 5
    assert "5 contexts" in err


def test_ctxgen_feeds_frame(capsys, tmp_path):
    fpath = tmp_path / "qubit.json"
    code, _, _ = run(capsys, "ctxgen", "--bloch", "0,0,1", "--bloch", "1,0,0", "--json", str(fpath))
    assert code == EXIT_OK
    code, out, _ = run(capsys, "frame", "--contexts", str(fpath), "--boolean")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["opens"] == 17
    assert data["boolean"] is False
    assert data["distributive"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ("--diagonal", "2", "--rotate"),
        ("--young", "2", "3", "--rotate"),
        ("--random", "3", "--dim", "3"),
    ],
)
def test_ctxgen_seed_is_reproducible(capsys, argv):
    first = run(capsys, "ctxgen", *argv, "--seed", "7")
    second = run(capsys, "ctxgen", *argv, "--seed", "7")
    other = run(capsys, "ctxgen", *argv, "--seed", "8")
    assert first[0] == EXIT_OK
    assert first[1] == second[1]
    assert first[1] != other[1]


def test_ctxgen_random_family(capsys):
    code, out, _ = run(capsys, "ctxgen", "--random", "2", "--dim", "2", "--seed", "3")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["algebra"] == {"blocks": [2]}
    assert len(data["contexts"]) == 2


def test_summaries_need_verbose(capsys):
    code, out, err = run(capsys, "ctxgen", "--diagonal", "3")
    assert code == EXIT_OK
    assert err == ""
    code, out, err = run(capsys, "examplex")
    assert err == ""


def test_ctxgen_requires_a_generator(capsys):
    code, _, err = run(capsys, "ctxgen")
    assert code == EXIT_SCHEMA
    assert "ctxgen" in err


def test_truth_fixture(capsys):
    code, out, _ = run(capsys, "truth", "--fixture", "sigma-z-truth")
    assert code == EXIT_OK
    assert json.loads(out) == {"contexts": ["C_z"], "upper_set": True}


def test_truth_with_explicit_inputs(capsys):
    code, out, _ = run(
        capsys,
        "truth",
        "--state", "@mixed2",
        "--obs", "@sigma_z",
        "--contexts", "@qubit",
        "--q", "-2",
        "--r", "2",
    )
    assert code == EXIT_OK
    assert json.loads(out)["contexts"] == ["trivial", "C_z", "C_x"]


def test_dasein(capsys):
    code, out, _ = run(capsys, "dasein", "--fixture", "sigma-z-truth", "--workers", "2")
    assert code == EXIT_OK
    assert json.loads(out) == {"values": {"trivial": [], "C_z": [0], "C_x": []}}


def test_dasein_dot(capsys):
    code, out, _ = run(capsys, "dasein", "--fixture", "sigma-z-truth", "--dot")
    assert code == EXIT_OK
    assert out.startswith("digraph Daseinisation")


def test_bad_rational(capsys):
    code, _, err = run(capsys, "truth", "--fixture", "sigma-z-truth", "--q", "0.5")
    assert code == EXIT_SCHEMA
    assert "p/q" in err


def test_missing_input(capsys):
    code, _, err = run(capsys, "frame")
    assert code == EXIT_SCHEMA
    assert "--contexts" in err


def test_malformed_json_file(capsys, tmp_path):
    fpath = tmp_path / "broken.json"
    fpath.write_text("{not json")
    code, _, err = run(capsys, "frame", "--contexts", str(fpath))
    assert code == EXIT_SCHEMA
    assert "invalid JSON" in err


def test_unknown_fixture(capsys):
    code, _, _ = run(capsys, "frame", "--contexts", "@nonexistent")
    assert code == EXIT_SCHEMA


def test_ks(capsys):
    code, out, err = run(capsys, "ks", "--contexts", "@cabello", "--validate", "--verbose")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["result"] == "UNSAT"
    assert data["family"] == {"passed": True, "projections": 18}
    assert "UNSAT" in err
    code, out, _ = run(capsys, "ks", "--contexts", "@qubit")
    assert json.loads(out)["result"] == "SAT"


def test_ks_validate_rejects_qubit_family(capsys):
    code, _, _ = run(capsys, "ks", "--contexts", "@qubit-zx", "--validate")
    assert code == EXIT_VIOLATION


def test_oml_validate(capsys):
    code, out, _ = run(capsys, "oml-validate", "--oml", "@X")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["passed"] and data["blocks"] == 3
    code, out, _ = run(capsys, "oml-validate", "--oml", "@X", "--index", "orthogonal")
    assert json.loads(out)["blocks"] == 6


def test_bruns_lakser(capsys):
    code, out, _ = run(capsys, "bruns-lakser", "--lattice", "@examplex", "--covers", "trivial")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["elements"] == 10
    assert data["distributive_ideals"] == 72
    assert data["frame_distributive"]
    code, out, _ = run(capsys, "bruns-lakser", "--lattice", "@examplex")
    assert json.loads(out)["distributive_ideals"] == 32


def test_bruns_lakser_on_distributive_lattice(capsys):
    code, out, _ = run(capsys, "bruns-lakser", "--lattice", "@boolean-2")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["distributive_ideals"] == data["ideals"] == 4


def test_fixture_listing(capsys):
    code, out, _ = run(capsys, "fixtures", "--kind", "state")
    assert code == EXIT_OK
    assert json.loads(out) == {"state": {"ket0": [], "mixed2": []}}


def test_degenerate_meet_exits_numeric(capsys, tmp_path):
    import numpy as np

    theta = np.arccos(1 - 1e-8)
    poset = ContextPoset(
        [bloch_context(0, 0, 1, name="C_z"), bloch_context(np.sin(theta), 0, np.cos(theta))],
        closure="none",
    )
    data = poset.to_json()
    data["closure"] = "meets"
    fpath = tmp_path / "tilted.json"
    save_json(data, str(fpath))
    code, _, _ = run(capsys, "frame", "--contexts", str(fpath))
    assert code == EXIT_NUMERIC


def test_version(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    assert __version__ in capsys.readouterr().out
