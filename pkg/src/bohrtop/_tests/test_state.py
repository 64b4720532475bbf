from fractions import Fraction

import numpy as np
import pytest

from bohrtop.cstar import (
    ContextPoset,
    HermObs,
    MatrixAlg,
    context_poset,
    diagonal_contexts,
    partition_context,
)
from bohrtop.dasein import RatInterval
from bohrtop.state import (
    DensityState,
    ProjMeasure,
    cabello_family,
    exact_expectation,
    expectation,
    ks_search,
    measure_from_state,
    quasistate_from_measure,
    random_state,
    shared_projections,
    truth_value,
    validate_ks_family,
    valuation_from_functional,
    valuation_sweep,
)
from bohrtop.utils import AlgebraMismatch, InconsistentMeasure, NotInContext, SchemaError


def test_expectation(ket0, sigma_z, sigma_x, m2):
    assert expectation(ket0, sigma_z) == pytest.approx(1)
    assert expectation(ket0, sigma_x) == pytest.approx(0)
    rho = 0.5 * (np.eye(2) + 0.6 * sigma_x.matrix)
    assert expectation(DensityState(m2, rho), sigma_x) == pytest.approx(0.6)
    with pytest.raises(AlgebraMismatch):
        expectation(DensityState.pure([1, 0, 0]), sigma_z)


def test_density_checks(m2):
    with pytest.raises(ValueError):
        DensityState(m2, np.diag([2.0, -1.0]))
    with pytest.raises(ValueError):
        DensityState(m2, np.eye(2))
    with pytest.raises(SchemaError):
        DensityState.from_json({"matrix": [[[2, 0]]]})
    with pytest.raises(SchemaError):
        DensityState.from_json({"rho": []})


def test_state_json_round_trip(rng):
    s = random_state(rng, MatrixAlg([1, 2]))
    again = DensityState.from_json(s.to_json())
    assert again.algebra == s.algebra
    assert np.allclose(again.rho, s.rho)


def test_measure_from_state(ket0, qubit_zx):
    mu = measure_from_state(ket0, qubit_zx)
    assert mu.validate().passed
    assert mu(1, 0b01) == pytest.approx(1)
    assert mu(2, 0b01) == pytest.approx(0.5)
    assert ProjMeasure.from_json(mu.to_json(), qubit_zx).values == pytest.approx(mu.values)


def test_quasistate_agrees_with_state(ket0, sigma_z, sigma_x, qubit_zx, m2):
    qs = quasistate_from_measure(measure_from_state(ket0, qubit_zx))
    assert qs(sigma_z) == pytest.approx(1)
    assert qs(sigma_x) == pytest.approx(0)
    assert qs(sigma_z * 3 + 1) == pytest.approx(4)
    with pytest.raises(NotInContext):
        qs(HermObs(m2, [[0, -1j], [1j, 0]]))


def test_quasistate_on_random_states(rng):
    alg = MatrixAlg.diagonal(3)
    fam = context_poset(diagonal_contexts(3))
    for _ in range(10):
        s = random_state(rng, alg)
        qs = quasistate_from_measure(measure_from_state(s, fam))
        a = HermObs.diag(rng.standard_normal(3), alg)
        assert qs(a) == pytest.approx(expectation(s, a))


def test_inconsistent_measure():
    alg = MatrixAlg.full(3)
    fine = partition_context([[0], [1], [2]], alg, name="fine")
    coarse = partition_context([[0], [1, 2]], alg, name="coarse")
    fam = ContextPoset([fine, coarse], closure="none")
    assert (1, 0b001, 2, 0b01) in shared_projections(fam)
    mu = ProjMeasure.from_atoms(fam, [[1], [1, 0, 0], [0, 1]])
    assert mu.validate().additivity == ()
    with pytest.raises(InconsistentMeasure) as err:
        quasistate_from_measure(mu)
    assert err.value.overlap is not None
    broken = ProjMeasure(fam, {**mu.values, (1, 0b011): 0.5})
    with pytest.raises(InconsistentMeasure):
        quasistate_from_measure(broken)


def test_valuation_from_functional():
    alg = MatrixAlg.full(3)
    c = partition_context([[0], [1], [2]], alg, name="fine")
    fam = ContextPoset([c], closure="none")
    qs = quasistate_from_measure(ProjMeasure.from_atoms(fam, [[1], [1 / 3] * 3]))
    a = HermObs.diag([2, 0.5, -1], alg)
    assert qs(a) == pytest.approx(0.5)
    assert valuation_from_functional(qs, c, a) == pytest.approx(2 / 3)
    assert valuation_sweep(qs, c, a, 10**6) == pytest.approx(2 / 3)
    assert valuation_sweep(qs, c, a, 1) == pytest.approx(0.5)


def test_truth_value(ket0, sigma_z, qubit_zx, m2):
    iv = RatInterval(Fraction(1, 2), Fraction(3, 2))
    tv = truth_value(ket0, sigma_z, iv, qubit_zx)
    assert tv.names == ("C_z",)
    assert tv.exact
    assert tv.upper_set
    mixed = DensityState.maximally_mixed(m2)
    assert truth_value(mixed, sigma_z, iv, qubit_zx).contexts == ()
    wide = truth_value(mixed, sigma_z, RatInterval(-2, 2), qubit_zx)
    assert wide.names == qubit_zx.names


def test_truth_value_is_exact_on_rational_inputs(m2, sigma_z, qubit_zx, c_z):
    iv = RatInterval(Fraction(1, 2), Fraction(3, 2))
    s = DensityState(m2, [[0.75, 0], [0, 0.25]])
    assert exact_expectation(s, c_z.projection(0b01)) == Fraction(3, 4)
    loose = truth_value(s, sigma_z, iv, qubit_zx, tol_truth=0.3, exact=False)
    assert loose.names == ("C_z",)
    assert not loose.exact
    tv = truth_value(s, sigma_z, iv, qubit_zx, tol_truth=0.3)
    assert tv.contexts == ()
    assert tv.exact


def test_exact_expectation_declines_irrational_entries(m2, c_z):
    s = DensityState.pure([1, 2**0.5])
    assert exact_expectation(s, c_z.projection(0b01)) is None


def test_ks_single_context(qubit_z):
    result = ks_search(qubit_z)
    assert result.assignment.as_dict() == {"trivial": 0, "C_z": 0}
    assert result.assignment.to_json() == {"assignment": {"trivial": 0, "C_z": 0}}


def test_ks_commuting_family_is_satisfiable():
    fam = context_poset(diagonal_contexts(3))
    result = ks_search(fam)
    assert result.assignment is not None
    assert result.assignment.is_consistent()


def test_ks_cabello_is_unsatisfiable():
    fam = cabello_family()
    assert len(fam) == 10
    report = validate_ks_family(fam)
    assert report.passed
    assert report.projections == 18
    result = ks_search(fam)
    assert result.assignment is None
    assert result.nodes > 0
