from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import eigvalsh

from bohrtop.bohr import bohr_frame
from bohrtop.cstar import (
    ContextPoset,
    HermObs,
    MatrixAlg,
    Projection,
    context_from_obs,
    proj_pos,
    random_hermitian,
    trivial_context,
)
from bohrtop.dasein import (
    RatInterval,
    admissible_above,
    admissible_below,
    compression_bounds,
    dasein_open,
    dasein_order_check,
    dasein_push,
    inner_support,
    outer_support,
    rational_grid,
)
from bohrtop.state import truth_value
from bohrtop.utils import GRID_STEP, MissingGeneratedContext, SchemaError


def test_inner_support_of_sigma_z(sigma_z, c_z, m2):
    assert inner_support(sigma_z, Fraction(1, 2), c_z).same(c_z.atoms[0])
    assert inner_support(sigma_z, Fraction(1, 2), trivial_context(m2)).is_zero()


def test_outer_support_of_sigma_z(sigma_z, c_z, m2):
    assert outer_support(sigma_z, Fraction(3, 2), c_z).same(Projection.identity(m2))
    assert outer_support(sigma_z, Fraction(1, 2), c_z).same(c_z.atoms[1])


def test_compression_bounds(sigma_z, c_x, c_z):
    assert np.allclose(compression_bounds(sigma_z, c_z), [(1, 1), (-1, -1)])
    for lo, hi in compression_bounds(sigma_z, c_x):
        assert (lo, hi) == pytest.approx((0, 0), abs=1e-12)


def test_dasein_open_on_qubit(sigma_z, qubit_zx):
    g = dasein_open(sigma_z, RatInterval(Fraction(1, 2), Fraction(3, 2)), qubit_zx)
    assert g.masks == (0, 0b01, 0)
    # the whole spectrum lies in (-2, 2)
    g = dasein_open(sigma_z, RatInterval(-2, 2), qubit_zx)
    assert g == bohr_frame(qubit_zx).top


def test_scalar_observable(qubit_zx, m2):
    a = HermObs(m2, 2 * np.eye(2))
    f = bohr_frame(qubit_zx)
    assert dasein_open(a, RatInterval(1, 3), qubit_zx) == f.top
    assert dasein_open(a, RatInterval(3, 4), qubit_zx) == f.bot
    assert dasein_open(a, RatInterval(2, 3), qubit_zx) == f.bot


def test_parallel_matches_sequential(rng, qubit_zx, m2):
    a = random_hermitian(rng, m2)
    iv = RatInterval(Fraction(-1, 4), Fraction(3, 4))
    assert dasein_open(a, iv, qubit_zx, n_workers=3).masks == dasein_open(a, iv, qubit_zx).masks


def test_order_check_reflexive(sigma_z, qubit_zx):
    report = dasein_order_check(sigma_z, sigma_z, qubit_zx)
    assert report.passed
    assert report.le and report.coincide


def test_order_check_shifted(sigma_z, qubit_zx):
    report = dasein_order_check(sigma_z, sigma_z + 1, qubit_zx)
    assert report.passed
    assert report.le
    assert not report.coincide
    report = dasein_order_check(sigma_z + 1, sigma_z, qubit_zx)
    assert not report.le


def test_order_check_bounds_compressions_not_norm(m2):
    s = 0.15
    u = np.array([[np.sqrt(1 - s * s), -s], [s, np.sqrt(1 - s * s)]])
    a = HermObs.diag([Fraction(1, 32), Fraction(31, 32)])
    b = HermObs(m2, u @ a.matrix @ u.T)
    poset = ContextPoset([context_from_obs(a), context_from_obs(b)], closure="none")
    report = dasein_order_check(a, b, poset)
    assert report.coincide
    assert report.passed
    assert not report.le
    # every compression sits in its grid cell, yet the rotation moves a far
    assert np.linalg.norm((b - a).matrix, 2) > float(GRID_STEP)
    for c in (context_from_obs(a), context_from_obs(b)):
        for lo, hi in compression_bounds(b - a, poset.contexts[poset.find(c)]):
            assert max(abs(lo), abs(hi)) < float(GRID_STEP)


def test_interval_monotonicity(rng, qubit_zx, m2, ket0):
    grid = [Fraction(k, 4) for k in range(-12, 13)]
    for _ in range(50):
        a = random_hermitian(rng, m2)
        q, q2, r2, r = sorted(grid[int(i)] for i in rng.choice(len(grid), 4, replace=False))
        narrow, wide = RatInterval(q2, r2), RatInterval(q, r)
        assert narrow.within(wide)
        assert dasein_open(a, narrow, qubit_zx).le(dasein_open(a, wide, qubit_zx))
        small = truth_value(ket0, a, narrow, qubit_zx).contexts
        assert set(small) <= set(truth_value(ket0, a, wide, qubit_zx).contexts)


def test_order_check_needs_generated_context(sigma_x, qubit_z):
    with pytest.raises(MissingGeneratedContext):
        dasein_order_check(sigma_x, sigma_x, qubit_z)


def test_rational_grid():
    grid = rational_grid(-1, 1, Fraction(1, 2))
    assert grid[0] == -2 and grid[-1] == 2
    assert len(grid) == 9


def test_admissible_samples_stay_below_supports(rng, c_z, c_x):
    alg = MatrixAlg.full(2)
    for _ in range(20):
        a = random_hermitian(rng, alg)
        for c in (c_z, c_x):
            f = admissible_below(a, c, rng)
            g = admissible_above(a, c, rng)
            assert c.contains(f) and c.contains(g)
            assert eigvalsh(a.matrix - f.matrix)[0] >= -1e-9
            assert eigvalsh(g.matrix - a.matrix)[0] >= -1e-9
            for q in (Fraction(-1, 2), Fraction(0), Fraction(1, 2)):
                assert proj_pos(f - q).le(inner_support(a, q, c))
                assert proj_pos(q - g).le(outer_support(a, q, c))


def test_push_matches_open(sigma_z, qubit_zx):
    iv = RatInterval(Fraction(1, 2), Fraction(3, 2))
    push = dasein_push(sigma_z, iv, qubit_zx)
    assert push.open == dasein_open(sigma_z, iv, qubit_zx)
    assert len(push.maps) == len(qubit_zx)


def test_interval_parsing():
    assert RatInterval.parse("1/2", "3/2") == RatInterval(Fraction(1, 2), Fraction(3, 2))
    assert Fraction(1) in RatInterval.parse("1/2", "3/2")
    assert RatInterval(0, 1).within(RatInterval(-1, 1))
    with pytest.raises(SchemaError):
        RatInterval.parse("3/2", "1/2")
    with pytest.raises(SchemaError):
        RatInterval.parse("0.5", "1")
    with pytest.raises(ValueError):
        RatInterval(1, 1)
    assert RatInterval.parse(0, "1/3").to_json() == {"q": "0", "r": "1/3"}
