import numpy as np
import pytest

from bohrtop.cstar import (
    Context,
    ContextPoset,
    HermObs,
    MatrixAlg,
    Projection,
    bloch_context,
    context_from_obs,
    context_poset,
    d_generator,
    diagonal_contexts,
    gelfand_frame,
    herm_eig,
    meet_contexts,
    partition_context,
    positive_part,
    proj_pos,
    proj_zero,
    random_hermitian,
    random_unitary,
    rotate_context,
    spectrum_cover,
    trivial_context,
    young_context,
    young_sequences,
)
from bohrtop.utils import (
    DegenerateIntersection,
    IncompatibleAlgebras,
    NotHermitian,
    NotInContext,
    NotOnSphere,
    NotProjection,
)


def test_block_structure_is_enforced():
    alg = MatrixAlg([1, 2])
    HermObs(alg, np.diag([1.0, 2.0, 3.0]))
    m = np.zeros((3, 3))
    m[0, 1] = m[1, 0] = 1
    with pytest.raises(NotHermitian):
        HermObs(alg, m)
    with pytest.raises(NotHermitian):
        HermObs(MatrixAlg.full(2), [[0, 1], [0, 0]])
    with pytest.raises(NotProjection):
        Projection(MatrixAlg.full(2), np.diag([2.0, 0.0]))


def test_herm_eig_diagonal(sigma_z):
    (lo, p_lo), (hi, p_hi) = herm_eig(sigma_z)
    assert (lo, hi) == pytest.approx((-1, 1))
    assert np.allclose(p_lo.matrix, np.diag([0, 1]))
    assert np.allclose(p_hi.matrix, np.diag([1, 0]))
    (value, p), = herm_eig(HermObs.diag([1, 1]))
    assert value == pytest.approx(1)
    assert np.allclose(p.matrix, np.eye(2))


def test_support_and_kernel(sigma_z, rng):
    assert np.allclose(proj_pos(sigma_z).matrix, np.diag([1, 0]))
    assert np.allclose(proj_pos(HermObs.diag([1, 2])).matrix, np.eye(2))
    assert proj_zero(sigma_z).is_zero()
    assert np.allclose(proj_zero(HermObs.diag([0, 0])).matrix, np.eye(2))


def test_context_from_obs(sigma_z, sigma_x, c_z, c_x, m2):
    assert context_from_obs(sigma_z).same_as(c_z)
    assert context_from_obs(sigma_x).same_as(c_x)
    assert len(context_from_obs(HermObs(m2, np.eye(2)))) == 1


def test_bloch_contexts(c_z, c_x):
    assert np.allclose(c_z.atoms[0].matrix, np.diag([1, 0]))
    assert np.allclose(c_x.atoms[0].matrix, 0.5 * np.ones((2, 2)))
    assert np.allclose(c_x.atoms[1].matrix, 0.5 * np.array([[1, -1], [-1, 1]]))
    assert c_z.same_as(bloch_context(0, 0, -1))
    with pytest.raises(NotOnSphere):
        bloch_context(1, 1, 0)


@pytest.mark.parametrize("n, count", [(1, 1), (3, 5), (4, 15)])
def test_diagonal_contexts(n, count):
    assert len(diagonal_contexts(n)) == count


def test_young_sequences():
    assert young_sequences(2, 2) == [(1, 2)]
    assert young_sequences(2, 3) == [(2, 3)]
    for n in range(1, 11):
        assert young_sequences(1, n) == [(n,)]
    assert young_sequences(3, 3) == [(1, 2, 3)]
    c = young_context((2, 3), 3)
    assert [p.rank() for p in c.atoms] == [2, 1]


def test_context_posets(c_z, c_x):
    chain = context_poset([c_z])
    assert len(chain) == 2
    assert chain.le(0, 1)
    flat = context_poset([c_z, c_x])
    assert len(flat) == 3
    assert flat.poset.hasse_covers() == [(0, 1), (0, 2)]
    partitions = context_poset(diagonal_contexts(3))
    assert len(partitions) == 5
    assert partitions.poset.minimal() == [0]
    assert len(partitions.poset.maximal()) == 1


def test_meet_contexts(c_z, c_x):
    assert len(meet_contexts(c_z, c_x)) == 1
    fine = partition_context([[0], [1], [2]])
    left = partition_context([[0, 1], [2]])
    right = partition_context([[0], [1, 2]])
    assert meet_contexts(fine, left).same_as(left)
    assert len(meet_contexts(left, right)) == 1
    with pytest.raises(IncompatibleAlgebras):
        meet_contexts(c_z, fine)


def test_meet_rotated_contexts(rng):
    u = random_unitary(rng, 3)
    base = partition_context([[0, 1], [2]], MatrixAlg.full(3))
    fine = partition_context([[0], [1], [2]], MatrixAlg.full(3))
    rotated = rotate_context(fine, u)
    assert meet_contexts(rotate_context(base, u), rotated).same_as(rotate_context(base, u))
    assert np.allclose(u @ u.conj().T, np.eye(3))


def test_degenerate_intersection_raises(c_z):
    theta = np.arccos(1 - 1e-8)
    tilted = bloch_context(np.sin(theta), 0, np.cos(theta))
    with pytest.raises(DegenerateIntersection) as err:
        meet_contexts(c_z, tilted)
    assert len(err.value.singular_values) == 2


def test_d_generator(c_z, sigma_z, m2):
    p = c_z.atoms[0]
    assert d_generator(p, c_z).same(p)
    assert d_generator(HermObs.diag([-1, 0]), c_z).is_zero()
    assert d_generator(sigma_z, c_z).same(p)


def test_gelfand_frame(m2, c_z):
    assert gelfand_frame(trivial_context(m2)).count() == 2
    assert gelfand_frame(partition_context([[0], [1], [2]])).count() == 8
    assert gelfand_frame(c_z).count() == 4


def test_spectrum_cover():
    c = partition_context([[0], [1], [2]])
    p = c.projection(0b011)
    assert spectrum_cover(c, p, [c.atoms[0], c.atoms[1]])
    assert not spectrum_cover(c, p, [c.atoms[2]])


def test_coordinates(c_z, c_x):
    assert c_z.coordinates(c_z.atoms[1]) == 0b10
    with pytest.raises(NotInContext):
        c_z.coordinates(c_x.atoms[0])
    assert c_z.try_coordinates(c_x.atoms[0]) is None


def test_spectral_identities(rng):
    for n in range(2, 5):
        alg = MatrixAlg.full(n)
        for _ in range(50):
            a = random_hermitian(rng, alg)
            pos = proj_pos(a)
            neg = proj_pos(-a)
            assert np.allclose(pos.matrix @ a.matrix, positive_part(a).matrix, atol=1e-8)
            assert np.max(np.abs(pos.matrix @ neg.matrix)) < 1e-8


def test_context_json_round_trip(c_x):
    again = Context.from_json(c_x.to_json())
    assert again.same_as(c_x)
    assert again.name == "C_x"
    fam = ContextPoset(diagonal_contexts(3))
    back = ContextPoset.from_json(fam.to_json())
    assert back.names == fam.names
    assert np.array_equal(back.poset.leq, fam.poset.leq)


def test_family_of_projection_algebras(qubit_zx):
    family = qubit_zx.family
    assert [b.atom_count for b in family.blocks] == [1, 2, 2]
    assert family.embeddings[(0, 1)] == (0b11,)
    assert family.validate().passed
