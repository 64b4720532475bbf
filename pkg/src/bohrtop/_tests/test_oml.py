import numpy as np
import pytest

from bohrtop.oml import (
    BlockFamily,
    MonoHeyting,
    Oml,
    amalgamate,
    blocks,
    example_x,
    example_x_family,
    horizontal_sum,
    inject,
    mono_heyting,
    mono_implies,
    random_block_family,
    sasaki_hook,
    validate_oml,
)
from bohrtop.order import BoolAlg, FinLattice, FinPoset
from bohrtop.utils import CapExceeded


def test_boolean_is_orthomodular():
    assert validate_oml(Oml.from_boolean(BoolAlg(3))).passed


def test_example_x_is_orthomodular():
    o = example_x()
    assert o.n == 10
    assert validate_oml(o).passed
    assert sorted(o.labels[x] for x in o.atoms) == ["a", "b", "c", "d", "d'"]


def test_non_involutive_ortho_fails():
    report = validate_oml(Oml(FinLattice.diamond(), [4, 2, 3, 1, 0]))
    assert not report.passed
    assert report.failures[0][0] == "involution"


def test_blocks_of_boolean():
    family = blocks(Oml.from_boolean(BoolAlg(2)))
    assert len(family) == 1
    assert family.blocks[0] == BoolAlg(2)


def test_blocks_of_example_x():
    o = example_x()
    maximal = blocks(o)
    assert sorted(b.atom_count for b in maximal.blocks) == [1, 2, 3]
    orthogonal = blocks(o, index="orthogonal")
    assert sorted(b.atom_count for b in orthogonal.blocks) == [1, 2, 2, 2, 2, 3]
    assert maximal.validate().passed
    assert orthogonal.validate().passed


def test_amalgamate_round_trip():
    o = example_x()
    assert amalgamate(blocks(o)).same_as(o)
    assert amalgamate(blocks(o, index="orthogonal")).same_as(o)


def test_horizontal_sum():
    mo2 = amalgamate(horizontal_sum(2, 2))
    assert mo2.n == 6
    assert validate_oml(mo2).passed
    assert not mo2.lattice.distributivity[0]


def test_single_block_amalgamates_to_itself():
    family = BlockFamily(FinPoset.chain(1), [BoolAlg(2)], {})
    assert amalgamate(family).n == 4


def test_sasaki_hook():
    o = example_x()
    for x in range(o.n):
        assert sasaki_hook(o, x, x) == o.top
    a, d = o.index("a"), o.index("d")
    assert sasaki_hook(o, a, d) == o.index("a'")


def test_example_x_family_count():
    h = mono_heyting(example_x_family())
    assert h.count() == 257
    assert h.bound_log2 == 9


def test_small_family_counts():
    single = BlockFamily(FinPoset.chain(1), [BoolAlg(2)], {})
    assert mono_heyting(single).count() == 4
    chain = BlockFamily(FinPoset.chain(2), [BoolAlg(1), BoolAlg(2)], {(0, 1): (0b11,)})
    assert mono_heyting(chain).count() == 5


def test_section_cap():
    with pytest.raises(CapExceeded) as err:
        MonoHeyting(example_x_family(), cap=100).count()
    assert err.value.bound_log2 == 9


def test_implies_matches_brute_force_on_example_x(rng):
    h = mono_heyting(example_x_family())
    secs = h.sections()
    for _ in range(40):
        g, k = (secs[int(i)] for i in rng.integers(0, len(secs), size=2))
        assert mono_implies(h, g, k) == h.brute_implies(g, k)
        assert h.implies(g, g) == h.top


def test_implies_matches_brute_force_on_random_families(rng):
    for _ in range(50):
        h = MonoHeyting(random_block_family(rng))
        secs = h.sections()
        for _ in range(3):
            g, k = (secs[int(i)] for i in rng.integers(0, len(secs), size=2))
            assert h.implies(g, k) == h.brute_implies(g, k)


def test_random_families_are_valid(rng):
    for _ in range(20):
        assert random_block_family(rng).validate().passed


def test_inject():
    b = example_x_family()
    h = MonoHeyting(b)
    assert inject(b, "0") == h.bot
    assert inject(b, "1") == h.top
    a = inject(b, "a")
    assert a == (0, 1, 0, 0, 0)
    assert h.is_section(a)


def test_adjunction_on_example_x():
    passed, witness = mono_heyting(example_x_family()).check_adjunction()
    assert passed and witness is None


def test_oml_json_round_trip():
    o = example_x()
    again = Oml.from_json(o.to_json())
    assert again.same_as(o)
    assert np.array_equal(again.lattice.poset.leq, o.lattice.poset.leq)


@pytest.mark.parametrize(
    "family",
    [example_x_family(), blocks(example_x()), blocks(example_x(), index="orthogonal")],
)
def test_inject_is_injective_and_reflects_order(family):
    o = amalgamate(family)
    h = MonoHeyting(family)
    images = {x: inject(family, x) for x in o.labels}
    for x, fx in images.items():
        assert h.is_section(fx)
        for y, fy in images.items():
            assert (fx == fy) == (x == y)
            if h.le(fx, fy):
                assert o.le(o.index(x), o.index(y))


def test_sasaki_adjunction_within_blocks():
    o = example_x()
    for labels in blocks(o, index="orthogonal").element_labels:
        members = [o.index(x) for x in labels]
        for x in members:
            for y in members:
                hook = sasaki_hook(o, x, y)
                for z in members:
                    assert o.le(z, hook) == o.le(o.meet(z, x), y)
    # across blocks it fails: d <= a' is false although d ∧ a = 0 <= d
    a, d = o.index("a"), o.index("d")
    assert not o.le(d, sasaki_hook(o, a, d))
    assert o.le(o.meet(d, a), d)


def test_sasaki_hook_is_not_heyting_implication():
    o = example_x()
    family = blocks(o)
    h = MonoHeyting(family)
    a, d = o.index("a"), o.index("d")
    hook = inject(family, o.labels[sasaki_hook(o, a, d)])
    heyting = h.implies(inject(family, "a"), inject(family, "d"))
    assert hook != heyting
    assert h.le(hook, heyting)
