#!/usr/bin/env python3
"""
The Bohrified state space of a context poset: monotone assignments of a
projection of each context, with the frame operations of the monotone
Heyting algebra of sections.

Quantifiers over larger contexts range over the stored poset only, so a
BohrFrame describes the truncated context family it was built from.
"""

from collections import namedtuple
from functools import reduce

from .cstar import Context, ContextPoset, spectrum_cover
from .oml import MonoHeyting
from .order import _distributive_witness
from .utils import (
    MONO_CAP,
    NotInPoset,
    PosetMismatch,
    SchemaError,
    _raise,
    bits,
    dot_graph,
)

BooleanReport = namedtuple("BooleanReport", ["passed", "witness", "distributive"])


def _heyting(poset):
    return MonoHeyting(poset.family)


class BohrOpen:
    """
    Basic description of an open: ``masks[k]`` is the projection assigned to
    context k, written as a set of its atoms.
    """

    def __init__(self, poset, masks, check=True):
        masks = tuple(int(m) for m in masks)
        len(masks) == len(poset) or _raise(
            ValueError(f"expected {len(poset)} values, got {len(masks)}")
        )
        if check:
            _heyting(poset).is_section(masks) or _raise(
                ValueError("assignment is not a monotone family of context projections")
            )
        self.poset = poset
        self.masks = masks

    def __repr__(self):
        values = ", ".join(
            f"{name}:{self.poset.contexts[k].boolean.label(m)}"
            for k, (name, m) in enumerate(zip(self.poset.names, self.masks))
        )
        return f"BohrOpen({values})"

    def __eq__(self, other):
        return (
            isinstance(other, BohrOpen)
            and other.poset is self.poset
            and other.masks == self.masks
        )

    def __hash__(self):
        return hash((id(self.poset), self.masks))

    def __getitem__(self, k):
        return self.masks[k]

    def projection(self, context):
        k = context if isinstance(context, int) else self.poset.index(context)
        return self.poset.contexts[k].projection(self.masks[k])

    def le(self, other):
        _same_poset(self, other)
        return all(a & ~b == 0 for a, b in zip(self.masks, other.masks))

    def support(self):
        """Indices of the contexts with a nonzero value."""
        return [k for k, m in enumerate(self.masks) if m]

    def check_covering(self):
        """Within each context, D_p ◁ U(C) only for p below the assigned value."""
        for k, c in enumerate(self.poset.contexts):
            for p in c.boolean.elements():
                if spectrum_cover(c, p, [self.masks[k]]) != (p & ~self.masks[k] == 0):
                    return False
        return True

    def to_json(self):
        return {
            "values": {
                name: bits(m) for name, m in zip(self.poset.names, self.masks)
            }
        }

    @classmethod
    def from_json(cls, data, poset, path="$"):
        isinstance(data, dict) and isinstance(data.get("values"), dict) or _raise(
            SchemaError("open must be {'values': {context: [atoms]}}", path)
        )
        masks = [0] * len(poset)
        for name, atoms in data["values"].items():
            name in poset.names or _raise(
                SchemaError(f"unknown context '{name}'", f"{path}.values")
            )
            k = poset.names.index(name)
            ok = isinstance(atoms, list) and all(
                isinstance(a, int) and 0 <= a < len(poset.contexts[k]) for a in atoms
            )
            ok or _raise(SchemaError("expected atom indices", f"{path}.values.{name}"))
            masks[k] = reduce(lambda m, a: m | (1 << a), atoms, 0)
        try:
            return cls(poset, masks)
        except ValueError as err:
            raise SchemaError(str(err), path)

    def to_dot(self, name="BohrOpen"):
        labels = [
            f"{n}: {c.boolean.label(m)}"
            for n, c, m in zip(self.poset.names, self.poset.contexts, self.masks)
        ]
        return dot_graph(
            labels, self.poset.poset.hasse_covers(), name=name, highlight=self.support()
        )


def _same_poset(g, h):
    g.poset is h.poset or _raise(PosetMismatch("opens live over different context posets"))


class BohrFrame:
    """
    Frame of all BohrOpens over a context poset, enumerated lazily.

    Parameters
    ----------
    poset : ContextPoset
    cap : int
        Largest number of opens enumerated by ``count`` and ``opens``.
    show_progress : bool
    """

    def __init__(self, poset, cap=MONO_CAP, show_progress=False):
        self.poset = poset
        self.heyting = MonoHeyting(poset.family, cap=cap, show_progress=show_progress)

    def __repr__(self):
        return f"BohrFrame({len(self.poset)} contexts)"

    @property
    def bound_log2(self):
        return self.heyting.bound_log2

    @property
    def top(self):
        return BohrOpen(self.poset, self.heyting.top, check=False)

    @property
    def bot(self):
        return BohrOpen(self.poset, self.heyting.bot, check=False)

    def count(self):
        return self.heyting.count()

    def opens(self):
        return [BohrOpen(self.poset, f, check=False) for f in self.heyting.sections()]

    def wrap(self, masks):
        return BohrOpen(self.poset, masks)

    def meet(self, g, h):
        return bohr_meet(g, h)

    def join(self, g, h):
        return bohr_join(g, h)

    def implies(self, g, h):
        return bohr_implies(g, h)

    def neg(self, g):
        return bohr_neg(g)

    def brute_implies(self, g, h):
        _same_poset(g, h)
        return BohrOpen(self.poset, self.heyting.brute_implies(g.masks, h.masks))

    def check_adjunction(self):
        """Exhaustive Heyting adjunction; returns (passed, witness opens)."""
        passed, witness = self.heyting.check_adjunction()
        if passed:
            return True, None
        return False, tuple(BohrOpen(self.poset, f, check=False) for f in witness)

    def check_distributivity(self):
        meet, join, _ = self.heyting.tables()
        w = _distributive_witness(meet, join)
        if w[0] < 0:
            return True, None
        secs = self.heyting.sections()
        return False, tuple(BohrOpen(self.poset, secs[int(k)], check=False) for k in w)

    def to_lattice(self):
        return self.heyting.to_lattice()


def bohr_frame(p, cap=MONO_CAP, show_progress=False):
    return BohrFrame(p, cap=cap, show_progress=show_progress)


def bohr_meet(g, h):
    _same_poset(g, h)
    out = BohrOpen(g.poset, _heyting(g.poset).meet(g.masks, h.masks), check=False)
    assert _heyting(g.poset).is_section(out.masks)
    return out


def bohr_join(g, h):
    _same_poset(g, h)
    out = BohrOpen(g.poset, _heyting(g.poset).join(g.masks, h.masks), check=False)
    assert _heyting(g.poset).is_section(out.masks)
    return out


def bohr_implies(g, h):
    """
    (g ⟹ h)(C) is the set of atoms x of C such that, at every D >= C, the
    image of x in D lies below the classical implication ¬g(D) ∨ h(D).
    """
    _same_poset(g, h)
    out = BohrOpen(g.poset, _heyting(g.poset).implies(g.masks, h.masks), check=False)
    assert _heyting(g.poset).is_section(out.masks)
    return out


def bohr_neg(g):
    return bohr_implies(g, BohrOpen(g.poset, _heyting(g.poset).bot, check=False))


def inject_proj(p, poset):
    """D(p): p at every context containing it, 0 elsewhere."""
    masks = []
    for c in poset.contexts:
        mask = c.try_coordinates(p)
        masks.append(0 if mask is None else mask)
    return BohrOpen(poset, masks)


def external_basic_open(poset, d):
    """Pull back of the Alexandrov basic open ↑D: top at every E >= D, 0 elsewhere."""
    if isinstance(d, Context):
        k = poset.find(d)
        k is not None or _raise(NotInPoset("context is not in the poset"))
    elif isinstance(d, int):
        0 <= d < len(poset) or _raise(NotInPoset(f"no context with index {d}"))
        k = d
    else:
        d in poset.names or _raise(NotInPoset(f"no context named '{d}'"))
        k = poset.names.index(d)
    up = poset.poset.up_masks[k]
    return BohrOpen(
        poset,
        [c.boolean.full if up >> e & 1 else 0 for e, c in enumerate(poset.contexts)],
        check=False,
    )


def upper_set_open(poset, mask):
    """Image of an arbitrary Alexandrov open (an upper set of contexts)."""
    poset.poset.is_upper(mask) or _raise(ValueError("not an upper set of contexts"))
    return BohrOpen(
        poset,
        [c.boolean.full if mask >> e & 1 else 0 for e, c in enumerate(poset.contexts)],
        check=False,
    )


def is_boolean_frame(f):
    """
    Booleanness check: ``passed`` iff ¬¬g = g for every open, with the first
    failing open as witness; ``distributive`` reports the companion check.
    """
    h = f.heyting
    witness = None
    for g in h.sections():
        if h.neg(h.neg(g)) != g:
            witness = BohrOpen(f.poset, g, check=False)
            break
    distributive, _ = f.check_distributivity()
    return BooleanReport(witness is None, witness, distributive)


def restrict_poset(poset, context):
    """Truncation at C: the contexts above C, with C as bottom."""
    k = context if isinstance(context, int) else poset.index(context)
    return ContextPoset(
        [poset.contexts[j] for j in [k] + [j for j in bits(poset.poset.up_masks[k]) if j != k]],
        closure="none",
        include_trivial=False,
    )
