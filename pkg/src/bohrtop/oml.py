#!/usr/bin/env python3
"""
Finite orthomodular lattices, their Boolean blocks and the monotone
Heyting algebra of sections over a block family.
"""

import itertools
from collections import namedtuple
from functools import cached_property, reduce

import numpy as np
from numba import jit
from tqdm import tqdm

from .order import BoolAlg, FinLattice, FinPoset, _transitive_closure
from .utils import (
    MONO_CAP,
    CapExceeded,
    GlueConflict,
    PosetError,
    SchemaError,
    _raise,
    bits,
    submasks,
)

OmlReport = namedtuple("OmlReport", ["passed", "failures"])
FamilyReport = namedtuple("FamilyReport", ["passed", "failures"])

_AXIOMS = ("involution", "antitone", "complement", "orthomodular")


@jit(nopython=True)
def _oml_witnesses(leq, meet, join, ortho, bot, top):
    n = leq.shape[0]
    out = -np.ones((4, 2), dtype=np.int64)
    for x in range(n):
        if out[0, 0] < 0 and ortho[ortho[x]] != x:
            out[0, 0] = x
            out[0, 1] = x
        if out[2, 0] < 0 and (meet[x, ortho[x]] != bot or join[x, ortho[x]] != top):
            out[2, 0] = x
            out[2, 1] = x
        for y in range(n):
            if leq[x, y]:
                if out[1, 0] < 0 and not leq[ortho[y], ortho[x]]:
                    out[1, 0] = x
                    out[1, 1] = y
                if out[3, 0] < 0 and join[x, meet[ortho[x], y]] != y:
                    out[3, 0] = x
                    out[3, 1] = y
    return out


@jit(nopython=True)
def _adjunction_witness(leq, meet, imp):
    n = leq.shape[0]
    for f in range(n):
        for g in range(n):
            m = meet[f, g]
            for h in range(n):
                if leq[f, imp[g, h]] != leq[m, h]:
                    return np.array([f, g, h])
    return np.array([-1, -1, -1])


class Oml:
    """Finite lattice with an orthocomplement ``ortho[x]``."""

    def __init__(self, lattice, ortho):
        self.lattice = lattice
        self.ortho = tuple(int(k) for k in ortho)
        len(self.ortho) == lattice.n or _raise(
            PosetError("ortho must map every element")
        )
        all(0 <= k < lattice.n for k in self.ortho) or _raise(
            PosetError("ortho values must be element indices")
        )

    @classmethod
    def from_relations(cls, labels, pairs, ortho_pairs):
        lattice = FinLattice.from_relations(labels, pairs)
        ortho = [None] * lattice.n
        for x, y in ortho_pairs:
            i, j = lattice.poset.index(x), lattice.poset.index(y)
            ortho[i], ortho[j] = j, i
        None not in ortho or _raise(PosetError("ortho must map every element"))
        return cls(lattice, ortho)

    @classmethod
    def from_boolean(cls, algebra):
        lattice = algebra.to_lattice()
        return cls(lattice, [algebra.neg(x) for x in algebra.elements()])

    @property
    def n(self):
        return self.lattice.n

    @property
    def labels(self):
        return self.lattice.labels

    @property
    def bot(self):
        return self.lattice.bot

    @property
    def top(self):
        return self.lattice.top

    def __len__(self):
        return self.lattice.n

    def __repr__(self):
        return f"Oml(n={self.n})"

    def index(self, label):
        return self.lattice.poset.index(label)

    def perp(self, x):
        return self.ortho[x]

    def meet(self, x, y):
        return self.lattice.meet(x, y)

    def join(self, x, y):
        return self.lattice.join(x, y)

    def le(self, x, y):
        return self.lattice.le(x, y)

    def orthogonal(self, x, y):
        return self.le(x, self.ortho[y])

    def compatible(self, x, y):
        return self.join(self.meet(x, y), self.meet(x, self.ortho[y])) == x

    @cached_property
    def atoms(self):
        return [
            x
            for x in range(self.n)
            if x != self.bot and self.lattice.poset.child[self.bot, x]
        ]

    def same_as(self, other):
        """Equality up to relabelling by element labels."""
        if set(self.labels) != set(other.labels):
            return False
        perm = [other.index(label) for label in self.labels]
        leq = other.lattice.poset.leq[np.ix_(perm, perm)]
        if not np.array_equal(leq, self.lattice.poset.leq):
            return False
        return all(perm[self.ortho[x]] == other.ortho[perm[x]] for x in range(self.n))

    def to_json(self):
        out = self.lattice.to_json()
        out["ortho"] = list(self.ortho)
        return out

    @classmethod
    def from_json(cls, data, path="$"):
        lattice = FinLattice(FinPoset.from_json(data, path))
        ortho = data.get("ortho")
        isinstance(ortho, list) and len(ortho) == lattice.n or _raise(
            SchemaError(f"'ortho' must list {lattice.n} indices", f"{path}.ortho")
        )
        return cls(lattice, ortho)

    def to_dot(self, highlight=(), name="OML"):
        return self.lattice.to_dot(highlight, name)


def validate_oml(o):
    """Exhaustive check of the orthocomplement and orthomodular axioms."""
    w = _oml_witnesses(
        o.lattice.poset.leq,
        o.lattice.meet_table,
        o.lattice.join_table,
        np.array(o.ortho, dtype=np.int64),
        o.bot,
        o.top,
    )
    failures = tuple(
        (axiom, (int(w[k, 0]), int(w[k, 1])))
        for k, axiom in enumerate(_AXIOMS)
        if w[k, 0] >= 0
    )
    return OmlReport(len(failures) == 0, failures)


def sasaki_hook(o, x, y):
    return o.join(o.perp(x), o.meet(x, y))


class BlockFamily:
    """
    Boolean algebras ``blocks[i]`` indexed by a finite poset, with an
    injective homomorphism ``B_i -> B_j`` for every ``i <= j``.

    An embedding is stored as the tuple of images of the atoms of ``B_i``;
    the image of any element is the union of the images of its atoms.
    """

    def __init__(self, index_poset, blocks, embeddings, element_labels=None):
        self.index_poset = index_poset
        self.blocks = tuple(blocks)
        len(self.blocks) == index_poset.n or _raise(
            ValueError("one block per index expected")
        )
        self.embeddings = {}
        for i in range(index_poset.n):
            self.embeddings[(i, i)] = tuple(1 << a for a in range(self.blocks[i].atom_count))
        for (i, j), images in embeddings.items():
            index_poset.le(i, j) or _raise(
                ValueError(f"embedding given for non-comparable indices {i}, {j}")
            )
            self.embeddings[(i, j)] = tuple(images)
        for i in range(index_poset.n):
            for j in bits(index_poset.up_masks[i]):
                (i, j) in self.embeddings or _raise(
                    ValueError(f"missing embedding {i} -> {j}")
                )
        self.element_labels = None if element_labels is None else tuple(
            tuple(labels) for labels in element_labels
        )
        self._positions = None

    def __len__(self):
        return self.index_poset.n

    def __repr__(self):
        sizes = ",".join(str(len(b)) for b in self.blocks)
        return f"BlockFamily(indices={len(self)}, sizes=[{sizes}])"

    def embed(self, i, j, mask):
        images = self.embeddings[(i, j)]
        return reduce(lambda m, a: m | images[a], bits(mask), 0)

    def label(self, i, mask):
        if self.element_labels is not None:
            return self.element_labels[i][mask]
        return f"{self.index_poset.labels[i]}:{BoolAlg.label(mask)}"

    def position(self, i, label):
        """Mask of the element labelled ``label`` in block i, or None."""
        if self._positions is None:
            self._positions = [
                {self.label(k, m): m for m in self.blocks[k].elements()}
                for k in range(len(self))
            ]
        return self._positions[i].get(label)

    def validate(self):
        """Embeddings are injective Boolean homomorphisms and compose."""
        failures = []
        p = self.index_poset
        for (i, j), images in self.embeddings.items():
            full = self.blocks[j].full
            union = reduce(lambda a, b: a | b, images, 0)
            disjoint = all(a & b == 0 for a, b in itertools.combinations(images, 2))
            if not (all(images) and disjoint and union == full):
                failures.append(("homomorphism", (i, j)))
        for i in range(p.n):
            for j in bits(p.up_masks[i]):
                for k in bits(p.up_masks[j]):
                    for a in range(self.blocks[i].atom_count):
                        if self.embed(j, k, self.embed(i, j, 1 << a)) != self.embed(i, k, 1 << a):
                            failures.append(("composition", (i, j, k)))
                            break
        return FamilyReport(len(failures) == 0, tuple(failures))


def _maximal_cliques(vertices, adjacent):
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(r)
            return
        for v in list(p):
            expand(r | {v}, p & adjacent[v], x & adjacent[v])
            p = p - {v}
            x = x | {v}

    expand(frozenset(), frozenset(vertices), frozenset())
    return out


def _orthogonal_sets(o):
    atoms = o.atoms
    adjacent = {
        a: frozenset(b for b in atoms if b != a and o.orthogonal(a, b)) for a in atoms
    }
    out = []
    for size in range(len(atoms) + 1):
        for combo in itertools.combinations(atoms, size):
            if all(b in adjacent[a] for a, b in itertools.combinations(combo, 2)):
                out.append(frozenset(combo))
    return out


def _generated_members(o, orthogonal_atoms):
    generators = sorted(orthogonal_atoms)
    rest = o.perp(o.lattice.join_all(generators))
    if rest != o.bot:
        generators.append(rest)
    members = tuple(
        o.lattice.join_all(generators[a] for a in bits(mask))
        for mask in range(1 << len(generators))
    )
    return len(generators), members


def blocks(o, index="maximal"):
    """
    Boolean subalgebras of ``o`` as a BlockFamily ordered by inclusion.

    ``index="maximal"`` gives the maximal blocks, with a synthetic bottom
    ``{0, 1}`` whenever there are several; ``index="orthogonal"`` gives the
    subalgebras generated by every orthogonal set of atoms.
    """
    if index == "maximal":
        atoms = o.atoms
        adjacent = {
            a: frozenset(b for b in atoms if b != a and o.orthogonal(a, b))
            for a in atoms
        }
        generating = _maximal_cliques(atoms, adjacent)
    elif index == "orthogonal":
        generating = _orthogonal_sets(o)
    else:
        raise ValueError(f"unknown block index '{index}'")

    found = {}
    for clique in generating:
        k, members = _generated_members(o, clique)
        found.setdefault(frozenset(members), (k, members))
    family = sorted(found.values(), key=lambda km: (len(km[1]), km[1]))
    trivial = frozenset({o.bot, o.top})
    if len(family) > 1 and trivial not in found and o.bot != o.top:
        family.insert(0, (1, (o.bot, o.top)))

    sets = [frozenset(members) for _, members in family]
    m = len(family)
    leq = np.array([[sets[i] <= sets[j] for j in range(m)] for i in range(m)])
    index_labels = [
        "{" + ",".join(sorted(o.labels[e] for e in s)) + "}" if len(s) <= 4 else f"B{k}"
        for k, s in enumerate(sets)
    ]
    index_poset = FinPoset(leq, index_labels)
    embeddings = {}
    for i in range(m):
        for j in range(m):
            if i != j and leq[i, j]:
                k_j, members_j = family[j]
                lookup = {e: mask for mask, e in enumerate(members_j)}
                embeddings[(i, j)] = tuple(
                    lookup[family[i][1][1 << a]] for a in range(family[i][0])
                )
    return BlockFamily(
        index_poset,
        [BoolAlg(k) for k, _ in family],
        embeddings,
        element_labels=[[o.labels[e] for e in members] for _, members in family],
    )


def amalgamate(b):
    """
    Glue the blocks of ``b`` along its embeddings into one orthomodular
    lattice; elements are the classes of block elements identified by the
    embeddings.
    """
    parent = {}

    def find(key):
        root = key
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(key, key) != root:
            parent[key], key = root, parent[key]
        return root

    def union(k1, k2):
        r1, r2 = find(k1), find(k2)
        if r1 != r2:
            parent[max(r1, r2)] = min(r1, r2)

    order = b.index_poset.linear_extension()
    rank = {i: r for r, i in enumerate(order)}
    keys = [(rank[i], mask) for i in order for mask in b.blocks[i].elements()]
    for (i, j) in b.embeddings:
        for mask in b.blocks[i].elements():
            union((rank[i], mask), (rank[j], b.embed(i, j, mask)))

    roots = sorted({find(k) for k in keys})
    cls_of = {r: c for c, r in enumerate(roots)}
    labels = [b.label(order[r], mask) for r, mask in roots]

    relation = {}
    complement = {}
    for i in order:
        block = b.blocks[i]
        cls = [cls_of[find((rank[i], m))] for m in block.elements()]
        for x in block.elements():
            cx, cn = cls[x], cls[block.neg(x)]
            if complement.setdefault(cx, cn) != cn:
                raise GlueConflict(
                    f"blocks disagree on the complement of {labels[cx]}", pair=(cx, cx)
                )
            for y in block.elements():
                pair = (cx, cls[y])
                le = block.le(x, y)
                if relation.setdefault(pair, le) != le:
                    raise GlueConflict(
                        f"blocks disagree on {labels[pair[0]]} <= {labels[pair[1]]}",
                        pair=pair,
                    )
    n = len(roots)
    rel = np.eye(n, dtype=bool)
    for (cx, cy), le in relation.items():
        rel[cx, cy] |= le
    try:
        poset = FinPoset(_transitive_closure(rel), labels)
    except PosetError as err:
        raise GlueConflict(f"glued order is not a partial order: {err}")
    return Oml(FinLattice(poset), [complement[c] for c in range(n)])


def example_x():
    """
    The ten-element orthomodular lattice with a, b, c mutually orthogonal
    (a <= b', c' and so on) and d, d' comparable only to 0 and 1.
    """
    labels = ["0", "a", "b", "c", "d", "a'", "b'", "c'", "d'", "1"]
    pairs = [("0", x) for x in ("a", "b", "c", "d", "d'")]
    pairs += [
        ("a", "b'"), ("a", "c'"),
        ("b", "a'"), ("b", "c'"),
        ("c", "a'"), ("c", "b'"),
    ]
    pairs += [(x, "1") for x in ("a'", "b'", "c'", "d", "d'")]
    ortho = [("0", "1"), ("a", "a'"), ("b", "b'"), ("c", "c'"), ("d", "d'")]
    return Oml.from_relations(labels, pairs, ortho)


def example_x_family():
    """Index poset {0 < a, b, c, d}; B_0 = {0, 1} and B_i = {0, i, i', 1}."""
    names = ["a", "b", "c", "d"]
    index_poset = FinPoset.from_relations(["0"] + names, [("0", x) for x in names])
    embeddings = {(0, k): (0b11,) for k in range(1, 5)}
    labels = [["0", "1"]] + [["0", x, x + "'", "1"] for x in names]
    return BlockFamily(
        index_poset, [BoolAlg(1)] + [BoolAlg(2)] * 4, embeddings, element_labels=labels
    )


def horizontal_sum(*atom_counts):
    """Boolean algebras with the given numbers of atoms glued along {0, 1}."""
    index_poset = FinPoset.from_relations(
        ["0"] + [f"B{k}" for k in range(len(atom_counts))],
        [("0", f"B{k}") for k in range(len(atom_counts))],
    )
    algebras = [BoolAlg(1)] + [BoolAlg(k) for k in atom_counts]
    embeddings = {(0, k + 1): (algebras[k + 1].full,) for k in range(len(atom_counts))}
    labels = [["0", "1"]] + [
        [
            "0" if m == 0 else "1" if m == algebras[k + 1].full else f"B{k}:{BoolAlg.label(m)}"
            for m in algebras[k + 1].elements()
        ]
        for k in range(len(atom_counts))
    ]
    return BlockFamily(index_poset, algebras, embeddings, element_labels=labels)


def _refine(parts, rng, extra_splits):
    parts = [list(p) for p in parts]
    for _ in range(extra_splits):
        splittable = [k for k, p in enumerate(parts) if len(p) > 1]
        if not splittable:
            break
        k = splittable[int(rng.integers(len(splittable)))]
        p = parts.pop(k)
        cut = int(rng.integers(1, len(p)))
        perm = list(rng.permutation(p))
        parts.insert(k, sorted(perm[cut:]))
        parts.insert(k, sorted(perm[:cut]))
    return parts


def _common_refinement(partitions, universe):
    parts = [list(universe)]
    for partition in partitions:
        parts = [
            sorted(set(p) & set(q)) for p in parts for q in partition if set(p) & set(q)
        ]
    return parts


def random_block_family(rng, max_indices=5, max_atoms=4, edge_prob=0.5):
    """
    Random family over an index poset with a bottom. Each index carries a
    partition of a small universe and ``i <= j`` forces the partition at
    j to refine the one at i, so embeddings compose by construction.
    """
    m = int(rng.integers(1, max_indices + 1))
    universe = list(range(int(rng.integers(1, max_atoms + 1))))
    pairs = [(0, j) for j in range(1, m)]
    pairs += [
        (i, j) for i in range(1, m) for j in range(i + 1, m) if rng.random() < edge_prob
    ]
    index_poset = FinPoset.from_relations([f"i{k}" for k in range(m)], pairs)
    partitions = []
    for j in range(m):
        below = [partitions[i] for i in range(j) if index_poset.le(i, j)]
        base = _common_refinement(below, universe)
        partitions.append(_refine(base, rng, int(rng.integers(0, len(universe)))))
    embeddings = {}
    for i in range(m):
        for j in bits(index_poset.up_masks[i]):
            if i != j:
                embeddings[(i, j)] = tuple(
                    reduce(
                        lambda acc, k: acc | (1 << k),
                        (k for k, q in enumerate(partitions[j]) if set(q) <= set(p)),
                        0,
                    )
                    for p in partitions[i]
                )
    return BlockFamily(index_poset, [BoolAlg(len(p)) for p in partitions], embeddings)


class MonoHeyting:
    """
    Monotone sections ``f`` of a block family: ``f[i]`` is an element of
    ``B_i`` and ``embed(i, j, f[i]) <= f[j]`` for ``i <= j``. Lattice
    operations are pointwise; sections are tuples of masks.
    """

    def __init__(self, family, cap=MONO_CAP, show_progress=False):
        self.family = family
        self.cap = cap
        self.show_progress = show_progress
        self._order = family.index_poset.linear_extension()
        self._sections = None
        self._index = None

    def __repr__(self):
        return f"MonoHeyting({self.family!r})"

    @property
    def bound_log2(self):
        return sum(b.atom_count for b in self.family.blocks)

    @property
    def top(self):
        return tuple(b.full for b in self.family.blocks)

    @property
    def bot(self):
        return tuple(0 for _ in self.family.blocks)

    def is_section(self, f):
        fam = self.family
        if len(f) != len(fam):
            return False
        if any(f[i] & ~fam.blocks[i].full for i in range(len(fam))):
            return False
        return all(
            fam.embed(i, j, f[i]) & ~f[j] == 0 for (i, j) in fam.embeddings
        )

    def le(self, f, g):
        return all(a & ~b == 0 for a, b in zip(f, g))

    def meet(self, f, g):
        return tuple(a & b for a, b in zip(f, g))

    def join(self, f, g):
        return tuple(a | b for a, b in zip(f, g))

    def implies(self, g, h):
        """(g ⟹ h)(i) = atoms x of B_i with embed(i, j, x) <= ¬g(j) ∨ h(j) for all j >= i."""
        fam = self.family
        p = fam.index_poset
        allowed = [fam.blocks[j].full & (~g[j] | h[j]) for j in range(len(fam))]
        out = []
        for i in range(len(fam)):
            images = [(j, fam.embeddings[(i, j)]) for j in bits(p.up_masks[i])]
            mask = 0
            for a in range(fam.blocks[i].atom_count):
                if all(images_j[a] & ~allowed[j] == 0 for j, images_j in images):
                    mask |= 1 << a
            out.append(mask)
        return tuple(out)

    def neg(self, g):
        return self.implies(g, self.bot)

    def brute_implies(self, g, h):
        out = self.bot
        for f in self.sections():
            if self.le(self.meet(f, g), h):
                out = self.join(out, f)
        return out

    def sections(self):
        """All monotone sections in canonical order; CapExceeded beyond ``cap``."""
        if self._sections is not None:
            return self._sections
        fam = self.family
        p = fam.index_poset
        order = self._order
        below = {
            i: [k for k in bits(p.down_masks[i]) if k != i] for i in range(len(fam))
        }
        out = []
        current = [0] * len(fam)
        pbar = tqdm(desc="enumerating sections", disable=not self.show_progress)

        def descend(pos):
            if pos == len(order):
                out.append(tuple(current))
                pbar.update(1)
                if len(out) > self.cap:
                    raise CapExceeded(
                        f"more than {self.cap} monotone sections",
                        bound_log2=self.bound_log2,
                        cap=self.cap,
                        lower_bound=len(out),
                    )
                return
            i = order[pos]
            lower = reduce(
                lambda m, k: m | fam.embed(k, i, current[k]), below[i], 0
            )
            for extra in submasks(fam.blocks[i].full & ~lower):
                current[i] = lower | extra
                descend(pos + 1)
            current[i] = 0

        try:
            descend(0)
        finally:
            pbar.close()
        self._sections = sorted(out)
        self._index = {f: k for k, f in enumerate(self._sections)}
        return self._sections

    def count(self):
        return len(self.sections())

    def index(self, f):
        self.sections()
        f in self._index or _raise(ValueError(f"{f} is not a monotone section"))
        return self._index[f]

    def leq_matrix(self):
        s = np.array(self.sections(), dtype=np.int64)
        return np.all((s[:, None, :] & ~s[None, :, :]) == 0, axis=2)

    def tables(self):
        """Index tables of meet, join and implication over all sections."""
        secs = self.sections()
        n = len(secs)
        meet = np.zeros((n, n), dtype=np.int64)
        join = np.zeros((n, n), dtype=np.int64)
        imp = np.zeros((n, n), dtype=np.int64)
        for a in tqdm(range(n), desc="tables", disable=not self.show_progress):
            for b in range(n):
                meet[a, b] = self._index[self.meet(secs[a], secs[b])]
                join[a, b] = self._index[self.join(secs[a], secs[b])]
                imp[a, b] = self._index[self.implies(secs[a], secs[b])]
        return meet, join, imp

    def check_adjunction(self):
        """Exhaustive f <= (g ⟹ h) iff f ∧ g <= h; returns (passed, witness)."""
        meet, _, imp = self.tables()
        w = _adjunction_witness(self.leq_matrix(), meet, imp)
        if w[0] < 0:
            return True, None
        secs = self._sections
        return False, tuple(secs[int(k)] for k in w)

    def to_lattice(self):
        labels = ["(" + ",".join(str(m) for m in f) + ")" for f in self.sections()]
        return FinLattice(FinPoset(self.leq_matrix(), labels))


def mono_heyting(b, cap=MONO_CAP, show_progress=False):
    return MonoHeyting(b, cap=cap, show_progress=show_progress)


def mono_implies(h, g, k):
    return h.implies(g, k)


def inject(b, x):
    """D(x)(i) = x where x belongs to B_i, 0 elsewhere; ``x`` is an amalgam label."""
    return tuple(
        b.position(i, x) if b.position(i, x) is not None else 0 for i in range(len(b))
    )
