#!/usr/bin/env python3
"""
Exact finite posets, lattices and frames.

Subsets of a poset are Python ints used as bitmasks over element indices,
so meets of opens are ``&`` and unions are ``|``.
"""

import itertools
from collections import namedtuple
from functools import cached_property, reduce

import numpy as np
from numba import jit
from tqdm import tqdm

from .utils import (
    DEFAULT_CAP,
    CapExceeded,
    NotALattice,
    NotContinuous,
    NotDistributive,
    PosetError,
    SchemaError,
    _raise,
    bits,
    dot_graph,
)

CoverReport = namedtuple("CoverReport", ["passed", "checked", "failures"])
FrameMapReport = namedtuple("FrameMapReport", ["passed", "failures"])


def _popcount(mask):
    return bin(mask).count("1")


def _canonical(masks):
    return sorted(set(masks), key=lambda m: (_popcount(m), m))


@jit(nopython=True)
def _lub_table(leq):
    n = leq.shape[0]
    upcount = np.zeros(n, dtype=np.int64)
    for k in range(n):
        for m in range(n):
            if leq[k, m]:
                upcount[k] += 1
    out = -np.ones((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            best = -1
            for k in range(n):
                if leq[i, k] and leq[j, k]:
                    if best < 0 or upcount[k] > upcount[best]:
                        best = k
            if best >= 0:
                for m in range(n):
                    if leq[i, m] and leq[j, m] and not leq[best, m]:
                        best = -1
                        break
            out[i, j] = best
            out[j, i] = best
    return out


@jit(nopython=True)
def _distributive_witness(meet, join):
    n = meet.shape[0]
    for x in range(n):
        for y in range(n):
            for z in range(y + 1, n):
                if meet[x, join[y, z]] != join[meet[x, y], meet[x, z]]:
                    return np.array([x, y, z])
    return np.array([-1, -1, -1])


def _transitive_closure(rel):
    rel = rel.copy()
    while True:
        step = rel | ((rel.astype(np.int64) @ rel.astype(np.int64)) > 0)
        if np.array_equal(step, rel):
            return rel
        rel = step


class FinPoset:
    """
    Immutable finite partial order on ``range(n)``.

    ``leq[i, j]`` is True iff element i is below element j. Labels are
    display names only; every operation works on indices.
    """

    def __init__(self, leq, labels=None):
        leq = np.array(leq, dtype=bool)
        n = leq.shape[0]
        leq.ndim == 2 and leq.shape == (n, n) or _raise(
            PosetError(f"leq must be square, got shape {leq.shape}")
        )
        leq.flags.writeable = False
        self.n = n
        self.leq = leq
        self.labels = tuple(str(i) for i in range(n)) if labels is None else tuple(
            str(label) for label in labels
        )
        len(self.labels) == n or _raise(PosetError("one label per element expected"))
        len(set(self.labels)) == n or _raise(PosetError("labels must be distinct"))
        self._check_partial_order()

    def _check_partial_order(self):
        leq = self.leq
        n = self.n
        np.all(np.diag(leq)) or _raise(PosetError("relation is not reflexive"))
        both = leq & leq.T
        if not np.array_equal(both, np.eye(n, dtype=bool)):
            i, j = np.argwhere(both & ~np.eye(n, dtype=bool))[0]
            raise PosetError(
                f"relation is not antisymmetric: {self.labels[i]} and {self.labels[j]}"
            )
        composed = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if np.any(composed & ~leq):
            i, j = np.argwhere(composed & ~leq)[0]
            raise PosetError(
                f"relation is not transitive: {self.labels[i]} <= {self.labels[j]} missing"
            )

    @classmethod
    def from_relations(cls, labels, pairs):
        """Build the reflexive-transitive closure of ``pairs`` (label or index pairs)."""
        labels = list(labels)
        n = len(labels)
        position = {str(label): k for k, label in enumerate(labels)}
        rel = np.eye(n, dtype=bool)
        for a, b in pairs:
            i = a if isinstance(a, (int, np.integer)) else position.get(str(a))
            j = b if isinstance(b, (int, np.integer)) else position.get(str(b))
            i is not None and j is not None or _raise(
                PosetError(f"unknown element in pair ({a}, {b})")
            )
            rel[i, j] = True
        return cls(_transitive_closure(rel), labels)

    @classmethod
    def antichain(cls, n):
        return cls(np.eye(n, dtype=bool))

    @classmethod
    def chain(cls, n):
        return cls(np.triu(np.ones((n, n), dtype=bool)))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FinPoset(n={self.n})"

    def __eq__(self, other):
        return isinstance(other, FinPoset) and np.array_equal(self.leq, other.leq)

    def __hash__(self):
        return hash(self.leq.tobytes())

    def index(self, label):
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise PosetError(f"unknown element '{label}'")

    def le(self, i, j):
        return bool(self.leq[i, j])

    @cached_property
    def up_masks(self):
        return tuple(
            reduce(lambda m, j: m | (1 << int(j)), np.nonzero(self.leq[i])[0], 0)
            for i in range(self.n)
        )

    @cached_property
    def down_masks(self):
        return tuple(
            reduce(lambda m, j: m | (1 << int(j)), np.nonzero(self.leq[:, i])[0], 0)
            for i in range(self.n)
        )

    @cached_property
    def full_mask(self):
        return (1 << self.n) - 1

    def up_closure(self, mask):
        out = 0
        for i in bits(mask):
            out |= self.up_masks[i]
        return out

    def down_closure(self, mask):
        out = 0
        for i in bits(mask):
            out |= self.down_masks[i]
        return out

    def is_upper(self, mask):
        return self.up_closure(mask) == mask

    def is_lower(self, mask):
        return self.down_closure(mask) == mask

    @cached_property
    def child(self):
        """``child[i, j]`` iff j covers i."""
        lt = self.leq.copy()
        lt[np.diag_indices_from(lt)] = False
        between = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
        return lt & ~between

    def hasse_covers(self):
        return [(int(i), int(j)) for i, j in np.argwhere(self.child)]

    def linear_extension(self):
        """Indices sorted so that i precedes j whenever i < j."""
        sizes = self.leq.sum(axis=0)
        return sorted(range(self.n), key=lambda i: (int(sizes[i]), i))

    def minimal(self):
        return [i for i in range(self.n) if self.leq[:, i].sum() == 1]

    def maximal(self):
        return [i for i in range(self.n) if self.leq[i].sum() == 1]

    def opposite(self):
        return FinPoset(self.leq.T, self.labels)

    def restrict(self, indices):
        indices = list(indices)
        return FinPoset(self.leq[np.ix_(indices, indices)], [self.labels[i] for i in indices])

    def to_json(self):
        return {
            "elements": list(self.labels),
            "leq": [[int(i), int(j)] for i, j in self.hasse_covers()],
        }

    @classmethod
    def from_json(cls, data, path="$"):
        isinstance(data, dict) or _raise(SchemaError("expected an object", path))
        "elements" in data or _raise(SchemaError("missing 'elements'", path))
        labels = data["elements"]
        isinstance(labels, list) or _raise(
            SchemaError("'elements' must be a list", f"{path}.elements")
        )
        pairs = data.get("leq", [])
        for k, pair in enumerate(pairs):
            ok = (
                isinstance(pair, list)
                and len(pair) == 2
                and all(isinstance(v, int) and 0 <= v < len(labels) for v in pair)
            )
            ok or _raise(SchemaError("expected an index pair", f"{path}.leq[{k}]"))
        return cls.from_relations(labels, [tuple(p) for p in pairs])

    def to_dot(self, highlight=(), name="P"):
        return dot_graph(self.labels, self.hasse_covers(), name=name, highlight=highlight)


def _enumerate_closed_sets(order, requires, cap, show_progress=False, what="sets"):
    """
    Depth-first enumeration of the subsets S with ``requires[e] ⊆ S`` for
    every e in S. ``order`` lists elements so that each one appears after
    everything it requires.
    """
    out = []
    n = len(order)
    stack = [(0, 0)]
    pbar = tqdm(desc=f"enumerating {what}", disable=not show_progress)
    while stack:
        k, current = stack.pop()
        if k == n:
            out.append(current)
            pbar.update(1)
            if len(out) > cap:
                pbar.close()
                raise CapExceeded(
                    f"more than {cap} {what}", cap=cap, lower_bound=len(out)
                )
            continue
        e = order[k]
        if requires[e] & ~current == 0:
            stack.append((k + 1, current | (1 << e)))
        stack.append((k + 1, current))
    pbar.close()
    return _canonical(out)


def upper_sets(p, cap=DEFAULT_CAP, show_progress=False):
    order = p.linear_extension()[::-1]
    requires = [p.up_masks[e] & ~(1 << e) for e in range(p.n)]
    return _enumerate_closed_sets(order, requires, cap, show_progress, "upper sets")


def lower_sets(p, cap=DEFAULT_CAP, show_progress=False):
    order = p.linear_extension()
    requires = [p.down_masks[e] & ~(1 << e) for e in range(p.n)]
    return _enumerate_closed_sets(order, requires, cap, show_progress, "lower sets")


class FinLattice:
    """Finite lattice with precomputed meet and join tables."""

    def __init__(self, poset):
        self.poset = poset
        n = poset.n
        n > 0 or _raise(NotALattice("a lattice needs at least one element"))
        join = _lub_table(poset.leq)
        meet = _lub_table(np.ascontiguousarray(poset.leq.T))
        for table, kind in ((join, "join"), (meet, "meet")):
            if np.any(table < 0):
                i, j = np.argwhere(table < 0)[0]
                raise NotALattice(
                    f"no {kind} for ({poset.labels[i]}, {poset.labels[j]})",
                    pair=(int(i), int(j)),
                )
        join.flags.writeable = False
        meet.flags.writeable = False
        self.join_table = join
        self.meet_table = meet
        self.bot = int(reduce(lambda a, b: meet[a, b], range(n), 0))
        self.top = int(reduce(lambda a, b: join[a, b], range(n), 0))

    @classmethod
    def from_relations(cls, labels, pairs):
        return cls(FinPoset.from_relations(labels, pairs))

    @classmethod
    def chain(cls, n):
        return cls(FinPoset.chain(n))

    @classmethod
    def diamond(cls):
        """M3: three pairwise incomparable atoms between 0 and 1."""
        return cls.from_relations(
            ["0", "x", "y", "z", "1"],
            [("0", "x"), ("0", "y"), ("0", "z"), ("x", "1"), ("y", "1"), ("z", "1")],
        )

    @classmethod
    def pentagon(cls):
        return cls.from_relations(
            ["0", "a", "b", "c", "1"],
            [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        )

    @classmethod
    def boolean(cls, k):
        return BoolAlg(k).to_lattice()

    @property
    def n(self):
        return self.poset.n

    @property
    def labels(self):
        return self.poset.labels

    def __len__(self):
        return self.poset.n

    def __repr__(self):
        return f"FinLattice(n={self.n})"

    def le(self, i, j):
        return bool(self.poset.leq[i, j])

    def meet(self, i, j):
        return int(self.meet_table[i, j])

    def join(self, i, j):
        return int(self.join_table[i, j])

    def join_all(self, elements):
        return reduce(self.join, elements, self.bot)

    def meet_all(self, elements):
        return reduce(self.meet, elements, self.top)

    def join_mask(self, mask):
        return self.join_all(bits(mask))

    def is_distributive_join(self, mask):
        """True iff ``(⋁M) ∧ x = ⋁ (m ∧ x)`` for every x."""
        j = self.join_mask(mask)
        members = bits(mask)
        for x in range(self.n):
            if self.meet(j, x) != self.join_all(self.meet(m, x) for m in members):
                return False
        return True

    @cached_property
    def distributivity(self):
        w = _distributive_witness(self.meet_table, self.join_table)
        if w[0] < 0:
            return True, None
        return False, tuple(int(v) for v in w)

    def to_json(self):
        return self.poset.to_json()

    def to_dot(self, highlight=(), name="L"):
        return self.poset.to_dot(highlight, name)


class BoolAlg:
    """Boolean algebra of all subsets of ``atom_count`` atoms, elements as masks."""

    def __init__(self, atom_count):
        atom_count >= 0 or _raise(ValueError("atom_count must be non-negative"))
        self.atom_count = int(atom_count)
        self.full = (1 << self.atom_count) - 1

    def __len__(self):
        return 1 << self.atom_count

    def __repr__(self):
        return f"BoolAlg({self.atom_count})"

    def __eq__(self, other):
        return isinstance(other, BoolAlg) and other.atom_count == self.atom_count

    def __hash__(self):
        return hash(("BoolAlg", self.atom_count))

    @property
    def bot(self):
        return 0

    @property
    def top(self):
        return self.full

    def elements(self):
        return range(1 << self.atom_count)

    def atoms(self):
        return [1 << i for i in range(self.atom_count)]

    def meet(self, x, y):
        return x & y

    def join(self, x, y):
        return x | y

    def neg(self, x):
        return self.full & ~x

    def implies(self, x, y):
        return self.full & (~x | y)

    def le(self, x, y):
        return x & ~y == 0

    @staticmethod
    def label(x):
        return "{" + ",".join(str(i) for i in bits(x)) + "}"

    def to_lattice(self):
        n = len(self)
        el = np.arange(n)
        leq = (el[:, None] & ~el[None, :]) == 0
        return FinLattice(FinPoset(leq, [self.label(x) for x in range(n)]))


def is_distributive(l):
    """Exhaustive check of x∧(y∨z) = (x∧y)∨(x∧z); returns (passed, witness triple)."""
    return l.distributivity


def heyting_implies(l, y, z):
    ok, witness = is_distributive(l)
    ok or _raise(
        NotDistributive(f"lattice is not distributive at {witness}", witness=witness)
    )
    return l.join_all(x for x in range(l.n) if l.le(l.meet(x, y), z))


def well_inside(l, x, y):
    return any(
        l.meet(z, x) == l.bot and l.join(z, y) == l.top for z in range(l.n)
    )


class FrameElems:
    """
    A finite frame whose elements are subsets of ``base`` (bitmasks).

    Meets are intersections; joins are unions followed by ``closure``
    (identity when the carrier is union-closed).
    """

    def __init__(self, base, carrier, closure=None, name="frame"):
        self.base = base
        self.carrier = tuple(carrier)
        self._index = {u: k for k, u in enumerate(self.carrier)}
        self._closure = closure
        self.name = name
        len(self.carrier) > 0 or _raise(ValueError("a frame has at least one element"))

    def __len__(self):
        return len(self.carrier)

    def __iter__(self):
        return iter(self.carrier)

    def __contains__(self, mask):
        return mask in self._index

    def __repr__(self):
        return f"FrameElems({self.name}, size={len(self)})"

    def count(self):
        return len(self.carrier)

    def index(self, mask):
        mask in self._index or _raise(ValueError(f"{mask:#x} is not in the frame"))
        return self._index[mask]

    def close(self, mask):
        return mask if self._closure is None else self._closure(mask)

    @cached_property
    def bot(self):
        return reduce(lambda a, b: a & b, self.carrier)

    @cached_property
    def top(self):
        return self.close(reduce(lambda a, b: a | b, self.carrier))

    def le(self, u, v):
        return u & ~v == 0

    def meet(self, u, v):
        return u & v

    def join(self, u, v):
        return self.close(u | v)

    def join_all(self, masks):
        return self.close(reduce(lambda a, b: a | b, masks, self.bot))

    def implies(self, u, v):
        return self.join_all(w for w in self.carrier if w & u & ~v == 0)

    def neg(self, u):
        return self.implies(u, self.bot)

    def label(self, mask):
        labels = self.base.labels
        return "{" + ",".join(labels[i] for i in bits(mask)) + "}"

    def to_lattice(self):
        masks = np.array(self.carrier, dtype=object)
        n = len(masks)
        leq = np.zeros((n, n), dtype=bool)
        for i in range(n):
            for j in range(n):
                leq[i, j] = masks[i] & ~masks[j] == 0
        return FinLattice(FinPoset(leq, [self.label(m) for m in self.carrier]))

    def tables(self):
        n = len(self)
        meet = np.zeros((n, n), dtype=np.int64)
        join = np.zeros((n, n), dtype=np.int64)
        for i, u in enumerate(self.carrier):
            for j in range(i, n):
                v = self.carrier[j]
                meet[i, j] = meet[j, i] = self._index[u & v]
                join[i, j] = join[j, i] = self._index[self.close(u | v)]
        return meet, join

    def check_infinite_distributivity(self):
        """
        On a finite carrier every join is finite, so the binary law
        suffices; returns (passed, witness masks).
        """
        meet, join = self.tables()
        w = _distributive_witness(meet, join)
        if w[0] < 0:
            return True, None
        return False, tuple(self.carrier[int(k)] for k in w)

    def to_dot(self, highlight=(), name="F"):
        return self.to_lattice().to_dot(
            [self.index(m) for m in highlight], name=name
        )


def alx_opens(p, cap=DEFAULT_CAP, show_progress=False):
    """Alexandrov topology of ``p``: all upper sets ordered by inclusion."""
    return FrameElems(p, upper_sets(p, cap, show_progress), name="alexandrov")


def down_sets(p, cap=DEFAULT_CAP, show_progress=False):
    return FrameElems(p, lower_sets(p, cap, show_progress), name="downsets")


class CoverRel:
    """
    Covering relation ``x ◁ U`` on a finite lattice.

    ``covers(x, U)`` receives an element index and a subset bitmask. An
    optional ``step(U)`` returns ``{x | x ◁ U}`` in one go.
    """

    def __init__(self, base, covers, step=None, name="cover"):
        self.base = base
        self.covers = covers
        self._step = step
        self.name = name

    def __repr__(self):
        return f"CoverRel({self.name}, n={self.base.n})"

    @property
    def poset(self):
        return self.base.poset

    def cover_set(self, mask):
        if self._step is not None:
            return self._step(mask)
        return reduce(
            lambda m, x: m | (1 << x),
            (x for x in range(self.base.n) if self.covers(x, mask)),
            0,
        )

    def is_closed(self, mask):
        return self.cover_set(mask) & ~mask == 0

    def closure(self, mask):
        """Iterate U ↦ ↓{x | x ◁ U} from ↓U up to its fixed point."""
        p = self.poset
        u = p.down_closure(mask)
        while True:
            v = p.down_closure(u | self.cover_set(u))
            if v == u:
                return u
            u = v

    def inclusion(self, x):
        return self.closure(self.poset.down_masks[x])

    @classmethod
    def membership(cls, l):
        """x ◁ U iff x ∈ ↓U."""
        up = l.poset.up_masks
        p = l.poset
        return cls(l, lambda x, u: up[x] & u != 0, step=p.down_closure, name="membership")

    @classmethod
    def join_cover(cls, l):
        """x ◁ U iff x ≤ ⋁U."""
        down = l.poset.down_masks
        return cls(
            l,
            lambda x, u: l.le(x, l.join_mask(u)),
            step=lambda u: down[l.join_mask(u)],
            name="join",
        )

    @classmethod
    def bounded_membership(cls, l):
        """
        Membership plus the two covers every bounded lattice carries:
        ``0 ◁ ∅``, and the top covered by the rest of the lattice when
        that join is distributive.
        """
        p = l.poset
        up = p.up_masks
        rest = p.full_mask & ~(1 << l.top)
        top_rule = l.n > 1 and l.join_mask(rest) == l.top and l.is_distributive_join(rest)

        def covers(x, u):
            if x == l.bot or up[x] & u:
                return True
            return bool(x == l.top and top_rule and p.down_closure(u) & rest == rest)

        return cls(l, covers, name="bounded-membership")

    @classmethod
    def distributive_join_cover(cls, l):
        """x ◁ U iff ↓x ∩ ↓U has join x and that join is distributive."""
        p = l.poset

        def covers(x, u):
            d = p.down_masks[x] & p.down_closure(u)
            return l.join_mask(d) == x and l.is_distributive_join(d)

        return cls(l, covers, name="distributive-join")


def _subsets_upto(n, max_size):
    for size in range(max_size + 1):
        for combo in itertools.combinations(range(n), size):
            yield reduce(lambda m, i: m | (1 << i), combo, 0)


def _pairwise_meets(l, u, v):
    out = 0
    for a in bits(u):
        for b in bits(v):
            out |= 1 << l.meet(a, b)
    return out


def validate_cover(
    c,
    max_size=2,
    exhaustive_limit=12,
    samples=200,
    max_pairs=1 << 16,
    seed=0,
    show_progress=False,
):
    """
    Check the covering axioms on every subset of a base with at most
    ``exhaustive_limit`` elements. Larger bases are checked on ``samples``
    random subsets of size ``<= max_size``.

    (a) x ∈ U ⟹ x ◁ U
    (b) x ◁ U and U ◁ V ⟹ x ◁ V
    (c) x ◁ U ⟹ x ∧ y ◁ U
    (d) x ∈ U, x ∈ V ⟹ x ◁ U ∧ V

    Pairs ``(U, V)`` for (b) and (d) are enumerated in full up to
    ``max_pairs`` of them and sampled beyond.

    Returns
    -------
    CoverReport
        ``passed`` flag, number of checks and up to 20 ``(axiom, witness)``
        failures.
    """
    l = c.base
    n = l.n
    rng = np.random.default_rng(seed)
    if n <= exhaustive_limit:
        subsets = list(_subsets_upto(n, n))
    else:
        subsets = [0] + [
            reduce(
                lambda m, i: m | (1 << int(i)),
                rng.choice(n, size=int(rng.integers(1, max_size + 1)), replace=False),
                0,
            )
            for _ in range(samples)
        ]
    cov = np.zeros((len(subsets), n), dtype=bool)
    for k, u in enumerate(tqdm(subsets, desc="cover table", disable=not show_progress)):
        for x in range(n):
            cov[k, x] = c.covers(x, u)

    failures = []
    checked = 0

    def fail(axiom, witness):
        if len(failures) < 20:
            failures.append((axiom, witness))

    for k, u in enumerate(subsets):
        for x in bits(u):
            checked += 1
            cov[k, x] or fail("a", (x, u))
        for x in np.nonzero(cov[k])[0]:
            for y in range(n):
                checked += 1
                cov[k, l.meet(int(x), y)] or fail("c", (int(x), y, u))

    pairs = itertools.product(range(len(subsets)), repeat=2)
    if len(subsets) ** 2 > max_pairs:
        pairs = (
            (int(a), int(b))
            for a, b in rng.integers(0, len(subsets), size=(max_pairs, 2))
        )
    for ku, kv in pairs:
        u, v = subsets[ku], subsets[kv]
        if all(cov[kv, y] for y in bits(u)):
            for x in np.nonzero(cov[ku])[0]:
                checked += 1
                cov[kv, x] or fail("b", (int(x), u, v))
        common = u & v
        if common:
            uv = _pairwise_meets(l, u, v)
            for x in bits(common):
                checked += 1
                c.covers(x, uv) or fail("d", (x, u, v))
    return CoverReport(len(failures) == 0, checked, tuple(failures))


def free_frame(c, cap=DEFAULT_CAP, check=None, show_progress=False):
    """
    Frame of closed downsets ``{U | x ◁ U ⟹ x ∈ U}`` generated by ``c``.

    ``check`` runs ``validate_cover`` first (default: when the base has at
    most 12 elements).
    """
    if check is None:
        check = c.base.n <= 12
    if check:
        report = validate_cover(c)
        report.passed or _raise(
            ValueError(f"not a covering relation: {report.failures[:3]}")
        )
    closed = [
        u for u in lower_sets(c.poset, cap, show_progress) if c.is_closed(u)
    ]
    return FrameElems(c.poset, _canonical(closed), closure=c.closure, name=f"free({c.name})")


def ideal_masks(l, cap=DEFAULT_CAP):
    """Nonempty lower sets closed under binary joins."""
    out = []
    for u in lower_sets(l.poset, cap):
        members = bits(u)
        if members and all(u >> l.join(a, b) & 1 for a in members for b in members):
            out.append(u)
    return out


def _mask_lattice(l, masks):
    return FrameElems(l.poset, masks).to_lattice()


def ideals(l, cap=DEFAULT_CAP):
    return _mask_lattice(l, ideal_masks(l, cap))


def regular_ideals(l, cap=DEFAULT_CAP):
    """Ideals I containing every x all of whose well-inside elements lie in I."""
    below = [
        reduce(lambda m, y: m | (1 << y), (y for y in range(l.n) if well_inside(l, y, x)), 0)
        for x in range(l.n)
    ]
    regular = [
        u
        for u in ideal_masks(l, cap)
        if all(u >> x & 1 for x in range(l.n) if below[x] & ~u == 0)
    ]
    return _mask_lattice(l, regular)


def distributive_ideals(l, covers="distributive", cap=DEFAULT_CAP):
    """
    Bruns-Lakser completion of ``l`` as a frame of lower sets.

    ``covers="distributive"`` closes under every distributive join, so a
    distributive ``l`` gives back its ideals. ``covers="trivial"`` only
    closes under the covers every bounded lattice carries
    (``CoverRel.bounded_membership``), which is the count quoted for
    example X.
    """
    if covers == "trivial":
        c = CoverRel.bounded_membership(l)
    elif covers == "distributive":
        c = CoverRel.distributive_join_cover(l)
    else:
        raise ValueError(f"unknown cover policy '{covers}'")
    return free_frame(c, cap=cap, check=False)


class FrameMap:
    """Frame map ``U ↦ closure(⋃ f*(u))`` between two free frames."""

    def __init__(self, src_frame, dst_frame, f_star, dst_cover):
        self.src = src_frame
        self.dst = dst_frame
        self.f_star = f_star
        self.dst_cover = dst_cover

    def image_set(self, mask):
        return reduce(lambda m, u: m | self.f_star(u), bits(mask), 0)

    def __call__(self, mask):
        return self.dst_cover.closure(self.image_set(mask))

    def check(self):
        """Top, bottom, binary meets and binary joins, exhaustively."""
        failures = []
        src, dst = self.src, self.dst
        self(src.top) == dst.top or failures.append(("top", src.top))
        self(src.bot) == dst.bot or failures.append(("bot", src.bot))
        image = {u: self(u) for u in src}
        for u, v in itertools.combinations_with_replacement(src.carrier, 2):
            if image[src.meet(u, v)] != dst.meet(image[u], image[v]):
                failures.append(("meet", (u, v)))
            if image[src.join(u, v)] != dst.join(image[u], image[v]):
                failures.append(("join", (u, v)))
            if len(failures) >= 20:
                break
        return FrameMapReport(len(failures) == 0, tuple(failures))


def check_continuous(f_star, src, dst, max_size=None):
    """
    Raise ``NotContinuous`` unless ``f_star`` (element of ``src`` ↦ subset of
    ``dst``) satisfies: every element of dst is covered by ``f*(L)``;
    ``f*(x) ∧ f*(y) ◁ f*(x ∧ y)``; ``x ◁ U ⟹ f*(x) ◁ f*(U)``.
    """
    l, m = src.base, dst.base
    images = [f_star(x) for x in range(l.n)]

    def covered(a_mask, u_mask):
        return all(dst.covers(a, u_mask) for a in bits(a_mask))

    everything = reduce(lambda a, b: a | b, images, 0)
    for a in range(m.n):
        dst.covers(a, everything) or _raise(
            NotContinuous(f"{m.labels[a]} is not covered by f*(L)", axiom="a", witness=a)
        )
    for x, y in itertools.combinations_with_replacement(range(l.n), 2):
        both = _pairwise_meets(m, images[x], images[y])
        covered(both, images[l.meet(x, y)]) or _raise(
            NotContinuous(
                f"f*({l.labels[x]}) ∧ f*({l.labels[y]}) is not covered by f*(x ∧ y)",
                axiom="b",
                witness=(x, y),
            )
        )
    if max_size is None:
        max_size = l.n if l.n <= 10 else 2
    for u in _subsets_upto(l.n, max_size):
        fu = reduce(lambda acc, k: acc | images[k], bits(u), 0)
        for x in range(l.n):
            if src.covers(x, u) and not covered(images[x], fu):
                raise NotContinuous(
                    f"{l.labels[x]} ◁ U but f*(x) is not covered by f*(U)",
                    axiom="c",
                    witness=(x, u),
                )


def frame_morphism_from_continuous(f_star, src, dst, cap=DEFAULT_CAP, check=True):
    """
    Turn a continuous map, given by ``f_star`` from elements of ``src.base``
    to subsets of ``dst.base``, into the frame morphism between the free
    frames of the two covering relations.
    """
    if check:
        check_continuous(f_star, src, dst)
    return FrameMap(free_frame(src, cap, check=False), free_frame(dst, cap, check=False), f_star, dst)


def factor_through_inclusion(c, f, target, frame=None):
    """
    Factor a meet map ``f`` (base index ↦ index of the finite frame lattice
    ``target``) through the inclusion ``x ↦ closure(↓x)``: returns the frame
    and the map ``U ↦ ⋁ f(U)`` as a dict keyed by closed sets.
    """
    frame = free_frame(c, check=False) if frame is None else frame
    g = {u: target.join_all(f[x] for x in bits(u)) for u in frame}
    return frame, g


def check_universal_property(c, f, target, frame=None):
    """
    Verify that ``f`` factors through the inclusion as a frame map.

    ``f`` must preserve finite meets and send covers to joins; the returned
    report lists the axioms that fail for the factorization.
    """
    l = c.base
    frame, g = factor_through_inclusion(c, f, target, frame)
    failures = []
    for x in range(l.n):
        g[c.inclusion(x)] == f[x] or failures.append(("inclusion", x))
        for y in range(l.n):
            if f[l.meet(x, y)] != target.meet(f[x], f[y]):
                failures.append(("meet-map", (x, y)))
    g[frame.top] == target.top or failures.append(("top", frame.top))
    g[frame.bot] == target.bot or failures.append(("bot", frame.bot))
    for u, v in itertools.combinations_with_replacement(frame.carrier, 2):
        g[u & v] == target.meet(g[u], g[v]) or failures.append(("meet", (u, v)))
        g[frame.join(u, v)] == target.join(g[u], g[v]) or failures.append(("join", (u, v)))
    for u in frame:
        # every closed set is the join of the inclusions of its members
        frame.join_all(c.inclusion(x) for x in bits(u)) == u or failures.append(
            ("generated", u)
        )
    return FrameMapReport(len(failures) == 0, tuple(failures[:20]))
