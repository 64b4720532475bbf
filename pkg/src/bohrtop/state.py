#!/usr/bin/env python3
"""
States on a matrix algebra, the probability measures they induce on the
projections of a context family, quasi-states rebuilt context by context,
the truth value of an elementary proposition, and the search for a
noncontextual {0, 1} valuation.
"""

import itertools
from collections import namedtuple
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy.linalg import eigvalsh
from tqdm import tqdm

from .cstar import Context, ContextPoset, MatrixAlg, Projection
from .dasein import compression_bounds, inner_mask, outer_mask
from .order import BoolAlg
from .utils import (
    TOL_EIG,
    TOL_TRUTH,
    AlgebraMismatch,
    InconsistentMeasure,
    NotHermitian,
    NotInContext,
    NotUpperSet,
    SchemaError,
    _raise,
    bits,
    matrix_from_json,
    matrix_to_json,
    rational_matrix,
)

MeasureReport = namedtuple("MeasureReport", ["passed", "additivity", "naturality"])
TruthValue = namedtuple("TruthValue", ["contexts", "names", "upper_set", "exact"])
KsResult = namedtuple("KsResult", ["assignment", "nodes"])
KsFamilyReport = namedtuple("KsFamilyReport", ["passed", "failures", "projections"])


class DensityState:
    """Positive, trace-one ``rho``; the state is a ↦ tr(rho a)."""

    def __init__(self, algebra, rho, tol=1e-9):
        rho = np.array(rho, dtype=complex)
        n = algebra.total_dim
        rho.shape == (n, n) or _raise(ValueError(f"expected a {n}x{n} density matrix"))
        algebra.contains(rho, tol) or _raise(ValueError("density matrix leaves the algebra"))
        np.max(np.abs(rho - rho.conj().T)) <= tol or _raise(
            NotHermitian("density matrix is not Hermitian")
        )
        rho = 0.5 * (rho + rho.conj().T)
        eigvalsh(rho)[0] >= -tol or _raise(ValueError("density matrix is not positive"))
        abs(np.trace(rho).real - 1) <= tol or _raise(ValueError("density matrix has trace != 1"))
        rho.flags.writeable = False
        self.algebra = algebra
        self.rho = rho

    @classmethod
    def pure(cls, vector, algebra=None):
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        algebra = MatrixAlg.full(len(v)) if algebra is None else algebra
        return cls(algebra, np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, algebra):
        n = algebra.total_dim
        return cls(algebra, np.eye(n) / n)

    def __repr__(self):
        return f"DensityState({self.algebra!r})"

    def to_json(self):
        return {"algebra": self.algebra.to_json(), "matrix": matrix_to_json(self.rho)}

    @classmethod
    def from_json(cls, data, path="$"):
        isinstance(data, dict) and "matrix" in data or _raise(
            SchemaError("state must carry 'matrix'", path)
        )
        rho = matrix_from_json(data["matrix"], f"{path}.matrix")
        algebra = (
            MatrixAlg.from_json(data["algebra"], f"{path}.algebra")
            if "algebra" in data
            else MatrixAlg.full(rho.shape[0])
        )
        try:
            return cls(algebra, rho)
        except (ValueError, NotHermitian) as err:
            raise SchemaError(str(err), f"{path}.matrix")


def random_state(rng, algebra, rank=None):
    n = algebra.total_dim
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    rho[~algebra.block_mask] = 0
    return DensityState(algebra, rho / np.trace(rho).real)


def expectation(s, a):
    """tr(rho a) for a self-adjoint ``a``."""
    s.algebra == a.algebra or _raise(AlgebraMismatch("state and observable differ"))
    value = np.trace(s.rho @ a.matrix)
    abs(value.imag) <= 1e-9 or _raise(
        NotHermitian(f"expectation has imaginary part {value.imag:.3g}")
    )
    return float(value.real)


def _proj_id(poset, k, mask):
    return f"{poset.names[k]}:{BoolAlg.label(mask)}"


def shared_projections(poset):
    """
    ``(i, m, j, n)`` whenever the projection with atoms ``m`` of context i
    equals the one with atoms ``n`` of context j (i < j, m neither 0 nor 1).
    """
    out = []
    for i, j in itertools.combinations(range(len(poset)), 2):
        ci, cj = poset.contexts[i], poset.contexts[j]
        for m in range(1, ci.full):
            n = cj.try_coordinates(ci.projection(m))
            if n is not None:
                out.append((i, m, j, n))
    return out


class ProjMeasure:
    """
    Values on the projections of every context of a poset, keyed by
    ``(context index, atom mask)``.
    """

    def __init__(self, poset, values):
        self.poset = poset
        self.values = dict(values)
        for k, c in enumerate(poset.contexts):
            for m in range(c.full + 1):
                (k, m) in self.values or _raise(
                    ValueError(f"no value for {_proj_id(poset, k, m)}")
                )

    @classmethod
    def from_atoms(cls, poset, atom_values):
        """Extend per-context atom values additively."""
        values = {}
        for k, c in enumerate(poset.contexts):
            row = atom_values[k]
            len(row) == len(c) or _raise(ValueError("one value per atom expected"))
            for m in range(c.full + 1):
                values[(k, m)] = float(sum(row[a] for a in bits(m)))
        return cls(poset, values)

    def __call__(self, k, mask):
        return self.values[(k, mask)]

    def validate(self, tol=1e-9):
        """Normalization and additivity per context; naturality across contexts."""
        additivity = []
        for k, c in enumerate(self.poset.contexts):
            abs(self(k, 0)) <= tol or additivity.append((k, 0))
            abs(self(k, c.full) - 1) <= tol or additivity.append((k, c.full))
            for m in range(c.full + 1):
                v = self(k, m)
                if v < -tol or v > 1 + tol:
                    additivity.append((k, m))
                elif abs(v - sum(self(k, 1 << a) for a in bits(m))) > tol:
                    additivity.append((k, m))
        naturality = [
            (i, m, j, n)
            for i, m, j, n in shared_projections(self.poset)
            if abs(self(i, m) - self(j, n)) > tol
        ]
        return MeasureReport(
            not additivity and not naturality, tuple(additivity), tuple(naturality)
        )

    def to_json(self):
        return {
            "values": [
                {"projection": _proj_id(self.poset, k, m), "p": v}
                for (k, m), v in sorted(self.values.items())
            ]
        }

    @classmethod
    def from_json(cls, data, poset, path="$"):
        isinstance(data, dict) and isinstance(data.get("values"), list) or _raise(
            SchemaError("measure must carry a 'values' list", path)
        )
        ids = {
            _proj_id(poset, k, m): (k, m)
            for k, c in enumerate(poset.contexts)
            for m in range(c.full + 1)
        }
        values = {}
        for e, entry in enumerate(data["values"]):
            p = f"{path}.values[{e}]"
            isinstance(entry, dict) and entry.get("projection") in ids or _raise(
                SchemaError("unknown projection id", p)
            )
            isinstance(entry.get("p"), (int, float)) or _raise(
                SchemaError("'p' must be a number", p)
            )
            values[ids[entry["projection"]]] = float(entry["p"])
        try:
            return cls(poset, values)
        except ValueError as err:
            raise SchemaError(str(err), path)


def measure_from_state(s, fam):
    """μ(p) = tr(rho p) for every projection of every context of ``fam``."""
    values = {}
    for k, c in enumerate(fam.contexts):
        atoms = [expectation(s, p) for p in c.atoms]
        for m in range(c.full + 1):
            values[(k, m)] = float(sum(atoms[a] for a in bits(m)))
    return ProjMeasure(fam, values)


class QuasiState:
    """
    Functional that is linear on each context algebra:
    ρ_C(Σ λ_i p_i) = Σ λ_i μ(p_i).
    """

    def __init__(self, measure):
        self.measure = measure
        self.poset = measure.poset

    def on(self, k, a):
        c = self.poset.contexts[k]
        values = c.values(a)
        return float(sum(v * self.measure(k, 1 << i) for i, v in enumerate(values)))

    def __call__(self, a):
        for k, c in enumerate(self.poset.contexts):
            if c.contains(a):
                return self.on(k, a)
        raise NotInContext("observable lies in no context of the family")


def quasistate_from_measure(m, fam=None, tol=1e-9):
    """Per-context functionals of a measure; InconsistentMeasure when overlaps disagree."""
    fam is None or fam is m.poset or _raise(ValueError("measure lives on another family"))
    report = m.validate(tol)
    if report.additivity:
        k, mask = report.additivity[0]
        raise InconsistentMeasure(
            f"measure is not additive at {_proj_id(m.poset, k, mask)}", overlap=(k, mask)
        )
    if report.naturality:
        i, mi, j, mj = report.naturality[0]
        raise InconsistentMeasure(
            f"{_proj_id(m.poset, i, mi)} and {_proj_id(m.poset, j, mj)} "
            "are the same projection with different values",
            overlap=report.naturality[0],
        )
    return QuasiState(m)


def valuation_from_functional(functional, c, a):
    """
    μ(D_a) = sup_n I(n a⁺ ∧ 1), which in finite dimension is I applied to
    the support projection of a⁺.
    """
    values = c.values(a)
    mask = reduce(lambda m, k: m | (1 << k), (k for k, v in enumerate(values) if v > 0), 0)
    return functional(c.projection(mask))


def valuation_sweep(functional, c, a, n):
    """I(n a⁺ ∧ 1) for a single n."""
    values = c.values(a)
    return functional(c.element([min(n * max(v, 0.0), 1.0) for v in values]))


def exact_expectation(s, p):
    """
    tr(rho p) in rational arithmetic, or None unless both matrices have
    small-denominator rational entries.
    """
    s.algebra == p.algebra or _raise(AlgebraMismatch("state and projection differ"))
    rho, m = rational_matrix(s.rho), rational_matrix(p.matrix)
    if rho is None or m is None:
        return None
    n = len(rho)
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            (a, b), (c, d) = rho[i][j], m[j][i]
            total += a * c - b * d
    return total


def _certain(s, p, tol_truth, exact):
    if exact:
        value = exact_expectation(s, p)
        if value is not None:
            return value == 1, True
    return expectation(s, p) >= 1 - tol_truth, False


def truth_value(s, a, iv, fam, tol_truth=TOL_TRUTH, tol_eig=TOL_EIG, exact=True):
    """
    Contexts at which the state gives probability one to both the inner
    support at q and the outer support at r.

    With ``exact`` the probabilities of rational states and supports are
    compared to 1 in rational arithmetic; ``TruthValue.exact`` tells whether
    every comparison went that way.
    """
    keep = []
    all_exact = True
    for k, c in enumerate(fam.contexts):
        bounds = compression_bounds(a, c)
        inner = c.projection(inner_mask(a, iv.q, c, tol_eig, bounds))
        outer = c.projection(outer_mask(a, iv.r, c, tol_eig, bounds))
        held = True
        for p in (inner, outer):
            ok, was_exact = _certain(s, p, tol_truth, exact)
            all_exact = all_exact and was_exact
            held = held and ok
        if held:
            keep.append(k)
    mask = reduce(lambda m, k: m | (1 << k), keep, 0)
    if not fam.poset.is_upper(mask):
        missing = fam.poset.up_closure(mask) & ~mask
        raise NotUpperSet(
            "truth value is not an upper set of contexts; check tol_truth",
            witness=[fam.names[k] for k in bits(missing)],
        )
    return TruthValue(tuple(keep), tuple(fam.names[k] for k in keep), True, all_exact)


class KsAssignment:
    """The atom valued 1 in every context."""

    def __init__(self, poset, chosen):
        self.poset = poset
        self.chosen = tuple(chosen)

    def __repr__(self):
        return f"KsAssignment({self.as_dict()})"

    def as_dict(self):
        return dict(zip(self.poset.names, self.chosen))

    def value(self, k, mask):
        return bool(mask >> self.chosen[k] & 1)

    def is_consistent(self, shared=None):
        shared = shared_projections(self.poset) if shared is None else shared
        return all(self.value(i, m) == self.value(j, n) for i, m, j, n in shared)

    def to_json(self):
        return {"assignment": self.as_dict()}


def ks_search(fam, show_progress=False):
    """
    Backtracking search for a noncontextual valuation: one atom per context
    valued 1, equal values on every projection shared by two contexts.

    Contexts are tried in order of decreasing number of shared projections,
    atoms in index order; the first assignment found is returned. On failure
    ``assignment`` is None and ``nodes`` counts the partial assignments
    explored.
    """
    shared = shared_projections(fam)
    degree = [0] * len(fam)
    for i, _, j, _ in shared:
        degree[i] += 1
        degree[j] += 1
    order = sorted(range(len(fam)), key=lambda k: (-degree[k], k))
    position = {k: p for p, k in enumerate(order)}
    checks = [[] for _ in order]
    for i, m, j, n in shared:
        later, earlier = (i, j) if position[i] > position[j] else (j, i)
        mask_later, mask_earlier = (m, n) if later == i else (n, m)
        checks[position[later]].append((later, mask_later, earlier, mask_earlier))

    chosen = [None] * len(fam)
    nodes = 0
    pbar = tqdm(desc="KS search", disable=not show_progress)

    def descend(p):
        nonlocal nodes
        if p == len(order):
            return True
        k = order[p]
        for atom in range(len(fam.contexts[k])):
            nodes += 1
            pbar.update(1)
            chosen[k] = atom
            if all(
                bool(mk >> atom & 1) == bool(me >> chosen[e] & 1)
                for _, mk, e, me in checks[p]
            ):
                if descend(p + 1):
                    return True
        chosen[k] = None
        return False

    try:
        found = descend(0)
    finally:
        pbar.close()
    return KsResult(KsAssignment(fam, chosen) if found else None, nodes)


_CABELLO_CONTEXTS = (
    ((0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0), (1, -1, 0, 0)),
    ((0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, -1, 0)),
    ((1, -1, 1, -1), (1, -1, -1, 1), (1, 1, 0, 0), (0, 0, 1, 1)),
    ((1, -1, 1, -1), (1, 1, 1, 1), (1, 0, -1, 0), (0, 1, 0, -1)),
    ((0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 0, -1)),
    ((1, -1, -1, 1), (1, 1, 1, 1), (1, 0, 0, -1), (0, 1, -1, 0)),
    ((1, 1, -1, 1), (1, 1, 1, -1), (1, -1, 0, 0), (0, 0, 1, 1)),
    ((1, 1, -1, 1), (-1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, -1)),
    ((1, 1, 1, -1), (-1, 1, 1, 1), (1, 0, 0, 1), (0, 1, -1, 0)),
)


def cabello_family():
    """
    Eighteen rank-one projections of C^4 in nine orthogonal bases, each
    projection in exactly two bases; no noncontextual valuation exists
    (every valuation would mark an odd number of projections twice).
    """
    alg = MatrixAlg.full(4)
    contexts = [
        Context(alg, [Projection.from_vector(alg, v).matrix for v in basis], name=f"K{k + 1}")
        for k, basis in enumerate(_CABELLO_CONTEXTS)
    ]
    return ContextPoset(contexts, closure="none")


def validate_ks_family(fam, rank=1, occurrences=2):
    """
    Every atom of a nontrivial context has the given rank, and every such
    projection occurs in exactly ``occurrences`` contexts.
    """
    failures = []
    seen = []
    for k, c in enumerate(fam.contexts):
        if len(c) == 1:
            continue
        for a, p in enumerate(c.atoms):
            p.rank() == rank or failures.append(("rank", fam.names[k], a))
            for entry in seen:
                if entry[0].same(p):
                    entry[1].append(k)
                    break
            else:
                seen.append((p, [k]))
    for p, where in seen:
        if len(where) != occurrences:
            failures.append(("occurrences", tuple(fam.names[k] for k in where)))
    return KsFamilyReport(not failures, tuple(failures), len(seen))
