#!/usr/bin/env python3
"""
Daseinisation of self-adjoint elements: for a rational interval (q, r)
and a context C, the largest projection of C on which every admissible
approximation from below exceeds q, met with its dual from above.
"""

import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
from scipy.linalg import eigvalsh, orth
from tqdm import tqdm

from .bohr import BohrOpen
from .cstar import HermObs, context_from_obs
from .oml import MonoHeyting
from .order import BoolAlg, CoverRel, FinLattice, FinPoset, frame_morphism_from_continuous
from .utils import (
    GRID_STEP,
    TOL_EIG,
    IncompatibleAlgebras,
    MissingGeneratedContext,
    NotHermitian,
    SchemaError,
    _raise,
    parse_rational,
)

OrderReport = namedtuple("OrderReport", ["passed", "le", "failures", "coincide"])
DaseinPush = namedtuple("DaseinPush", ["open", "maps"])


class RatInterval:
    """Open interval (q, r) with exact rational endpoints, q < r."""

    def __init__(self, q, r):
        q, r = Fraction(q), Fraction(r)
        q < r or _raise(ValueError(f"empty interval ({q}, {r})"))
        self.q = q
        self.r = r

    @classmethod
    def parse(cls, q, r, path="$"):
        q, r = parse_rational(q, f"{path}.q"), parse_rational(r, f"{path}.r")
        q < r or _raise(SchemaError(f"need q < r, got ({q}, {r})", path))
        return cls(q, r)

    def __repr__(self):
        return f"RatInterval({self.q}, {self.r})"

    def __eq__(self, other):
        return isinstance(other, RatInterval) and (self.q, self.r) == (other.q, other.r)

    def __hash__(self):
        return hash((self.q, self.r))

    def __contains__(self, value):
        return self.q < value < self.r

    def within(self, other):
        return other.q <= self.q and self.r <= other.r

    def to_json(self):
        return {"q": str(self.q), "r": str(self.r)}


def _check_obs(a, c):
    isinstance(a, HermObs) or _raise(NotHermitian(f"expected a HermObs, got {type(a).__name__}"))
    a.algebra == c.algebra or _raise(IncompatibleAlgebras("observable and context differ"))


def compression_bounds(a, c):
    """``(λ_min, λ_max)`` of p a p on the range of p, for every atom p of c."""
    _check_obs(a, c)
    out = []
    for p in c.atoms:
        v = orth(p.matrix)
        w = eigvalsh(v.conj().T @ a.matrix @ v)
        out.append((float(w[0]), float(w[-1])))
    return out


def inner_mask(a, q, c, tol_eig=TOL_EIG, bounds=None):
    bounds = compression_bounds(a, c) if bounds is None else bounds
    q = float(q)
    return sum(1 << k for k, (lo, _) in enumerate(bounds) if lo > q + tol_eig)


def outer_mask(a, r, c, tol_eig=TOL_EIG, bounds=None):
    bounds = compression_bounds(a, c) if bounds is None else bounds
    r = float(r)
    return sum(1 << k for k, (_, hi) in enumerate(bounds) if hi < r - tol_eig)


def inner_support(a, q, c, tol_eig=TOL_EIG):
    """
    ⋁{[f - q > 0] | f in C_sa, f <= a}: the atoms p of c whose compression
    p a p has least eigenvalue strictly above q. Values within ``tol_eig``
    of q count as not above.
    """
    return c.projection(inner_mask(a, q, c, tol_eig))


def outer_support(a, r, c, tol_eig=TOL_EIG):
    """⋁{[r - g > 0] | g in C_sa, a <= g}: atoms whose compression stays below r."""
    return c.projection(outer_mask(a, r, c, tol_eig))


def _context_mask(a, iv, c, tol_eig):
    bounds = compression_bounds(a, c)
    return inner_mask(a, iv.q, c, tol_eig, bounds) & outer_mask(a, iv.r, c, tol_eig, bounds)


def dasein_open(a, iv, poset, tol_eig=TOL_EIG, n_workers=None):
    """
    Daseinisation of ``a`` at ``iv``: C ↦ inner(a, q, C) ∧ outer(a, r, C).

    ``n_workers`` > 1 evaluates the contexts in a thread pool.
    """
    if n_workers is not None and n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as executor:
            futures = [
                executor.submit(_context_mask, a, iv, c, tol_eig) for c in poset.contexts
            ]
            masks = [future.result() for future in futures]
    else:
        masks = [_context_mask(a, iv, c, tol_eig) for c in poset.contexts]
    out = BohrOpen(poset, masks, check=False)
    assert MonoHeyting(poset.family).is_section(out.masks)
    return out


def rational_grid(lo, hi, step=GRID_STEP):
    """Multiples of ``step`` from floor(lo) - 1 to ceil(hi) + 1."""
    step = Fraction(step)
    start = Fraction(math.floor(lo) - 1)
    stop = Fraction(math.ceil(hi) + 1)
    count = int((stop - start) / step)
    return [start + k * step for k in range(count + 1)]


def _spectrum(a):
    w = eigvalsh(a.matrix)
    return float(w[0]), float(w[-1])


def dasein_order_check(
    a, b, poset, grid_step=GRID_STEP, tol_eig=TOL_EIG, show_progress=False
):
    """
    Finite fragments of "a <= b iff δ(a) <= δ(b)" over the stored contexts.

    When b - a is positive, inner supports of a lie below those of b and
    outer supports of b lie below those of a, at every context and every
    grid rational. When every support coincides at the contexts generated
    by a and by b, the compression of b - a onto each atom of those two
    contexts has spectrum within one grid step (plus 2 tol_eig) of 0.

    The last fragment bounds per-atom compressions, not ``||a - b||``:
    coinciding grid supports leave the off-diagonal blocks free, so a
    small rotation of a can have norm distance above the grid step.
    """
    ca, cb = context_from_obs(a), context_from_obs(b)
    ka, kb = poset.find(ca), poset.find(cb)
    ka is not None or _raise(MissingGeneratedContext("C*(a) is not in the poset"))
    kb is not None or _raise(MissingGeneratedContext("C*(b) is not in the poset"))
    le = bool(eigvalsh(b.matrix - a.matrix)[0] >= -tol_eig)
    lo = min(_spectrum(a)[0], _spectrum(b)[0])
    hi = max(_spectrum(a)[1], _spectrum(b)[1])
    grid = rational_grid(lo, hi, grid_step)
    failures = []
    if le:
        for k, c in enumerate(
            tqdm(poset.contexts, desc="order check", disable=not show_progress)
        ):
            ba, bb = compression_bounds(a, c), compression_bounds(b, c)
            for q in grid:
                if inner_mask(a, q, c, tol_eig, ba) & ~inner_mask(b, q, c, tol_eig, bb):
                    failures.append(("inner", poset.names[k], q))
                if outer_mask(b, q, c, tol_eig, bb) & ~outer_mask(a, q, c, tol_eig, ba):
                    failures.append(("outer", poset.names[k], q))

    coincide = True
    for k in (ka, kb):
        c = poset.contexts[k]
        ba, bb = compression_bounds(a, c), compression_bounds(b, c)
        for q in grid:
            if inner_mask(a, q, c, tol_eig, ba) != inner_mask(b, q, c, tol_eig, bb):
                coincide = False
            if outer_mask(a, q, c, tol_eig, ba) != outer_mask(b, q, c, tol_eig, bb):
                coincide = False
    if coincide:
        bound = float(grid_step) + 2 * tol_eig
        for k in (ka, kb):
            c = poset.contexts[k]
            d = b - a
            for lo_d, hi_d in compression_bounds(d, c):
                if max(abs(lo_d), abs(hi_d)) >= bound:
                    failures.append(("injectivity", poset.names[k], max(abs(lo_d), abs(hi_d))))
    return OrderReport(len(failures) == 0, le, tuple(failures), coincide)


def _positive_on(a, c, mu, targets):
    """a - Σ mu_t p_t is positive definite on the range of the target atoms."""
    p = sum(c.atoms[t].matrix for t in targets)
    v = orth(p)
    f = sum(mu[t] * c.atoms[t].matrix for t in targets)
    return eigvalsh(v.conj().T @ (a.matrix - f) @ v)[0] > 0


def _shift_others(a, c, mu, targets):
    """Push the non-target values down by doubling shifts until ``f <= a``."""
    others = [k for k in range(len(c)) if k not in targets]
    shift = 0.0 if not others else 1.0
    for _ in range(64):
        values = [m - (shift if k in others else 0.0) for k, m in enumerate(mu)]
        f = c.element(values)
        if eigvalsh(a.matrix - f.matrix)[0] >= -1e-12:
            return f
        if not others:
            break
        shift *= 2
    raise RuntimeError("no admissible element found")


def admissible_below(a, c, rng, scale=1.0):
    """
    A random f in C_sa with f <= a.

    Every atom gets a value strictly below its compression minimum. A random
    set of target atoms, on whose joint range a - f stays positive, keeps
    those values; the others are pushed down until a - f is positive.
    """
    _check_obs(a, c)
    bounds = compression_bounds(a, c)
    k = len(c)
    xi = np.abs(rng.standard_normal(k)) * scale + 1e-6
    mu = [lo - x for (lo, _), x in zip(bounds, xi)]
    targets = []
    for t in rng.permutation(k):
        if rng.random() < 0.5 and targets:
            continue
        if _positive_on(a, c, mu, targets + [int(t)]):
            targets.append(int(t))
    return _shift_others(a, c, mu, targets)


def admissible_above(a, c, rng, scale=1.0):
    """A random g in C_sa with a <= g."""
    return -admissible_below(-a, c, rng, scale)


def _interval_lattice(points):
    """Intervals (g_i, g_j) of ``points`` under inclusion, with the empty interval at 0."""
    pairs = [(i, j) for i in range(len(points)) for j in range(i + 1, len(points))]
    n = len(pairs) + 1
    leq = np.zeros((n, n), dtype=bool)
    leq[0, :] = True
    for x, (i, j) in enumerate(pairs, start=1):
        for y, (k, m) in enumerate(pairs, start=1):
            leq[x, y] = k <= i and j <= m
    labels = ["()"] + [f"({points[i]},{points[j]})" for i, j in pairs]
    return FinLattice(FinPoset(leq, labels)), pairs


def dasein_push(a, iv, poset, tol_eig=TOL_EIG, check=True):
    """
    Daseinisation as a continuous map, context by context.

    Rational intervals over a small grid containing q, r and the spectrum
    of a carry the membership cover; each Proj(C) carries the join cover.
    ``(q, r) ↦ {inner(q) ∧ outer(r)}`` is continuous, and the image of ↓iv
    under the induced frame map is the principal downset of the value at C.
    """
    lo, hi = _spectrum(a)
    points = sorted({Fraction(math.floor(lo) - 1), iv.q, iv.r, Fraction(math.ceil(hi) + 1)})
    lattice, pairs = _interval_lattice(points)
    src = CoverRel.membership(lattice)
    x = 1 + pairs.index((points.index(iv.q), points.index(iv.r)))
    masks, maps = [], []
    for c in poset.contexts:
        bounds = compression_bounds(a, c)
        values = [0] + [
            inner_mask(a, points[i], c, tol_eig, bounds)
            & outer_mask(a, points[j], c, tol_eig, bounds)
            for i, j in pairs
        ]
        target = BoolAlg(len(c)).to_lattice()
        dst = CoverRel.join_cover(target)
        fmap = frame_morphism_from_continuous(
            lambda e, values=values: 1 << values[e], src, dst, check=check
        )
        image = fmap(lattice.poset.down_masks[x])
        masks.append(target.join_mask(image))
        maps.append(fmap)
    return DaseinPush(BohrOpen(poset, masks), tuple(maps))
