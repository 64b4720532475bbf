#!/usr/bin/env python3
"""
Finite-dimensional C*-algebras as block-diagonal matrix algebras, their
commutative contexts and the poset of contexts ordered by refinement.
"""

import itertools
import warnings
from functools import cached_property, reduce

import numpy as np
from scipy.linalg import eigh, qr, svd

from .oml import BlockFamily
from .order import BoolAlg, FinPoset, ideal_masks, FrameElems
from .utils import (
    TOL_CLUSTER,
    TOL_EIG,
    TOL_HERM,
    TOL_PROJ,
    TOL_RANK,
    DegenerateIntersection,
    IncompatibleAlgebras,
    NotHermitian,
    NotInContext,
    NotOnSphere,
    NotProjection,
    SchemaError,
    _raise,
    bits,
    matrix_from_json,
    matrix_to_json,
)

CLOSURE_POLICIES = ("none", "meets")


class MatrixAlg:
    """The algebra ⊕ M_{n_i}(ℂ) of block-diagonal matrices."""

    def __init__(self, block_dims):
        dims = tuple(int(d) for d in block_dims)
        len(dims) > 0 or _raise(ValueError("block_dims must be nonempty"))
        all(d >= 1 for d in dims) or _raise(ValueError("block dimensions must be >= 1"))
        self.block_dims = dims
        self.total_dim = sum(dims)

    @classmethod
    def full(cls, n):
        return cls([n])

    @classmethod
    def diagonal(cls, n):
        return cls([1] * n)

    def __eq__(self, other):
        return isinstance(other, MatrixAlg) and self.block_dims == other.block_dims

    def __hash__(self):
        return hash(self.block_dims)

    def __repr__(self):
        return f"MatrixAlg({list(self.block_dims)})"

    @cached_property
    def slices(self):
        starts = np.cumsum((0,) + self.block_dims)
        return tuple(slice(int(a), int(b)) for a, b in zip(starts[:-1], starts[1:]))

    @cached_property
    def block_mask(self):
        mask = np.zeros((self.total_dim, self.total_dim), dtype=bool)
        for s in self.slices:
            mask[s, s] = True
        return mask

    def identity(self):
        return np.eye(self.total_dim, dtype=complex)

    def contains(self, m, tol=TOL_HERM):
        m = np.asarray(m)
        if m.shape != (self.total_dim, self.total_dim):
            return False
        return bool(np.all(np.abs(m[~self.block_mask]) <= tol))

    def to_json(self):
        return {"blocks": list(self.block_dims)}

    @classmethod
    def from_json(cls, data, path="$"):
        isinstance(data, dict) and isinstance(data.get("blocks"), list) or _raise(
            SchemaError("algebra must be {'blocks': [n, ...]}", path)
        )
        dims = data["blocks"]
        all(isinstance(d, int) and d >= 1 for d in dims) and dims or _raise(
            SchemaError("block dimensions must be positive integers", f"{path}.blocks")
        )
        return cls(dims)


class HermObs:
    """Self-adjoint element of a MatrixAlg."""

    def __init__(self, algebra, matrix, tol_herm=TOL_HERM):
        m = np.array(matrix, dtype=complex)
        n = algebra.total_dim
        m.shape == (n, n) or _raise(
            NotHermitian(f"expected a {n}x{n} matrix, got shape {m.shape}")
        )
        algebra.contains(m, tol_herm) or _raise(
            NotHermitian("matrix does not respect the block structure")
        )
        err = np.max(np.abs(m - m.conj().T)) if n else 0.0
        err <= tol_herm or _raise(NotHermitian(f"matrix is not Hermitian (residual {err:.3g})"))
        m = 0.5 * (m + m.conj().T)
        m[~algebra.block_mask] = 0
        m.flags.writeable = False
        self.algebra = algebra
        self.matrix = m

    @classmethod
    def diag(cls, values, algebra=None):
        values = [float(v) for v in values]
        algebra = MatrixAlg.full(len(values)) if algebra is None else algebra
        return cls(algebra, np.diag(values))

    @property
    def dim(self):
        return self.algebra.total_dim

    def __repr__(self):
        return f"{type(self).__name__}({self.algebra!r})"

    def _wrap(self, m):
        return HermObs(self.algebra, m)

    def __add__(self, other):
        if isinstance(other, HermObs):
            return self._wrap(self.matrix + other.matrix)
        return self._wrap(self.matrix + float(other) * np.eye(self.dim))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, HermObs):
            return self._wrap(self.matrix - other.matrix)
        return self._wrap(self.matrix - float(other) * np.eye(self.dim))

    def __rsub__(self, other):
        return self._wrap(float(other) * np.eye(self.dim) - self.matrix)

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, scalar):
        return self._wrap(float(scalar) * self.matrix)

    __rmul__ = __mul__

    def product(self, other, tol_herm=1e-8):
        """``a b`` for commuting a, b (the product is then self-adjoint)."""
        return HermObs(self.algebra, self.matrix @ other.matrix, tol_herm=tol_herm)

    def commutes(self, other, tol=TOL_PROJ):
        m = self.matrix @ other.matrix - other.matrix @ self.matrix
        return bool(np.max(np.abs(m)) <= tol)

    def allclose(self, other, tol=TOL_PROJ):
        return bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)

    def to_json(self):
        return {"algebra": self.algebra.to_json(), "matrix": matrix_to_json(self.matrix)}

    @classmethod
    def from_json(cls, data, path="$"):
        isinstance(data, dict) and "matrix" in data or _raise(
            SchemaError("observable must carry 'matrix'", path)
        )
        m = matrix_from_json(data["matrix"], f"{path}.matrix")
        algebra = (
            MatrixAlg.from_json(data["algebra"], f"{path}.algebra")
            if "algebra" in data
            else MatrixAlg.full(m.shape[0])
        )
        return cls(algebra, m)


class Projection(HermObs):
    """Self-adjoint idempotent: p p = p within ``tol_proj``."""

    def __init__(self, algebra, matrix, tol_proj=TOL_PROJ):
        try:
            super().__init__(algebra, matrix, tol_herm=tol_proj)
        except NotHermitian as err:
            raise NotProjection(str(err))
        err = np.max(np.abs(self.matrix @ self.matrix - self.matrix))
        err <= tol_proj or _raise(NotProjection(f"p p != p (residual {err:.3g})"))

    @classmethod
    def zero(cls, algebra):
        return cls(algebra, np.zeros((algebra.total_dim,) * 2))

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, algebra.identity())

    @classmethod
    def from_vector(cls, algebra, vector):
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(algebra, np.outer(v, v.conj()))

    def rank(self):
        return int(round(float(np.trace(self.matrix).real)))

    def is_zero(self, tol=TOL_PROJ):
        return bool(np.max(np.abs(self.matrix)) <= tol) if self.dim else True

    def le(self, other, tol=TOL_PROJ):
        return bool(np.max(np.abs(self.matrix @ other.matrix - self.matrix)) <= tol)

    def same(self, other, tol=TOL_PROJ):
        return self.allclose(other, tol)


def _check_herm(a):
    isinstance(a, HermObs) or _raise(NotHermitian(f"expected a HermObs, got {type(a).__name__}"))


def herm_eig(a, tol_cluster=TOL_CLUSTER):
    """
    Spectral decomposition of a Hermitian element.

    Each block is diagonalized with ``scipy.linalg.eigh``; eigenvalues of
    all blocks closer than ``tol_cluster`` are merged into one spectral
    projection.

    Returns
    -------
    list of (float, Projection)
        Eigenvalues ascending with their spectral projections.
    """
    _check_herm(a)
    alg = a.algebra
    pieces = []
    for s in alg.slices:
        w, v = eigh(a.matrix[s, s])
        for k in range(len(w)):
            pieces.append((float(w[k]), s, v[:, k]))
    pieces.sort(key=lambda t: t[0])

    clusters = []
    for piece in pieces:
        if clusters and piece[0] - clusters[-1][-1][0] <= tol_cluster:
            clusters[-1].append(piece)
        else:
            if clusters and piece[0] - clusters[-1][-1][0] <= 10 * tol_cluster:
                warnings.warn(
                    f"eigenvalues {clusters[-1][-1][0]:.12g} and {piece[0]:.12g} "
                    "are barely separated"
                )
            clusters.append([piece])

    out = []
    n = alg.total_dim
    for cluster in clusters:
        m = np.zeros((n, n), dtype=complex)
        for _, s, vec in cluster:
            m[s, s] += np.outer(vec, vec.conj())
        value = float(np.mean([c[0] for c in cluster]))
        out.append((value, Projection(alg, m, tol_proj=1e-8)))
    return out


def _spectral_sum(a, keep, tol_cluster=TOL_CLUSTER):
    n = a.algebra.total_dim
    m = np.zeros((n, n), dtype=complex)
    for value, p in herm_eig(a, tol_cluster):
        if keep(value):
            m += p.matrix
    return Projection(a.algebra, m, tol_proj=1e-8)


def _near_threshold(value, tol_eig):
    if tol_eig < abs(value) <= 10 * tol_eig:
        warnings.warn(f"eigenvalue {value:.3g} is within 10x of the zero tolerance")


def proj_pos(a, tol_eig=TOL_EIG, tol_cluster=TOL_CLUSTER):
    """Support projection [a > 0]: eigenvalues strictly above ``tol_eig``."""

    def keep(value):
        _near_threshold(value, tol_eig)
        return value > tol_eig

    return _spectral_sum(a, keep, tol_cluster)


def proj_zero(a, tol_eig=TOL_EIG, tol_cluster=TOL_CLUSTER):
    """Kernel projection [a = 0]."""
    return _spectral_sum(a, lambda value: abs(value) <= tol_eig, tol_cluster)


def positive_part(a, tol_cluster=TOL_CLUSTER):
    n = a.algebra.total_dim
    m = np.zeros((n, n), dtype=complex)
    for value, p in herm_eig(a, tol_cluster):
        if value > 0:
            m += value * p.matrix
    return HermObs(a.algebra, m, tol_herm=1e-8)


class Context:
    """
    A commutative subalgebra given by its minimal projections: nonzero,
    mutually orthogonal and summing to the identity.
    """

    def __init__(self, algebra, atoms, name=None, tol_proj=TOL_PROJ):
        atoms = [
            p if isinstance(p, Projection) else Projection(algebra, p, tol_proj)
            for p in atoms
        ]
        len(atoms) > 0 or _raise(ValueError("a context needs at least one atom"))
        for k, p in enumerate(atoms):
            p.algebra == algebra or _raise(IncompatibleAlgebras("atom from another algebra"))
            float(np.trace(p.matrix).real) > 0.5 or _raise(
                NotProjection(f"atom {k} is zero")
            )
        for i, j in itertools.combinations(range(len(atoms)), 2):
            overlap = np.max(np.abs(atoms[i].matrix @ atoms[j].matrix))
            overlap <= tol_proj or _raise(
                NotProjection(f"atoms {i} and {j} are not orthogonal ({overlap:.3g})")
            )
        total = sum(p.matrix for p in atoms)
        err = np.max(np.abs(total - algebra.identity()))
        err <= tol_proj or _raise(NotProjection(f"atoms do not sum to 1 ({err:.3g})"))
        self.algebra = algebra
        self.atoms = tuple(atoms)
        self.name = name
        self.tol_proj = tol_proj

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return f"Context({self.name or '?'}, atoms={len(self.atoms)})"

    @property
    def full(self):
        return (1 << len(self.atoms)) - 1

    @cached_property
    def boolean(self):
        return BoolAlg(len(self.atoms))

    def projection(self, mask):
        n = self.algebra.total_dim
        m = np.zeros((n, n), dtype=complex)
        for k in bits(mask):
            m += self.atoms[k].matrix
        return Projection(self.algebra, m, tol_proj=1e-8)

    def projections(self):
        """Every element of Proj(C) as ``(mask, Projection)``."""
        return [(mask, self.projection(mask)) for mask in range(1 << len(self.atoms))]

    def coordinates(self, p, tol=None):
        """Mask of the atoms summing to ``p``; NotInContext if there is none."""
        tol = self.tol_proj if tol is None else tol
        mask = 0
        covered = 0.0
        pm = p.matrix
        for k, q in enumerate(self.atoms):
            size = float(np.trace(q.matrix).real)
            ratio = float(np.trace(pm @ q.matrix).real) / size
            if abs(ratio - 1) <= tol:
                mask |= 1 << k
                covered += size
            elif abs(ratio) > tol:
                raise NotInContext(f"projection cuts atom {k} (overlap {ratio:.3g})")
        abs(covered - float(np.trace(pm).real)) <= tol or _raise(
            NotInContext("projection is not a sum of atoms")
        )
        return mask

    def try_coordinates(self, p, tol=None):
        try:
            return self.coordinates(p, tol)
        except NotInContext:
            return None

    def values(self, a, tol=None):
        """Per-atom values λ_k with a = Σ λ_k p_k; NotInContext otherwise."""
        tol = self.tol_proj if tol is None else tol
        _check_herm(a)
        out = []
        for q in self.atoms:
            out.append(
                float(np.trace(a.matrix @ q.matrix).real) / float(np.trace(q.matrix).real)
            )
        rebuilt = sum(v * q.matrix for v, q in zip(out, self.atoms))
        err = np.max(np.abs(rebuilt - a.matrix))
        err <= max(tol, 1e-8) * max(1.0, np.max(np.abs(a.matrix))) or _raise(
            NotInContext(f"observable is not in the context algebra (residual {err:.3g})")
        )
        return out

    def contains(self, a, tol=None):
        try:
            self.values(a, tol)
            return True
        except NotInContext:
            return False

    def element(self, values):
        values = [float(v) for v in values]
        len(values) == len(self.atoms) or _raise(ValueError("one value per atom expected"))
        return HermObs(self.algebra, sum(v * q.matrix for v, q in zip(values, self.atoms)))

    def refinement_masks(self, finer):
        """Images of this context's atoms as atom masks of ``finer``."""
        return tuple(finer.coordinates(p) for p in self.atoms)

    def le(self, other):
        """Refinement order: every atom of self is a sum of atoms of other."""
        if len(self) > len(other):
            return False
        return all(other.try_coordinates(p) is not None for p in self.atoms)

    def same_as(self, other):
        return len(self) == len(other) and self.le(other)

    def partition(self, tol=None):
        """Index partition when every atom is diagonal, else None."""
        tol = self.tol_proj if tol is None else tol
        parts = []
        for q in self.atoms:
            m = q.matrix
            if np.max(np.abs(m - np.diag(np.diag(m)))) > tol:
                return None
            parts.append([int(k) for k in np.nonzero(np.abs(np.diag(m) - 1) <= tol)[0]])
        return parts

    def to_json(self):
        out = {"algebra": self.algebra.to_json()}
        if self.name is not None:
            out["name"] = self.name
        parts = self.partition()
        if parts is not None:
            out["partition"] = parts
        else:
            out["atoms"] = [matrix_to_json(p.matrix) for p in self.atoms]
        return out

    @classmethod
    def from_json(cls, data, algebra=None, path="$"):
        isinstance(data, dict) or _raise(SchemaError("context must be an object", path))
        if "algebra" in data:
            algebra = MatrixAlg.from_json(data["algebra"], f"{path}.algebra")
        name = data.get("name")
        if "bloch" in data:
            v = data["bloch"]
            isinstance(v, list) and len(v) == 3 or _raise(
                SchemaError("bloch must be [x, y, z]", f"{path}.bloch")
            )
            c = bloch_context(*v)
            c.name = name or c.name
            return c
        if "partition" in data:
            parts = data["partition"]
            isinstance(parts, list) or _raise(
                SchemaError("partition must be a list of index lists", f"{path}.partition")
            )
            n = sum(len(p) for p in parts)
            algebra = MatrixAlg.diagonal(n) if algebra is None else algebra
            sorted(i for p in parts for i in p) == list(range(algebra.total_dim)) or _raise(
                SchemaError("partition must cover every index once", f"{path}.partition")
            )
            return partition_context(parts, algebra, name=name)
        "atoms" in data or _raise(
            SchemaError("context needs 'atoms', 'partition' or 'bloch'", path)
        )
        mats = [
            matrix_from_json(m, f"{path}.atoms[{k}]") for k, m in enumerate(data["atoms"])
        ]
        mats or _raise(SchemaError("context needs at least one atom", f"{path}.atoms"))
        algebra = MatrixAlg.full(mats[0].shape[0]) if algebra is None else algebra
        return cls(algebra, mats, name=name)


def trivial_context(algebra):
    return Context(algebra, [algebra.identity()], name="trivial")


def context_from_obs(a, tol_cluster=TOL_CLUSTER):
    """Context of C*(a, 1): the spectral projections of a."""
    return Context(a.algebra, [p for _, p in herm_eig(a, tol_cluster)])


def bloch_projection(x, y, z):
    """(1 + x σ_x + y σ_y + z σ_z) / 2."""
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


def bloch_context(x, y, z, tol=1e-9, name=None):
    """The maximal context {p(v), p(-v)} of M_2 for a unit vector v."""
    x, y, z = float(x), float(y), float(z)
    abs(x * x + y * y + z * z - 1) <= tol or _raise(
        NotOnSphere(f"({x}, {y}, {z}) is not a unit vector")
    )
    alg = MatrixAlg.full(2)
    return Context(
        alg,
        [bloch_projection(x, y, z), bloch_projection(-x, -y, -z)],
        name=name or f"bloch({x:g},{y:g},{z:g})",
    )


def partition_context(parts, algebra=None, name=None):
    n = sum(len(p) for p in parts)
    algebra = MatrixAlg.diagonal(n) if algebra is None else algebra
    atoms = []
    for part in parts:
        d = np.zeros(algebra.total_dim)
        d[list(part)] = 1
        atoms.append(np.diag(d).astype(complex))
    if name is None:
        name = "|".join("{" + ",".join(str(i) for i in sorted(p)) + "}" for p in parts)
    return Context(algebra, atoms, name=name)


def set_partitions(n):
    """All set partitions of range(n), blocks in order of their least element."""
    if n == 0:
        yield []
        return
    for smaller in set_partitions(n - 1):
        for k in range(len(smaller)):
            yield smaller[:k] + [smaller[k] + [n - 1]] + smaller[k + 1 :]
        yield smaller + [[n - 1]]


def diagonal_contexts(n, algebra=None):
    n >= 1 or _raise(ValueError("n must be >= 1"))
    algebra = MatrixAlg.diagonal(n) if algebra is None else algebra
    return [partition_context(p, algebra) for p in set_partitions(n)]


def young_sequences(k, n):
    """
    Sequences 0 < i_1 < ... < i_k = n whose gaps i_j - i_{j-1} never
    increase, in lexicographic order.
    """
    1 <= k <= n or _raise(ValueError(f"need 1 <= k <= n, got k={k}, n={n}"))
    out = []

    def extend(seq, last_gap):
        prev = seq[-1] if seq else 0
        if len(seq) == k:
            if prev == n:
                out.append(tuple(seq))
            return
        remaining = k - len(seq)
        for gap in range(1, min(last_gap, n - prev) + 1):
            # the remaining parts can be at most ``gap`` each
            if gap * remaining >= n - prev and (remaining - 1) <= n - prev - gap:
                extend(seq + [prev + gap], gap)

    extend([], n)
    return sorted(out)


def young_context(seq, n=None, algebra=None):
    """Diagonal context whose consecutive coordinate blocks have the gaps of ``seq``."""
    n = seq[-1] if n is None else n
    bounds = (0,) + tuple(seq)
    parts = [list(range(a, b)) for a, b in zip(bounds[:-1], bounds[1:])]
    return partition_context(parts, algebra or MatrixAlg.full(n), name="Y" + str(tuple(seq)))


def random_unitary(rng, n):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng, algebra, scale=1.0):
    n = algebra.total_dim
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = scale * 0.5 * (m + m.conj().T)
    m[~algebra.block_mask] = 0
    return HermObs(algebra, m)


def rotate_context(c, u, name=None):
    return Context(
        c.algebra,
        [u @ p.matrix @ u.conj().T for p in c.atoms],
        name=name,
    )


def meet_contexts(c, d, tol_rank=TOL_RANK):
    """
    Context of the intersection algebra C ∩ D.

    The atoms of each context are an orthogonal basis of its span, so the
    intersection is read off the principal angles between the two spans:
    directions with cosine 1 lie in both. Gaps within a factor 10 of
    ``tol_rank`` raise DegenerateIntersection.
    """
    c.algebra == d.algebra or _raise(IncompatibleAlgebras("contexts over different algebras"))
    qa = np.stack([p.matrix.ravel() / np.linalg.norm(p.matrix) for p in c.atoms], axis=1)
    qb = np.stack([p.matrix.ravel() / np.linalg.norm(p.matrix) for p in d.atoms], axis=1)
    u, s, _ = svd(qa.conj().T @ qb, full_matrices=False)
    gaps = 1 - s
    ambiguous = (gaps > tol_rank / 10) & (gaps < 10 * tol_rank)
    if np.any(ambiguous):
        raise DegenerateIntersection(
            "cannot decide the dimension of the intersection",
            singular_values=[float(v) for v in s],
        )
    shared = u[:, gaps <= tol_rank / 10]
    # coordinates of the shared directions on the atoms of c
    coords = shared / np.array([np.linalg.norm(p.matrix) for p in c.atoms])[:, None]
    k = len(c.atoms)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tol_group = np.sqrt(tol_rank)
    scale = np.max(np.abs(coords)) if coords.size else 1.0
    for i, j in itertools.combinations(range(k), 2):
        if coords.shape[1] and np.max(np.abs(coords[i] - coords[j])) <= tol_group * scale:
            parent[find(j)] = find(i)
    groups = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    atoms = [sum(c.atoms[i].matrix for i in g) for g in groups.values()]
    if len(atoms) == 1:
        return trivial_context(c.algebra)
    return Context(c.algebra, atoms, name=f"({c.name}^{d.name})")


class ContextPoset:
    """
    Finite family of contexts ordered by refinement, with the trivial
    context at index 0. With ``include_trivial=False`` the first given
    context takes its place, which must then be below every other one.
    """

    def __init__(self, contexts, closure="meets", tol_rank=TOL_RANK, include_trivial=True):
        closure in CLOSURE_POLICIES or _raise(
            ValueError(f"closure must be one of {CLOSURE_POLICIES}, got '{closure}'")
        )
        contexts = list(contexts)
        contexts or _raise(ValueError("at least one context is needed"))
        algebra = contexts[0].algebra
        all(c.algebra == algebra for c in contexts) or _raise(
            IncompatibleAlgebras("all contexts must share one algebra")
        )
        family = [trivial_context(algebra)] if include_trivial else []
        for c in contexts:
            if not any(c.same_as(e) for e in family):
                family.append(c)
        if closure == "meets":
            changed = True
            while changed:
                changed = False
                for c, d in itertools.combinations(list(family), 2):
                    m = meet_contexts(c, d, tol_rank)
                    if not any(m.same_as(e) for e in family):
                        family.append(m)
                        changed = True
        names = []
        for k, c in enumerate(family):
            name = c.name or f"C{k}"
            while name in names:
                name = f"{name}'"
            names.append(name)
        m = len(family)
        leq = np.array([[family[i].le(family[j]) for j in range(m)] for i in range(m)])
        self.algebra = algebra
        self.contexts = tuple(family)
        self.names = tuple(names)
        self.closure = closure
        self.poset = FinPoset(leq, names)

    def __len__(self):
        return len(self.contexts)

    def __iter__(self):
        return iter(self.contexts)

    def __getitem__(self, k):
        return self.contexts[k]

    def __repr__(self):
        return f"ContextPoset({', '.join(self.names)})"

    @property
    def bottom(self):
        return 0

    def index(self, name_or_context):
        if isinstance(name_or_context, Context):
            k = self.find(name_or_context)
            k is not None or _raise(ValueError("context is not in the poset"))
            return k
        return self.poset.index(name_or_context)

    def find(self, c):
        for k, e in enumerate(self.contexts):
            if c.same_as(e):
                return k
        return None

    def le(self, i, j):
        return self.poset.le(i, j)

    @cached_property
    def refinements(self):
        """``(i, j) -> atom masks of context j`` for the atoms of context i, i <= j."""
        out = {}
        for i in range(len(self)):
            for j in bits(self.poset.up_masks[i]):
                out[(i, j)] = self.contexts[i].refinement_masks(self.contexts[j])
        return out

    @cached_property
    def family(self):
        """Proj(C) for every context with refinement embeddings."""
        return BlockFamily(
            self.poset,
            [c.boolean for c in self.contexts],
            {key: masks for key, masks in self.refinements.items() if key[0] != key[1]},
        )

    def block_family(self):
        return self.family

    def to_json(self):
        return {
            "algebra": self.algebra.to_json(),
            "closure": self.closure,
            "contexts": [c.to_json() for c in self.contexts],
        }

    @classmethod
    def from_json(cls, data, path="$", tol_rank=TOL_RANK):
        isinstance(data, dict) and isinstance(data.get("contexts"), list) or _raise(
            SchemaError("family must carry a 'contexts' list", path)
        )
        algebra = (
            MatrixAlg.from_json(data["algebra"], f"{path}.algebra") if "algebra" in data else None
        )
        contexts = [
            Context.from_json(c, algebra, f"{path}.contexts[{k}]")
            for k, c in enumerate(data["contexts"])
        ]
        contexts or _raise(SchemaError("family needs at least one context", f"{path}.contexts"))
        closure = data.get("closure", "meets")
        closure in CLOSURE_POLICIES or _raise(
            SchemaError(f"closure must be one of {CLOSURE_POLICIES}", f"{path}.closure")
        )
        return cls(contexts, closure=closure, tol_rank=tol_rank)


def context_poset(cs, closure="meets", tol_rank=TOL_RANK):
    return ContextPoset(cs, closure=closure, tol_rank=tol_rank)


def d_generator_mask(a, c, tol_eig=TOL_EIG):
    """Atoms of c on which a is strictly positive."""
    values = c.values(a)
    return reduce(
        lambda m, k: m | (1 << k), (k for k, v in enumerate(values) if v > tol_eig), 0
    )


def d_generator(a, c, tol_eig=TOL_EIG):
    """The generator D_a of L_C as the support projection of a⁺ inside c."""
    return c.projection(d_generator_mask(a, c, tol_eig))


def gelfand_frame(c):
    """Frame of ideals of the Boolean algebra Proj(c); isomorphic to Proj(c)."""
    lattice = c.boolean.to_lattice()
    return FrameElems(lattice.poset, ideal_masks(lattice), name="gelfand")


def spectrum_cover(c, p, us):
    """D_p ◁ U in L_C, which for finite Boolean data is p <= ⋁U."""
    as_mask = lambda q: q if isinstance(q, int) else c.coordinates(q)
    target = reduce(lambda m, q: m | as_mask(q), us, 0)
    return as_mask(p) & ~target == 0
