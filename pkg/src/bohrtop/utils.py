#!/usr/bin/env python3
"""
Shared constants, configuration, exceptions and serialization helpers.
"""

import os
from fractions import Fraction

import numpy as np
from csbdeep.utils import _raise
from pydotplus import graph_from_edges
from pydotplus.graphviz import Edge, Node

TOL_HERM = 1.0e-10
TOL_PROJ = 1.0e-9
TOL_EIG = 1.0e-9
TOL_CLUSTER = 1.0e-8
TOL_RANK = 1.0e-8
TOL_TRUTH = 1.0e-9
DEFAULT_CAP = 2**20
MONO_CAP = 2**22
GRID_STEP = Fraction(1, 16)
EXACT_DEN = 2**12
CAP_ENV = "BOHRTOP_CAP"


class BohrtopError(Exception):
    pass


class PosetError(BohrtopError):
    pass


class NotALattice(BohrtopError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotDistributive(BohrtopError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotContinuous(BohrtopError):
    def __init__(self, message, axiom=None, witness=None):
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness


class CapExceeded(BohrtopError):
    def __init__(self, message, bound_log2=None, cap=None, lower_bound=None):
        super().__init__(message)
        self.bound_log2 = bound_log2
        self.cap = cap
        self.lower_bound = lower_bound


class GlueConflict(BohrtopError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotHermitian(BohrtopError):
    pass


class NotProjection(BohrtopError):
    pass


class NotOnSphere(BohrtopError):
    pass


class IncompatibleAlgebras(BohrtopError):
    pass


class DegenerateIntersection(BohrtopError):
    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class NotInContext(BohrtopError):
    pass


class PosetMismatch(BohrtopError):
    pass


class NotInPoset(BohrtopError):
    pass


class MissingGeneratedContext(BohrtopError):
    pass


class AlgebraMismatch(BohrtopError):
    pass


class InconsistentMeasure(BohrtopError):
    def __init__(self, message, overlap=None):
        super().__init__(message)
        self.overlap = overlap


class NotUpperSet(BohrtopError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SchemaError(BohrtopError):
    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class Config:
    """Tolerances, enumeration caps and sampling options shared by the toolkit.

    Parameters
    ----------
    tol_herm, tol_proj, tol_eig, tol_cluster, tol_rank, tol_truth : float
        Numerical tolerances (all strictly positive).
    cap : int
        Largest frame carrier that is materialized eagerly.
    mono_cap : int
        Largest number of monotone sections that is enumerated.
    grid_step : Fraction
        Resolution of the rational grid used by order checks.
    seed : int
        Seed of every randomized suite.
    verbose : bool
        Show progress bars and summaries.
    """

    def __init__(
        self,
        tol_herm=TOL_HERM,
        tol_proj=TOL_PROJ,
        tol_eig=TOL_EIG,
        tol_cluster=TOL_CLUSTER,
        tol_rank=TOL_RANK,
        tol_truth=TOL_TRUTH,
        cap=DEFAULT_CAP,
        mono_cap=MONO_CAP,
        grid_step=GRID_STEP,
        seed=0,
        verbose=False,
    ):
        self.tol_herm = tol_herm
        self.tol_proj = tol_proj
        self.tol_eig = tol_eig
        self.tol_cluster = tol_cluster
        self.tol_rank = tol_rank
        self.tol_truth = tol_truth
        self.cap = int(cap)
        self.mono_cap = int(mono_cap)
        self.grid_step = Fraction(grid_step)
        self.seed = int(seed)
        self.verbose = verbose
        ok, messages = self.is_valid()
        ok or _raise(ValueError("invalid configuration: " + "; ".join(messages)))

    @classmethod
    def from_env(cls, **kwargs):
        cap = os.environ.get(CAP_ENV)
        if cap is not None and "cap" not in kwargs:
            kwargs["cap"] = int(cap)
            kwargs.setdefault("mono_cap", int(cap))
        return cls(**kwargs)

    def is_valid(self):
        messages = []
        for name in (
            "tol_herm",
            "tol_proj",
            "tol_eig",
            "tol_cluster",
            "tol_rank",
            "tol_truth",
        ):
            if not getattr(self, name) > 0:
                messages.append(f"{name} must be positive")
        if self.cap < 1 or self.mono_cap < 1:
            messages.append("caps must be positive")
        if self.grid_step <= 0:
            messages.append("grid_step must be positive")
        return len(messages) == 0, messages

    def __repr__(self):
        items = ", ".join(f"{k}={v!r}" for k, v in vars(self).items())
        return f"Config({items})"


def bits(mask):
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def submasks(mask):
    """All submasks of ``mask`` (including 0 and ``mask``), ascending."""
    out = []
    s = mask
    while True:
        out.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    return out[::-1]


def parse_rational(text, path="$"):
    """Parse ``"p/q"`` (or an integer) exactly; floats are rejected."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    isinstance(text, str) or _raise(SchemaError("expected a 'p/q' string", path))
    if "." in text or "e" in text.lower():
        raise SchemaError(f"rational '{text}' must be written as p/q", path)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise SchemaError(f"cannot parse rational '{text}' ({err})", path)


def rational_matrix(m, max_den=EXACT_DEN):
    """
    Entries of ``m`` as ``(re, im)`` Fraction pairs, or None when an entry
    is not a float image of a rational with denominator ``<= max_den``.
    """
    m = np.asarray(m, dtype=complex)
    rows = []
    for row in m:
        out = []
        for z in row:
            pair = []
            for x in (float(z.real), float(z.imag)):
                f = Fraction(x).limit_denominator(max_den)
                if float(f) != x:
                    return None
                pair.append(f)
            out.append(tuple(pair))
        rows.append(out)
    return rows


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data, path="$"):
    isinstance(data, list) and len(data) > 0 or _raise(
        SchemaError("matrix must be a non-empty list of rows", path)
    )
    n = len(data)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(data):
        isinstance(row, list) and len(row) == n or _raise(
            SchemaError(f"row must have {n} entries", f"{path}[{i}]")
        )
        for j, entry in enumerate(row):
            p = f"{path}[{i}][{j}]"
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                out[i, j] = entry
                continue
            isinstance(entry, list) and len(entry) == 2 or _raise(
                SchemaError("entry must be [re, im]", p)
            )
            all(
                isinstance(v, (int, float)) and not isinstance(v, bool)
                for v in entry
            ) or _raise(SchemaError("entry must hold two numbers", p))
            out[i, j] = complex(entry[0], entry[1])
    return out


def dot_graph(labels, edges, name="G", highlight=(), rankdir="BT"):
    """Hasse diagram as DOT text; ``edges`` are (lower, upper) index pairs."""
    highlight = set(highlight)
    g = graph_from_edges([], directed=True)
    g.set_name(name)
    g.set_rankdir(rankdir)
    for i, label in enumerate(labels):
        style = {"style": "filled", "fillcolor": "lightblue"} if i in highlight else {}
        text = str(label).replace('"', '\\"')
        g.add_node(Node(f"n{i}", label=f'"{text}"', **style))
    for i, j in edges:
        g.add_edge(Edge(f"n{i}", f"n{j}", arrowhead="none"))
    return g.to_string()
