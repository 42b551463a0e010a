"""Norms on R^n: l_p (1 <= p <= inf) and polytopal norms in facet form.

A polytopal norm is given by functionals a_1..a_k and evaluates as
``|x| = max_k |<a_k, x>|``; the unit ball is the centrally symmetric
polytope ``{x : |<a_k, x>| <= 1 for all k}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

DEFAULT_TOL = 1e-9

LP = "lp"
LINF = "linf"
POLYTOPAL = "polytopal"


@dataclass(frozen=True, eq=False)
class NormSpec:
    """An immutable norm on R^dim.

    Use the constructors :meth:`lp`, :meth:`linf` and :meth:`polytopal`
    rather than calling the class directly.
    """

    dim: int
    kind: str
    p: float | None = None
    functionals: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 2:
            raise InputError(f"dimension must be an integer >= 2, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.kind == LP:
            if self.p is None or not (1.0 <= float(self.p) < math.inf):
                raise InputError(f"l_p norm requires finite p >= 1, got {self.p!r}")
            object.__setattr__(self, "p", float(self.p))
        elif self.kind == LINF:
            object.__setattr__(self, "p", None)
        elif self.kind == POLYTOPAL:
            a = np.array(self.functionals, dtype=float)
            if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] != self.dim:
                raise InputError(
                    f"polytopal norm needs a nonempty list of {self.dim}-vectors"
                )
            if not np.all(np.isfinite(a)):
                raise InputError("functionals must be finite")
            if np.linalg.matrix_rank(a) < self.dim:
                raise InputError("functionals do not span R^n; not a norm")
            a.setflags(write=False)
            object.__setattr__(self, "functionals", a)
        else:
            raise InputError(f"unknown norm kind {self.kind!r}")

    @classmethod
    def lp(cls, dim, p):
        if isinstance(p, str) and p.strip().lower() in ("inf", "infinity"):
            return cls(dim, LINF)
        if float(p) == math.inf:
            return cls(dim, LINF)
        return cls(dim, LP, p=float(p))

    @classmethod
    def linf(cls, dim):
        return cls(dim, LINF)

    @classmethod
    def polytopal(cls, functionals):
        a = np.asarray(functionals, dtype=float)
        if a.ndim != 2:
            raise InputError("functionals must be a 2-d array")
        return cls(a.shape[1], POLYTOPAL, functionals=a)

    def __eq__(self, other):
        if not isinstance(other, NormSpec):
            return NotImplemented
        if (self.dim, self.kind, self.p) != (other.dim, other.kind, other.p):
            return False
        if self.kind == POLYTOPAL:
            return np.array_equal(self.functionals, other.functionals)
        return True

    def __hash__(self):
        extra = self.functionals.tobytes() if self.kind == POLYTOPAL else None
        return hash((self.dim, self.kind, self.p, extra))

    def to_dict(self):
        if self.kind == LP:
            kind = {"lp": self.p}
        elif self.kind == LINF:
            kind = {"lp": "inf"}
        else:
            kind = {"polytopal": self.functionals.tolist()}
        return {"dim": self.dim, "kind": kind}

    @classmethod
    def from_dict(cls, data):
        try:
            dim = data["dim"]
            kind = data["kind"]
            (name, value), = kind.items()
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputError(f"bad norm description: {data!r}") from exc
        if name == "lp":
            ns = cls.lp(dim, value)
        elif name == "linf":
            ns = cls.linf(dim)
        elif name == "polytopal":
            ns = cls.polytopal(value)
        else:
            raise InputError(f"unknown norm kind {name!r}")
        if ns.dim != dim:
            raise InputError(f"dim {dim} does not match functionals of length {ns.dim}")
        return ns


def _as_points(ns, x):
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (ns.dim,):
        raise InputError(f"expected vectors of length {ns.dim}, got shape {arr.shape}")
    return arr


def _eval(ns, arr):
    if ns.kind == LINF:
        return np.max(np.abs(arr), axis=-1)
    if ns.kind == POLYTOPAL:
        return np.max(np.abs(arr @ ns.functionals.T), axis=-1)
    p = ns.p
    if p == 1.0:
        return np.sum(np.abs(arr), axis=-1)
    # scale by the max entry so the power sum can neither overflow nor underflow
    a = np.abs(arr)
    m = np.max(a, axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    scaled = a / safe
    if p == 2.0:
        return np.squeeze(m, -1) * np.sqrt(np.sum(scaled * scaled, axis=-1))
    return np.squeeze(m, -1) * np.sum(scaled**p, axis=-1) ** (1.0 / p)


def norm_eval(ns, x):
    """Norm of a vector, or of each row of an (..., dim) array."""
    arr = _as_points(ns, x)
    out = _eval(ns, arr)
    return float(out) if out.ndim == 0 else out


def in_unit_ball(ns, x, tol=DEFAULT_TOL):
    if tol < 0:
        raise InputError("tolerance must be nonnegative")
    val = norm_eval(ns, x)
    return bool(val <= 1.0 + tol) if np.ndim(val) == 0 else val <= 1.0 + tol


def cross_distances(ns, a, b):
    """Matrix of |a_i - b_j| for point arrays a (k, n) and b (m, n)."""
    a = _as_points(ns, a)
    b = _as_points(ns, b)
    if ns.kind == LINF:
        # accumulate coordinate-wise to avoid a (k, m, n) temporary
        out = np.zeros((a.shape[0], b.shape[0]))
        for j in range(ns.dim):
            np.maximum(out, np.abs(a[:, j, None] - b[None, :, j]), out=out)
        return out
    if ns.kind == LP and ns.p == 1.0:
        out = np.zeros((a.shape[0], b.shape[0]))
        for j in range(ns.dim):
            out += np.abs(a[:, j, None] - b[None, :, j])
        return out
    if ns.kind == POLYTOPAL:
        # |<f, a_i - b_j>| = |<f, a_i> - <f, b_j>|
        pa = a @ ns.functionals.T
        pb = b @ ns.functionals.T
        out = np.zeros((a.shape[0], b.shape[0]))
        for j in range(pa.shape[1]):
            np.maximum(out, np.abs(pa[:, j, None] - pb[None, :, j]), out=out)
        return out
    return _eval(ns, a[:, None, :] - b[None, :, :])


def distance_matrix(ns, points):
    """Symmetric matrix D[i, j] = |x_i - x_j| with an exactly zero diagonal."""
    pts = _as_points(ns, np.atleast_2d(np.asarray(points, dtype=float)))
    d = cross_distances(ns, pts, pts)
    # symmetric by construction for the coordinate-wise kinds; force it for l_p
    d = np.maximum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return d


def bounding_box(ns):
    """Half-widths b_j with K inside the box prod [-b_j, b_j], tight per coordinate.

    For polytopal norms each b_j = max x_j subject to |<a_k, x>| <= 1 is
    solved as a linear program.
    """
    if ns.kind != POLYTOPAL:
        return np.ones(ns.dim)
    return _polytope_box(ns.functionals)


def _polytope_box(a):
    from scipy.optimize import linprog

    k, n = a.shape
    a_ub = np.vstack([a, -a])
    b_ub = np.ones(2 * k)
    half = np.empty(n)
    for j in range(n):
        c = np.zeros(n)
        c[j] = -1.0
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * n, method="highs")
        if res.status != 0:
            raise InputError(f"unit ball is unbounded along coordinate {j}")
        half[j] = -res.fun
    return half
