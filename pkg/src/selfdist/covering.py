"""Coverings of the unit ball by homothets c + rK, and the bounds they certify.

A covering with s homothets of ratio r splits any measure into masses v_i
(each atom goes to the first homothet containing it). Two atoms in the
same piece are at most 2r apart, any two atoms at most 2, so

    Delta <= 2 - (2 - 2r) * sum(v_i**2) <= 2 - (2 - 2r)/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import LASSAK_RATIO, BoundReport, Theorem, covering_bound_generic
from .delta import _map, delta_discrete
from .errors import CertificateInvalidError, InputError
from .measures import BALL, SamplerSpec, sample_ball, sign_vectors
from .norms import DEFAULT_TOL, NormSpec, bounding_box, cross_distances, in_unit_ball

MAX_GRID_DIM = 6
MAX_GRID_POINTS = 10**8
VERIFY_CHUNK = 2**16


@dataclass(frozen=True)
class Homothet:
    center: tuple
    ratio: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not 0.0 < self.ratio < 1.0:
            raise InputError(f"homothet ratio must lie in (0, 1), got {self.ratio!r}")

    def contains(self, ns, x, tol=DEFAULT_TOL):
        from .norms import norm_eval

        return norm_eval(ns, np.asarray(x, dtype=float) - np.asarray(self.center)) <= self.ratio * (1.0 + tol)


@dataclass(frozen=True, eq=False)
class Covering:
    """Homothets of K sharing one ratio, in the order used for partitioning."""

    norm: NormSpec
    centers: np.ndarray
    ratio: float
    claimed_complete: bool = True

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float)
        if centers.ndim != 2 or centers.shape[0] == 0:
            raise InputError("a covering needs at least one center")
        if centers.shape[1] != self.norm.dim:
            raise InputError(f"centers have length {centers.shape[1]}, norm has dim {self.norm.dim}")
        if not 0.0 < self.ratio < 1.0:
            raise InputError(f"ratio must lie in (0, 1), got {self.ratio!r}")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "ratio", float(self.ratio))

    @property
    def count(self):
        return self.centers.shape[0]

    @property
    def homothets(self):
        return [Homothet(c, self.ratio) for c in self.centers]

    def without(self, index):
        return Covering(self.norm, np.delete(self.centers, index, axis=0), self.ratio, False)

    def gauges(self, points):
        """(points, homothets) array of |x - c_i| / r."""
        return cross_distances(self.norm, points, self.centers) / self.ratio

    def first_containing(self, points, tol=DEFAULT_TOL):
        """Index of the first homothet containing each point, -1 if none."""
        inside = self.gauges(points) <= 1.0 + tol
        first = np.argmax(inside, axis=1)
        return np.where(inside.any(axis=1), first, -1)

    def __eq__(self, other):
        if not isinstance(other, Covering):
            return NotImplemented
        return (
            self.norm == other.norm
            and self.ratio == other.ratio
            and self.claimed_complete == other.claimed_complete
            and np.array_equal(self.centers, other.centers)
        )

    __hash__ = None

    def to_dict(self):
        return {
            "norm": self.norm.to_dict(),
            "ratio": self.ratio,
            "centers": self.centers.tolist(),
            "claimed_complete": self.claimed_complete,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                NormSpec.from_dict(data["norm"]),
                data["centers"],
                float(data["ratio"]),
                bool(data.get("claimed_complete", True)),
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad covering description: {exc}") from exc


def cube_cover(n):
    """The cube [-1, 1]^n as the union of its 2^n half-size subcubes."""
    if isinstance(n, bool) or int(n) != n or not 2 <= n <= 25:
        raise InputError(f"cube_cover supports 2 <= n <= 25, got {n!r}")
    return Covering(NormSpec.linf(int(n)), 0.5 * sign_vectors(int(n)), 0.5)


def lassak_square_cover():
    """Four homothets of ratio sqrt(2)/2 covering the l_inf unit square."""
    return Covering(NormSpec.linf(2), 0.5 * sign_vectors(2), LASSAK_RATIO)


def lassak_diamond_cover():
    """Four homothets of ratio sqrt(2)/2 covering the l_1 unit disc."""
    centers = [[0.5, 0.0], [0.0, 0.5], [-0.5, 0.0], [0.0, -0.5]]
    return Covering(NormSpec.lp(2, 1), centers, LASSAK_RATIO)


@dataclass(frozen=True)
class CoverReport:
    verified: bool
    witness: tuple | None
    points_checked: int
    mode: str
    statement: str

    def to_dict(self):
        return {
            "verified": self.verified,
            "witness": None if self.witness is None else list(self.witness),
            "points_checked": self.points_checked,
            "mode": self.mode,
            "statement": self.statement,
        }

    @classmethod
    def from_dict(cls, data):
        w = data["witness"]
        return cls(data["verified"], None if w is None else tuple(w), data["points_checked"],
                   data["mode"], data["statement"])


def _grid_axes(ns, resolution):
    half = bounding_box(ns)
    axes = []
    for b in half:
        m = int(math.floor(2.0 * b / resolution + 1e-9)) + 1
        ax = np.linspace(-b, b, max(m, 2))
        if ax[-1] - ax[-2] > resolution * (1 + 1e-9):
            ax = np.linspace(-b, b, m + 1)
        axes.append(ax)
    return axes


def _first_uncovered(c, pts):
    pts = pts[in_unit_ball(c.norm, pts)]
    if len(pts) == 0:
        return 0, None
    missing = c.first_containing(pts) < 0
    if missing.any():
        i = int(np.argmax(missing))
        return i + 1, pts[i]
    return len(pts), None


def verify_cover(c, grid=None, samples=None, seed=None, threads=1):
    """Check that every tested point of K lies in some homothet.

    Exactly one of ``grid`` (spacing of a box grid, filtered to K) or
    ``samples`` (number of ball-uniform points; ``seed`` required) must be
    given. Sample mode can only report the absence of counterexamples.
    """
    if (grid is None) == (samples is None):
        raise InputError("give exactly one of grid resolution or sample count")
    n = c.norm.dim
    if grid is not None:
        if not grid > 0:
            raise InputError("grid resolution must be positive")
        if n > MAX_GRID_DIM:
            raise InputError(f"grid verification supports n <= {MAX_GRID_DIM}")
        axes = _grid_axes(c.norm, grid)
        shape = tuple(len(a) for a in axes)
        total = math.prod(shape)
        if total > MAX_GRID_POINTS:
            raise InputError(f"grid of {total} points exceeds the cap of {MAX_GRID_POINTS}")

        def points(i0):
            idx = np.unravel_index(np.arange(i0, min(i0 + VERIFY_CHUNK, total)), shape)
            return np.stack([axes[j][idx[j]] for j in range(n)], axis=1)

        mode = f"grid:{grid}"
    else:
        if seed is None:
            raise InputError("sample verification requires a seed")
        if int(samples) < 1:
            raise InputError("sample count must be positive")
        total = int(samples)
        spec = SamplerSpec(c.norm, BALL, seed)

        def points(i0):
            return sample_ball(spec, min(VERIFY_CHUNK, total - i0), start=i0)

        mode = f"sample:{total}:seed={seed}"

    results = _map(lambda i0: _first_uncovered(c, points(i0)), range(0, total, VERIFY_CHUNK), threads)
    checked = 0
    for cnt, witness in results:
        checked += cnt
        if witness is not None:
            return CoverReport(False, tuple(witness.tolist()), checked, mode,
                               f"uncovered point found after {checked} points of K")
    if grid is not None:
        statement = f"all {checked} grid points of K covered"
    else:
        statement = f"no counterexample in {checked} samples"
    return CoverReport(True, None, checked, mode, statement)


@dataclass(frozen=True)
class Partition:
    masses: tuple
    leftover: float
    assignment: tuple

    def to_dict(self):
        return {"masses": list(self.masses), "leftover": self.leftover, "assignment": list(self.assignment)}


def partition_masses(c, m, tol=DEFAULT_TOL):
    """Masses v_i of the pieces L_i = (K cap K_i) minus the earlier K_j."""
    if m.dim != c.norm.dim:
        raise InputError(f"measure has dimension {m.dim}, covering has {c.norm.dim}")
    first = c.first_containing(m.atoms, tol)
    buckets = [[] for _ in range(c.count)]
    rest = []
    for i, w in zip(first.tolist(), m.weights.tolist()):
        (buckets[i] if i >= 0 else rest).append(w)
    return Partition(tuple(math.fsum(b) for b in buckets), math.fsum(rest), tuple(first.tolist()))


def certified_bound(c, m, tol=DEFAULT_TOL):
    """Bound on Delta(m) from the covering's partition of m."""
    m.check_support(c.norm)
    part = partition_masses(c, m, tol)
    if part.leftover > 0:
        bad = m.atoms[part.assignment.index(-1)]
        raise CertificateInvalidError(
            f"atom {bad.tolist()} lies in no homothet (uncovered mass {part.leftover!r})",
            atom=tuple(bad.tolist()),
        )
    r = c.ratio
    sum_sq = math.fsum(v * v for v in part.masses)
    deficit = (2.0 - 2.0 * r) * sum_sq
    report = BoundReport(
        Theorem.COVERING_CERTIFICATE,
        c.norm.dim,
        deficit,
        {
            "s": c.count,
            "r": r,
            "sum_sq": sum_sq,
            "relaxation": covering_bound_generic(c.count, r),
            "masses": list(part.masses),
            "assignment": list(part.assignment),
            "strict": False,
        },
    )
    # atoms may sit up to tol outside their homothet
    slack = 1e-12 + 2.0 * r * tol
    delta = delta_discrete(c.norm, m).value
    if delta > report.value + slack:
        raise ArithmeticError(f"certificate {report.value!r} below computed Delta {delta!r}")
    return report
