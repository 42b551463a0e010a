"""Discrete probability measures on the unit ball and seeded samplers.

Samplers are stateless: point ``i`` of a stream is a pure function of
``(seed, i)``. Points are generated in fixed-size chunks, chunk ``c``
drawing from a Philox generator keyed by ``seed`` and jumped ``c`` times,
so any sharding of the index range reproduces the same points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SamplerInfeasibleError
from .norms import DEFAULT_TOL, LINF, LP, POLYTOPAL, NormSpec, bounding_box, in_unit_ball, norm_eval

WEIGHT_RENORM_TOL = 1e-9
MAX_VERTEX_ATOMS = 2**25
CHUNK = 2**16
MAX_POLYTOPE_SAMPLER_DIM = 16
REJECTION_WINDOW = 2**22
MIN_ACCEPTANCE = 1e-6

VERTEX = "vertex"
BALL = "ball"
BOUNDARY = "boundary"
METHODS = (VERTEX, BALL, BOUNDARY)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported probability measure.

    Atoms are stored as a read-only ``(k, n)`` array. Bitwise-identical atoms
    are merged (weights summed, first occurrence kept); weights within 1e-9
    of summing to one are rescaled, anything further off is rejected. Pass
    ``norm`` to also check that every atom lies in the unit ball.
    """

    atoms: np.ndarray
    weights: np.ndarray
    norm: NormSpec | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if atoms.ndim != 2 or atoms.shape[0] == 0:
            raise InputError("atoms must be a nonempty list of vectors")
        if atoms.shape[0] != weights.shape[0]:
            raise InputError(f"{atoms.shape[0]} atoms but {weights.shape[0]} weights")
        if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(weights))):
            raise InputError("atoms and weights must be finite")
        if np.any(weights < 0):
            raise InputError("weights must be nonnegative")
        total = math.fsum(weights.tolist())
        if abs(total - 1.0) > WEIGHT_RENORM_TOL:
            raise InputError(f"weights sum to {total!r}, not 1")
        atoms = atoms + 0.0  # -0.0 -> 0.0 so bitwise merging sees equal points
        atoms, weights = _merge_duplicates(atoms, weights)
        weights = weights / math.fsum(weights.tolist())
        if self.norm is not None:
            if atoms.shape[1] != self.norm.dim:
                raise InputError(f"atoms have length {atoms.shape[1]}, norm has dim {self.norm.dim}")
            outside = ~in_unit_ball(self.norm, atoms)
            if np.any(outside):
                bad = atoms[np.argmax(outside)]
                raise InputError(f"atom {bad.tolist()} lies outside the unit ball")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self):
        return self.atoms.shape[1]

    def __len__(self):
        return self.atoms.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return np.array_equal(self.atoms, other.atoms) and np.array_equal(self.weights, other.weights)

    __hash__ = None

    def check_support(self, ns, tol=DEFAULT_TOL):
        """Raise InputError unless every atom is in the unit ball of ``ns``."""
        if self.dim != ns.dim:
            raise InputError(f"measure has dimension {self.dim}, norm has {ns.dim}")
        outside = ~in_unit_ball(ns, self.atoms, tol)
        if np.any(outside):
            bad = self.atoms[np.argmax(outside)]
            raise InputError(f"atom {bad.tolist()} lies outside the unit ball")

    def to_dict(self):
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data, norm=None):
        try:
            return cls(data["atoms"], data["weights"], norm=norm)
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad measure description: {exc}") from exc


def _merge_duplicates(atoms, weights):
    index = {}
    keep = []
    merged = []
    for i, row in enumerate(atoms):
        key = row.tobytes()
        j = index.get(key)
        if j is None:
            index[key] = len(keep)
            keep.append(i)
            merged.append([weights[i]])
        else:
            merged[j].append(weights[i])
    if len(keep) == len(atoms):
        return atoms, weights
    return atoms[keep], np.array([math.fsum(ws) for ws in merged])


def sign_vectors(n):
    """All 2**n vectors in {-1, 1}^n, ordered by the binary expansion of the index."""
    idx = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n - 1, -1, -1)) & 1
    return 1.0 - 2.0 * bits


def uniform_vertex_measure(n, max_atoms=MAX_VERTEX_ATOMS):
    """Uniform measure on the 2**n vertices of the cube [-1, 1]^n."""
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InputError(f"dimension must be an integer >= 2, got {n!r}")
    if 2**n > max_atoms:
        raise InputError(f"2**{n} atoms exceeds the limit of {max_atoms}")
    atoms = sign_vectors(int(n))
    return DiscreteMeasure(atoms, np.full(len(atoms), 2.0**-n))


@dataclass(frozen=True)
class SamplerSpec:
    """Seeded point source on the unit ball of ``norm``.

    ``vertex`` draws cube vertices uniformly (l_inf only), ``ball`` draws
    from the uniform distribution on K, and ``boundary`` radially projects
    ball-uniform points onto the sphere (the cone measure, which is the
    normalized surface measure for l_1, l_2 and l_inf).
    """

    norm: NormSpec
    method: str = BALL
    seed: int = 0
    box: np.ndarray | None = field(default=None, init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown sampler {self.method!r}; choose from {METHODS}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if self.method == VERTEX and self.norm.kind != LINF:
            raise InputError("vertex sampling is only defined for the l_inf ball")
        if self.norm.kind == POLYTOPAL and self.method != VERTEX:
            if self.norm.dim > MAX_POLYTOPE_SAMPLER_DIM:
                raise InputError(
                    f"polytopal sampling supports dim <= {MAX_POLYTOPE_SAMPLER_DIM}"
                )
            object.__setattr__(self, "box", bounding_box(self.norm))

    def generator(self, chunk):
        return np.random.Generator(np.random.Philox(key=self.seed).jumped(chunk))


def _uniform_ball_chunk(spec, rng, count):
    ns = spec.norm
    n = ns.dim
    if ns.kind == LINF:
        return rng.uniform(-1.0, 1.0, size=(count, n))
    if ns.kind == LP:
        p = ns.p
        # generalized Gaussian direction, Beta(n, 1) radius
        g = rng.standard_gamma(1.0 / p, size=(count, n)) ** (1.0 / p)
        g *= rng.choice([-1.0, 1.0], size=(count, n))
        radius = rng.uniform(size=count) ** (1.0 / n)
        return g * (radius / norm_eval(ns, g))[:, None]
    return _rejection_chunk(spec, rng, count)


def _rejection_chunk(spec, rng, count):
    ns = spec.norm
    box = spec.box
    out = []
    have = 0
    trials = 0
    batch = max(count, 1024)
    while have < count:
        cand = rng.uniform(-1.0, 1.0, size=(batch, ns.dim)) * box
        cand = cand[in_unit_ball(ns, cand, 0.0)]
        trials += batch
        out.append(cand)
        have += len(cand)
        if trials >= REJECTION_WINDOW and have / trials < MIN_ACCEPTANCE:
            raise SamplerInfeasibleError(
                f"rejection acceptance {have / trials:.3g} below {MIN_ACCEPTANCE} "
                f"after {trials} proposals"
            )
    return np.concatenate(out)[:count]


def _chunk(spec, chunk):
    rng = spec.generator(chunk)
    n = spec.norm.dim
    if spec.method == VERTEX:
        return 1.0 - 2.0 * rng.integers(0, 2, size=(CHUNK, n))
    pts = _uniform_ball_chunk(spec, rng, CHUNK)
    if spec.method == BOUNDARY:
        r = norm_eval(spec.norm, pts)
        pts = pts / np.where(r > 0, r, 1.0)[:, None]
    return pts


def sample_ball(spec, count, start=0):
    """Points ``start .. start+count-1`` of the sampler's stream, shape (count, n)."""
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise InputError(f"count must be a positive integer, got {count!r}")
    if start < 0:
        raise InputError("start index must be nonnegative")
    first = start // CHUNK
    last = (start + count - 1) // CHUNK
    parts = [_chunk(spec, c) for c in range(first, last + 1)]
    pts = np.concatenate(parts) if len(parts) > 1 else parts[0]
    offset = start - first * CHUNK
    return pts[offset:offset + count]
