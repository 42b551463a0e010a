"""The averaged self-distance, exact for discrete measures and by Monte Carlo."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .measures import CHUNK, sample_ball
from .norms import cross_distances, norm_eval

# upper bound on entries of one (rows x atoms) distance block
BLOCK_ENTRIES = 2**21


@dataclass(frozen=True)
class DeltaEstimate:
    value: float
    stderr: float = 0.0
    samples: int = 0
    seed: int | None = None

    def __post_init__(self):
        if not (-1e-12 <= self.value <= 2.0 + 1e-12):
            raise ValueError(f"self-distance {self.value!r} outside [0, 2]")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.samples == 0 and self.stderr != 0:
            raise ValueError("exact estimates carry zero stderr")

    @property
    def exact(self):
        return self.samples == 0

    def to_dict(self):
        return {"value": self.value, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}

    @classmethod
    def from_dict(cls, data):
        return cls(float(data["value"]), float(data["stderr"]), int(data["samples"]), data.get("seed"))


def _map(fn, items, threads):
    if threads <= 1:
        return map(fn, items)
    pool = ThreadPoolExecutor(threads)
    try:
        return list(pool.map(fn, items))
    finally:
        pool.shutdown()


def pair_terms(ns, atoms, weights, threads=1):
    """Iterate over the blocks of terms w_i w_j |x_i - x_j| for i < j, in row order."""
    k = len(atoms)
    rows = max(1, BLOCK_ENTRIES // max(k, 1))
    starts = range(0, k, rows)

    def block(i0):
        i1 = min(i0 + rows, k)
        d = cross_distances(ns, atoms[i0:i1], atoms[i0:])
        ww = weights[i0:i1, None] * weights[None, i0:]
        t = ww * d
        iu = np.triu_indices(i1 - i0, k=1, m=k - i0)
        return t[iu].tolist()

    return _map(block, starts, threads)


def delta_discrete(ns, m, threads=1):
    """Exact sum_{i,j} v_i v_j |x_i - x_j| for a discrete measure.

    The upper-triangle terms are summed with ``math.fsum``, which rounds the
    exact sum once; the result therefore does not depend on atom order,
    block size or thread count.
    """
    m.check_support(ns)
    if len(m) == 1:
        return DeltaEstimate(0.0)
    blocks = pair_terms(ns, m.atoms, m.weights, threads)
    total = math.fsum(itertools.chain.from_iterable(blocks))
    return DeltaEstimate(2.0 * total)


def delta_monte_carlo(spec, pairs, threads=1):
    """Mean of |x - y| over ``pairs`` independent pairs drawn from ``spec``.

    Pair ``i`` uses stream points ``2i`` and ``2i + 1``. The standard error
    uses the unbiased sample variance.
    """
    if isinstance(pairs, bool) or int(pairs) != pairs or pairs < 2:
        raise InputError(f"pairs must be an integer >= 2, got {pairs!r}")
    pairs = int(pairs)
    per = CHUNK // 2 * 8

    def shard(p0):
        cnt = min(per, pairs - p0)
        pts = sample_ball(spec, 2 * cnt, start=2 * p0)
        d = norm_eval(spec.norm, pts[0::2] - pts[1::2])
        return math.fsum(d.tolist()), math.fsum((d * d).tolist())

    sums = list(_map(shard, range(0, pairs, per), threads))
    s1 = math.fsum(s for s, _ in sums)
    s2 = math.fsum(q for _, q in sums)
    mean = s1 / pairs
    var = max(math.fsum([s2, -s1 * mean]) / (pairs - 1), 0.0)
    return DeltaEstimate(mean, math.sqrt(var / pairs), pairs, spec.seed)
