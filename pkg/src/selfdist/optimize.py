"""Search for discrete measures with large averaged self-distance.

For fixed atoms the objective is the quadratic form v^T D v over the
probability simplex, D the distance matrix. It is maximized with the
multiplicative (replicator) update v_i <- v_i (Dv)_i / v^T D v, which stays
on the simplex and never decreases the objective for symmetric
nonnegative D.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import conjectured_deficit
from .delta import delta_discrete
from .errors import InputError
from .measures import DiscreteMeasure
from .norms import NormSpec, distance_matrix, in_unit_ball, norm_eval

REL_IMPROVEMENT_TOL = 1e-12
PLATEAU_ITERS = 10
MAX_BRUTE_ATOMS = 5
MAX_BRUTE_RESOLUTION = 400


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    norm: NormSpec
    best_measure: DiscreteMeasure
    best_value: float
    iterations: int
    restarts_used: int
    converged: bool
    history: tuple = field(default=(), repr=False)

    @property
    def gap_to_conjecture(self):
        """2(1 - 2^-n) - best_value; negative would contradict the conjecture."""
        return (2.0 - self.best_value) - conjectured_deficit(self.norm.dim)

    def to_dict(self):
        return {
            "norm": self.norm.to_dict(),
            "best_measure": self.best_measure.to_dict(),
            "best_value": self.best_value,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "gap_to_conjecture": self.gap_to_conjecture,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            NormSpec.from_dict(data["norm"]),
            DiscreteMeasure.from_dict(data["best_measure"]),
            float(data["best_value"]),
            int(data["iterations"]),
            int(data["restarts_used"]),
            bool(data["converged"]),
        )


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _check_atoms(ns, atoms):
    pts = np.asarray(atoms, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InputError("need a nonempty list of atoms")
    if pts.shape[1] != ns.dim:
        raise InputError(f"atoms have length {pts.shape[1]}, norm has dim {ns.dim}")
    outside = ~in_unit_ball(ns, pts)
    if outside.any():
        raise InputError(f"atom {pts[np.argmax(outside)].tolist()} lies outside the unit ball")
    return pts


def _finish(ns, atoms, weights, iterations, restarts, converged, history=()):
    m = DiscreteMeasure(atoms, weights)
    value = delta_discrete(ns, m).value
    return OptimizationResult(ns, m, value, iterations, restarts, converged, tuple(history))


def replicator_ascent(d, v, max_iters, record=False):
    """Multiplicative updates from ``v``; returns (v, value, iterations, converged, history)."""
    value = float(v @ d @ v)
    history = [value] if record else []
    if value <= 0.0:
        return v, value, 0, True, history
    quiet = 0
    it = 0
    for it in range(1, max_iters + 1):
        dv = d @ v
        v = v * dv
        v /= v.sum()
        new = float(v @ d @ v)
        if record:
            history.append(new)
        if (new - value) < REL_IMPROVEMENT_TOL * abs(value):
            quiet += 1
        else:
            quiet = 0
        value = max(value, new)
        if quiet >= PLATEAU_ITERS:
            return v, value, it, True, history
    return v, value, it, False, history


def maximize_weights(ns, atoms, restarts=8, max_iters=20000, seed=0, record_history=False):
    """Best weights on fixed atoms, from the uniform start and ``restarts`` Dirichlet(1) starts."""
    pts = _check_atoms(ns, atoms)
    if isinstance(restarts, bool) or int(restarts) != restarts or restarts < 1:
        raise InputError(f"restarts must be a positive integer, got {restarts!r}")
    k = len(pts)
    if k == 1:
        return _finish(ns, pts, [1.0], 0, 0, True)
    d = distance_matrix(ns, pts)
    rng = _rng(seed)
    starts = [np.full(k, 1.0 / k)] + [rng.dirichlet(np.ones(k)) for _ in range(int(restarts))]
    best = None
    for start in starts:
        run = replicator_ascent(d, start, max_iters, record_history)
        if best is None or run[1] > best[1]:
            best = run
    v, _, iters, converged, history = best
    return _finish(ns, pts, v, iters, len(starts), converged, history)


@functools.lru_cache(maxsize=None)
def compositions(total, parts):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    if parts == 2:
        first = np.arange(total + 1, dtype=np.int64)
        return np.stack([first, total - first], axis=1)
    blocks = []
    for first in range(total + 1):
        rest = compositions(total - first, parts - 1)
        blocks.append(np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def brute_force_weights(ns, atoms, resolution=100):
    """Exhaustive maximum of v^T D v over the simplex grid with spacing 1/resolution."""
    pts = _check_atoms(ns, atoms)
    k = len(pts)
    if k > MAX_BRUTE_ATOMS:
        raise InputError(f"brute force supports at most {MAX_BRUTE_ATOMS} atoms, got {k}")
    if isinstance(resolution, bool) or int(resolution) != resolution or not 1 <= resolution <= MAX_BRUTE_RESOLUTION:
        raise InputError(f"resolution must be an integer in [1, {MAX_BRUTE_RESOLUTION}]")
    m = int(resolution)
    d = distance_matrix(ns, pts)
    best_val = -1.0
    best_c = None
    count = 0
    for first in range(m + 1):
        rest = compositions(m - first, k - 1) if k > 1 else np.zeros((1, 0), dtype=np.int64)
        if k == 1 and first != m:
            continue
        c = np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest]).astype(float)
        vals = ((c @ d) * c).sum(axis=1)
        count += len(c)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_c = vals[i], c[i]
    return _finish(ns, pts, best_c / m, count, 0, True)


def perturb_atoms(ns, start, rounds, step, seed, restarts=4, max_iters=5000):
    """Random coordinate moves on the atoms, keeping a move when it raises the optimum.

    Proposals leaving K are pulled back radially. Weights are re-optimized
    after every move.
    """
    if isinstance(rounds, bool) or int(rounds) != rounds or rounds < 1:
        raise InputError(f"rounds must be a positive integer, got {rounds!r}")
    if not 0.0 < step <= 1.0:
        raise InputError(f"step must lie in (0, 1], got {step!r}")
    atoms = _check_atoms(ns, start.atoms).copy()
    rng = _rng(seed)
    best = maximize_weights(ns, atoms, restarts, max_iters, seed)
    accepted = 0
    for _ in range(int(rounds)):
        i = rng.integers(len(atoms))
        j = rng.integers(ns.dim)
        prop = atoms.copy()
        prop[i, j] += step * rng.uniform(-1.0, 1.0)
        g = norm_eval(ns, prop[i])
        if g > 1.0:
            prop[i] /= g
        res = maximize_weights(ns, prop, restarts, max_iters, seed)
        if res.best_value > best.best_value:
            atoms, best = prop, res
            accepted += 1
    return OptimizationResult(ns, best.best_measure, best.best_value, int(rounds),
                               best.restarts_used, best.converged)


def conjecture_violated(result, tol=1e-9):
    return result.gap_to_conjecture < -tol


def dump_counterexample(result, directory):
    """Write a result that beats 2(1 - 2^-n) to ``directory`` as JSON; returns the path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(result.to_dict(), sort_keys=True, indent=2)
    tag = abs(hash(payload)) % 10**8
    path = directory / f"counterexample_n{result.norm.dim}_{tag:08d}.json"
    path.write_text(payload + "\n")
    return path
