import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_ball_points, random_norm
from selfdist.delta import delta_discrete
from selfdist.errors import InputError
from selfdist.measures import DiscreteMeasure, sign_vectors
from selfdist.norms import NormSpec, distance_matrix, in_unit_ball
from selfdist.optimize import (
    OptimizationResult,
    brute_force_weights,
    compositions,
    conjecture_violated,
    dump_counterexample,
    maximize_weights,
    perturb_atoms,
    replicator_ascent,
)

LINF2 = NormSpec.linf(2)


def test_cube_vertices():
    res = maximize_weights(LINF2, sign_vectors(2), seed=5)
    assert res.best_value == pytest.approx(1.5, abs=1e-12)
    np.testing.assert_allclose(res.best_measure.weights, 0.25, atol=1e-6)
    assert res.gap_to_conjecture == pytest.approx(0, abs=1e-12)


def test_single_atom():
    assert maximize_weights(NormSpec.lp(3, 2), [[0.1, 0.2, 0.3]]).best_value == 0
    assert brute_force_weights(NormSpec.lp(3, 2), [[0.1, 0.2, 0.3]], 10).best_value == 0


def test_drops_interior_atom():
    atoms = [[1, 1], [-1, -1], [0, 0]]
    res = maximize_weights(LINF2, atoms, seed=0)
    assert res.best_value == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(res.best_measure.weights, [0.5, 0.5, 0], atol=1e-3)
    oracle = brute_force_weights(LINF2, atoms, 200)
    assert oracle.best_value == 1.0
    np.testing.assert_array_equal(oracle.best_measure.weights, [0.5, 0.5, 0])


def test_brute_force_examples():
    res = brute_force_weights(LINF2, sign_vectors(2), 100)
    assert res.best_value == 1.5
    np.testing.assert_array_equal(res.best_measure.weights, [0.25] * 4)
    assert brute_force_weights(LINF2, [[1, 0], [-1, 0]], 100).best_value == 1.0
    with pytest.raises(InputError):
        brute_force_weights(LINF2, np.zeros((6, 2)) + np.arange(6)[:, None] / 10, 10)
    with pytest.raises(InputError):
        brute_force_weights(LINF2, [[0, 0]], 401)


def test_compositions():
    c = compositions(5, 3)
    assert len(c) == 21  # C(7, 2)
    assert np.all(c.sum(axis=1) == 5) and np.all(c >= 0)
    assert len({tuple(r) for r in c.tolist()}) == 21


def test_preconditions():
    with pytest.raises(InputError):
        maximize_weights(LINF2, [[2, 0]])
    with pytest.raises(InputError):
        maximize_weights(LINF2, np.zeros((0, 2)))
    with pytest.raises(InputError):
        maximize_weights(LINF2, [[0, 0]], restarts=0)
    start = DiscreteMeasure(sign_vectors(2), [0.25] * 4)
    with pytest.raises(InputError):
        perturb_atoms(LINF2, start, 0, 0.1, 1)
    with pytest.raises(InputError):
        perturb_atoms(LINF2, start, 5, 0.0, 1)


def test_determinism(rng):
    atoms = random_ball_points(rng, NormSpec.lp(3, 1.5), 7)
    a = maximize_weights(NormSpec.lp(3, 1.5), atoms, seed=9)
    b = maximize_weights(NormSpec.lp(3, 1.5), atoms, seed=9)
    assert a.best_value == b.best_value
    assert a.best_measure == b.best_measure


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_replicator_is_monotone(seed):
    rng = np.random.default_rng(seed)
    ns = random_norm(rng, int(rng.integers(2, 5)))
    pts = random_ball_points(rng, ns, int(rng.integers(2, 12)))
    d = distance_matrix(ns, pts)
    *_, history = replicator_ascent(d, rng.dirichlet(np.ones(len(pts))), 300, record=True)
    h = np.array(history)
    assert np.all(np.diff(h) >= -1e-14 * h[1:])


def test_result_revalidates_itself(rng):
    ns = NormSpec.lp(2, 3.0)
    res = maximize_weights(ns, random_ball_points(rng, ns, 9), seed=1)
    assert res.best_value == pytest.approx(delta_discrete(ns, res.best_measure).value, abs=1e-10)
    assert OptimizationResult.from_dict(json.loads(json.dumps(res.to_dict()))).to_dict() == res.to_dict()


def test_perturb_climbs_toward_vertices():
    start = DiscreteMeasure(0.9 * sign_vectors(2), [0.25] * 4)
    initial = maximize_weights(LINF2, start.atoms, 4, 5000, 3).best_value
    res = perturb_atoms(LINF2, start, 100, 0.1, seed=3)
    assert res.best_value > initial
    assert res.best_value <= 1.5 + 1e-9
    assert np.all(in_unit_ball(LINF2, res.best_measure.atoms))
    assert np.abs(res.best_measure.atoms).mean() > 0.9


def test_perturb_keeps_vertex_optimum():
    start = DiscreteMeasure(sign_vectors(2), [0.25] * 4)
    res = perturb_atoms(LINF2, start, 30, 0.2, seed=8)
    assert res.best_value == pytest.approx(1.5, abs=1e-9)


def test_counterexample_dump(tmp_path):
    res = maximize_weights(LINF2, sign_vectors(2))
    assert not conjecture_violated(res)
    path = dump_counterexample(res, tmp_path)
    assert json.loads(path.read_text())["best_value"] == 1.5
