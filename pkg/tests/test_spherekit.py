import math
import threading
import time

import numpy as np
import pytest

from puncvol import constants
from puncvol.base import ConfigurationError, DegeneratePointError, DomainError, worker_count
from puncvol.spherekit import (GridSpec, QuadratureGrid, adapted_frame, build_grid, geodesic_distance,
                               integrate, mc_sample, parallel_frame, quad_parallel, quad_sliced,
                               quad_sphere, sphere_point, sphere_volume, tangent_basis,
                               tangent_project)

seed = 11
rng = np.random.default_rng(seed)


def random_points(count, d):
    g = rng.standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@pytest.mark.parametrize('m,expected', [
    (1, 2 * math.pi),
    (2, 4 * math.pi),
    (3, 2 * math.pi ** 2),
    (4, 8 * math.pi ** 2 / 3),
    (5, math.pi ** 3),
])
def test_sphere_volume(m, expected):
    assert np.isclose(sphere_volume(m), expected, rtol=1e-14)


def test_sphere_volume_rejects_zero():
    with pytest.raises(DomainError):
        sphere_volume(0)


def test_sphere_point():
    with pytest.raises(DomainError):
        sphere_point([1.0, 1.0])
    assert np.allclose(sphere_point([3.0, 4.0], normalize=True), [0.6, 0.8])


def test_geodesic_distance():
    x = np.array([1.0, 0.0, 0.0])
    assert np.isclose(geodesic_distance(x, -x), math.pi)
    assert np.isclose(geodesic_distance(x, [0.0, 1.0, 0.0]), math.pi / 2)
    assert geodesic_distance(x, x) == 0.0


@pytest.mark.parametrize('d', [3, 4, 6])
def test_tangent_basis_is_oriented(d):
    x = random_points(50, d)
    B = tangent_basis(x)
    frame = np.concatenate([x[:, :, None], B], axis=-1)
    gram = np.einsum('kij,kil->kjl', frame, frame)
    assert np.allclose(gram, np.eye(d), atol=1e-12)
    assert np.allclose(np.linalg.det(frame), 1.0)


@pytest.mark.parametrize('m,resolution', [(2, [8, 16]), (3, [8, 8, 16]), (5, [4, 4, 4, 4, 8])])
def test_product_weights_sum_to_volume(m, resolution):
    grid = quad_sphere(m, GridSpec('product', resolution=resolution))
    assert np.isclose(grid.weights.sum(), sphere_volume(m), rtol=1e-12)
    assert np.allclose(np.linalg.norm(grid.nodes, axis=1), 1.0)


def test_product_grid_integrates_polynomials():
    g2 = quad_sphere(2, GridSpec('product', resolution=[6, 12]))
    assert np.isclose(integrate(g2, lambda x: x[:, 0] ** 2).value, 4 * math.pi / 3, rtol=1e-12)
    g3 = quad_sphere(3, GridSpec('product', resolution=[6, 6, 12]))
    value = integrate(g3, lambda x: x[:, 0] ** 2 * x[:, 3] ** 2).value
    assert np.isclose(value, 2 * math.pi ** 2 / 24, rtol=1e-12)
    assert abs(integrate(g3, lambda x: x[:, 1] * x[:, 2] ** 3).value) < 1e-13


def test_product_grid_wrong_dimension():
    with pytest.raises(ConfigurationError):
        quad_sphere(3, GridSpec('product', resolution=[8, 8]))


@pytest.mark.parametrize('theta', [-1.0, 0.0, 0.6])
def test_parallel_measure(theta):
    pole = np.array([0.0, 0.0, 0.0, 1.0])
    grid = quad_parallel(pole, theta, GridSpec('parallel', resolution=[8, 16]))
    assert np.isclose(grid.weights.sum(), 4 * math.pi * math.cos(theta) ** 2, rtol=1e-12)
    assert np.allclose(grid.nodes @ pole, math.sin(theta))
    assert grid.manifold_dim == 2 and grid.ambient_dim == 4


def test_parallel_rejects_pole_latitude():
    with pytest.raises(DomainError):
        quad_parallel([0.0, 0.0, 0.0, 1.0], math.pi / 2, GridSpec('parallel', resolution=[4, 8]))


def test_sliced_grid():
    pole = sphere_point([1.0, 1.0, 0.0, 0.0], normalize=True)
    grid = quad_sliced(pole, GridSpec('sliced', slices=12, parallel=[8, 16]))
    assert np.isclose(grid.weights.sum(), sphere_volume(3), rtol=1e-10)
    assert np.min(geodesic_distance(grid.nodes, pole)) > 1e-3
    assert np.min(geodesic_distance(grid.nodes, -pole)) > 1e-3
    assert np.isclose(integrate(grid, lambda x: (x @ pole) ** 2).value, sphere_volume(3) / 4, rtol=1e-10)


def test_sliced_grid_needs_odd_sphere():
    with pytest.raises(ConfigurationError):
        build_grid(GridSpec('sliced', slices=4, parallel=[4]), 2)


def test_grid_spec_round_trip():
    config = {'kind': 'sliced', 'slices': 40, 'parallel': [24, 24, 24, 48], 'seed': None}
    spec = GridSpec.from_dict(config)
    assert spec.to_dict() == config
    assert spec.halved().to_dict()['parallel'] == [12, 12, 12, 24]
    assert GridSpec('product', resolution=[3]).halved().resolution == (1,)


def test_grid_spec_errors():
    with pytest.raises(ConfigurationError):
        GridSpec.from_dict({'resolution': [4, 4]})
    with pytest.raises(ConfigurationError):
        GridSpec.from_dict({'kind': 'product', 'resolution': [4, 4], 'order': 3})
    with pytest.raises(ConfigurationError):
        GridSpec('lebedev')
    with pytest.raises(DomainError):
        GridSpec('product', resolution=[4, 0])
    with pytest.raises(DomainError):
        GridSpec('monte-carlo', count=0)


def test_monte_carlo_is_reproducible():
    a = mc_sample(3, 1000, seed=5)
    b = mc_sample(3, 1000, seed=5)
    assert np.array_equal(a.nodes, b.nodes)
    assert np.array_equal(a.chunk(400, 1000)[0], a.nodes[400:])
    assert np.allclose(a.weights, sphere_volume(3) / 1000)
    assert a.describe()['seed'] == 5


def test_monte_carlo_blocks_regenerate_independently():
    count = constants.mc_block + 500
    grid = mc_sample(2, count, seed=3)
    nodes = grid.nodes
    start, stop = constants.mc_block - 100, constants.mc_block + 100
    assert np.array_equal(grid.chunk(start, stop)[0], nodes[start:stop])


def test_monte_carlo_draws_seed():
    grid = mc_sample(2, 10)
    assert isinstance(grid.seed, int)
    assert np.array_equal(mc_sample(2, 10, seed=grid.seed).nodes, grid.nodes)


def test_monte_carlo_stderr():
    grid = mc_sample(2, 20000, seed=1)
    result = integrate(grid, lambda x: x[:, 0] ** 2)
    assert result.stderr is not None and result.stderr > 0
    assert abs(result.value - 4 * math.pi / 3) < 5 * result.stderr


def test_integrate_does_not_depend_on_workers():
    grid = quad_sphere(3, GridSpec('product', resolution=[64, 64, 64]))
    func = lambda x: np.exp(x[:, 0]) * x[:, 2] ** 2
    assert integrate(grid, func, workers=1).value == integrate(grid, func, workers=4).value


def test_threaded_integration_keeps_few_chunks_alive():
    lock = threading.Lock()
    live = {'now': 0, 'peak': 0}

    def generate(start, stop):
        with lock:
            live['now'] += 1
            live['peak'] = max(live['peak'], live['now'])
        return np.ones((stop - start, 2)), np.ones(stop - start)

    def func(x):
        time.sleep(0.001)
        with lock:
            live['now'] -= 1
        return x[:, 0]

    grid = QuadratureGrid('product', 1, 2, 128 * 8, GridSpec('product', resolution=[128 * 8]),
                          _generate=generate, _chunk=8)
    assert integrate(grid, func, workers=2).value == 128 * 8
    assert live['now'] == 0
    assert live['peak'] <= 4


def test_worker_count(monkeypatch):
    monkeypatch.delenv('PUNCVOL_THREADS', raising=False)
    assert worker_count() == 1
    monkeypatch.setenv('PUNCVOL_THREADS', '3')
    assert worker_count() == 3
    monkeypatch.setenv('PUNCVOL_THREADS', 'many')
    with pytest.warns(UserWarning):
        assert worker_count() == 1


def test_parallel_frame():
    pole = np.array([0.0, 0.0, 0.0, 1.0])
    x = random_points(40, 4)
    N, basis = parallel_frame(x, pole)
    assert np.allclose(basis[..., -1], N)
    assert np.all(np.sum(N * pole, axis=-1) > 0)
    frame = np.concatenate([x[:, :, None], basis], axis=-1)
    assert np.allclose(np.linalg.det(frame), 1.0)
    with pytest.raises(DegeneratePointError):
        parallel_frame(pole, pole)


@pytest.mark.parametrize('d', [4, 6])
def test_adapted_frame_invariants(d):
    x = random_points(60, d)
    pole = np.eye(d)[-1]
    v = tangent_project(x, rng.standard_normal((60, d)))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    frame = adapted_frame(x, pole, v)
    E = frame.e
    assert np.allclose(np.einsum('kij,kil->kjl', E, E), np.eye(d - 1), atol=1e-12)
    assert np.allclose(np.einsum('ki,kij->kj', x, E), 0.0, atol=1e-12)
    assert np.allclose(frame.v, v)
    assert np.allclose(np.linalg.det(np.concatenate([x[:, :, None], E], axis=-1)), 1.0)
    assert np.all(frame.orientation == -1)
    N, _ = parallel_frame(x, pole)
    assert np.allclose(np.sin(frame.alpha), np.sum(v * N, axis=-1))
    # e_1..e_{2n-1} and u are tangent to the parallel
    tangent = np.concatenate([E[..., :-2], frame.u[..., None]], axis=-1)
    assert np.allclose(np.einsum('ki,kij->kj', N, tangent), 0.0, atol=1e-10)


def test_adapted_frame_degenerate_case():
    pole = np.array([0.0, 0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0, 0.0])
    N, _ = parallel_frame(x, pole)
    frame = adapted_frame(x, pole, -N)
    assert frame.degenerate
    assert np.isclose(np.sin(frame.alpha), -1.0)
    assert np.isclose(np.linalg.det(np.column_stack([x, frame.e])), 1.0)
