import math

import numpy as np
import pytest

from puncvol import bounds
from puncvol.base import ConfigurationError, DegeneratePointError, DomainError
from puncvol.fields import VectorFieldSpec, field_frame
from puncvol.functionals import (bcn_density, bcn_integral, convergence, flux_density, parallel_flux,
                                 pole_limit, singularity_fluxes, stokes_scan, volume, volume_grid,
                                 volume_integrand)
from puncvol.spherekit import GridSpec, build_grid, geodesic_distance, mc_sample, sphere_volume
from puncvol.topology import field_index

seed = 5
rng = np.random.default_rng(seed)

small_sliced = GridSpec('sliced', slices=8, parallel=[8, 16])
parallel_grid = GridSpec('parallel', resolution=[32, 64])


def random_points(count, d, pole, margin=0.2):
    out = []
    while len(out) < count:
        x = rng.standard_normal(d)
        x /= np.linalg.norm(x)
        if min(geodesic_distance(x, pole), geodesic_distance(x, -pole)) > margin:
            out.append(x)
    return np.array(out)


# ═══════════════════════════════════════════════════════════════════
#  Volume
# ═══════════════════════════════════════════════════════════════════

@pytest.mark.parametrize('n,resolution', [(1, [8, 8, 8]), (2, [4, 4, 4, 4, 8])])
def test_hopf_volume(n, resolution):
    f = VectorFieldSpec('hopf', n)
    est = volume(f, build_grid(GridSpec('product', resolution=resolution), 2 * n + 1))
    assert np.isclose(est.normalized, 2.0 ** n, rtol=1e-10)
    assert est.error < 1e-9


@pytest.mark.parametrize('n', [1, 2])
def test_radial_volume(n):
    f = VectorFieldSpec('radial', n)
    spec = small_sliced if n == 1 else GridSpec('sliced', slices=8, parallel=[4, 4, 4, 8])
    est = volume(f, build_grid(spec, 2 * n + 1, pole=f.pole))
    assert np.isclose(est.normalized, bounds.closed_volumes(n)['radial'], rtol=1e-9)
    assert np.isclose(est.value, bounds.radial_volume(n), rtol=1e-9)


@pytest.mark.slow
def test_radial_volume_default_grid_s5():
    est = volume(VectorFieldSpec('radial', 2))
    assert np.isclose(est.normalized, 8.0 / 3.0, rtol=1e-8)


def test_volume_record_fields():
    f = VectorFieldSpec('radial', 1)
    est = volume(f, build_grid(small_sliced, 3, pole=f.pole))
    out = est.to_dict()
    assert out['grid']['kind'] == 'sliced'
    assert out['field']['kind'] == 'radial'
    assert out['nodes'] == 8 * 8 * 16
    assert out['seed'] is None


def test_monte_carlo_refused_for_unbounded_fields():
    with pytest.raises(ConfigurationError):
        volume(VectorFieldSpec('radial', 1), mc_sample(3, 100, seed=1))


def test_monte_carlo_volume_of_bounded_field():
    est = volume(VectorFieldSpec('hopf', 1), mc_sample(3, 1000, seed=2))
    assert np.isclose(est.normalized, 2.0, rtol=1e-10)
    assert est.seed == 2


def test_grid_for_other_sphere():
    with pytest.raises(ConfigurationError):
        volume(VectorFieldSpec('hopf', 1), build_grid(GridSpec('product', resolution=[4, 4, 4, 4, 8]), 5))


def test_product_grid_on_singular_field_warns():
    f = VectorFieldSpec('radial', 1)
    with pytest.warns(UserWarning):
        volume(f, build_grid(GridSpec('product', resolution=[8, 8, 8]), 3), refine=False)


def test_default_volume_grids():
    assert volume_grid(VectorFieldSpec('hopf', 1)).kind == 'product'
    grid = volume_grid(VectorFieldSpec('power', 1, d=2))
    assert grid.kind == 'sliced'
    assert np.allclose(grid.pole, [0.0, 0.0, 0.0, 1.0])


def test_perturbed_hopf_volume_exceeds_smooth_bound():
    f = VectorFieldSpec('perturbed-hopf', 1, eps=0.3, seed=1)
    grid = build_grid(GridSpec('product', resolution=[12, 12, 24]), 3)
    est = volume(f, grid)
    lower = bcn_integral(f, grid)
    assert est.value >= lower.value
    assert est.normalized > float(bounds.bcn_ratio(1))


@pytest.mark.parametrize('kind', ['radial', 'power', 'perturbed-hopf'])
def test_bcn_density_below_integrand(kind):
    f = VectorFieldSpec(kind, 1, d=2)
    x = random_points(40, 4, f.pole)
    assert np.all(bcn_density(f, x) <= volume_integrand(f, x) * (1 + 1e-7))


@pytest.mark.parametrize('kind', ['hopf', 'radial'])
def test_volume_integrand_is_frame_free(kind):
    f = VectorFieldSpec(kind, 2)
    x = random_points(30, 6, f.pole)
    free = volume_integrand(f, x)
    framed = volume_integrand(f, x, frame=field_frame(f, x))
    minors = volume_integrand(f, x, frame=field_frame(f, x), method='minors')
    assert np.allclose(free, framed, rtol=1e-10)
    assert np.allclose(free, minors, rtol=1e-10)


def test_convergence_levels():
    rows = convergence(VectorFieldSpec('radial', 1), levels=2)
    assert [r['level'] for r in rows] == [0, 1]
    assert rows[0]['delta'] is None
    assert rows[1]['grid']['slices'] == 48
    assert rows[0]['nodes'] < rows[1]['nodes']
    assert np.isclose(rows[1]['normalized'], 2.0, rtol=1e-9)
    with pytest.raises(DomainError):
        convergence(VectorFieldSpec('hopf', 1), levels=0)


# ═══════════════════════════════════════════════════════════════════
#  Flux through parallels
# ═══════════════════════════════════════════════════════════════════

@pytest.mark.parametrize('theta', [-1.0, 0.0, 0.9])
def test_radial_flux(theta):
    f = VectorFieldSpec('radial', 1)
    assert np.isclose(parallel_flux(f, f.pole, theta, parallel_grid), 2.0, atol=1e-9)


def test_radial_flux_s5():
    f = VectorFieldSpec('radial', 2)
    grid = GridSpec('parallel', resolution=[6, 6, 6, 12])
    assert np.isclose(parallel_flux(f, f.pole, 0.3, grid), 2.0, atol=1e-9)


@pytest.mark.parametrize('n,resolution', [(1, [32, 64]), (2, [10, 10, 10, 20])])
def test_hopf_flux_vanishes(n, resolution):
    f = VectorFieldSpec('hopf', n)
    pole = np.eye(2 * n + 2)[-1]
    flux = parallel_flux(f, pole, 0.2, GridSpec('parallel', resolution=resolution))
    assert abs(flux) < 1e-6


def test_power_flux_counts_index():
    f = VectorFieldSpec('power', 1, d=2)
    assert np.isclose(parallel_flux(f, f.pole, 0.0, parallel_grid), 4.0, atol=1e-3)


def test_flux_density_degenerates_at_pole():
    f = VectorFieldSpec('hopf', 1)
    with pytest.raises(DegeneratePointError):
        flux_density(f, f.pole, f.pole)


def test_stokes_scan_radial():
    f = VectorFieldSpec('radial', 1)
    scan = stokes_scan(f, f.pole, [0.5, -0.5, 0.0], parallel_grid)
    assert scan.thetas == (-0.5, 0.0, 0.5)
    assert scan.deviation < 1e-9
    assert np.isclose(scan.north.limit, 2.0, atol=1e-8)
    assert np.isclose(scan.north.index_estimate, 1.0, atol=1e-8)
    assert np.isclose(scan.south.limit, 2.0, atol=1e-8)
    assert np.isclose(scan.south.local_limit, -2.0, atol=1e-8)
    assert np.isclose(scan.south.index_estimate, -1.0, atol=1e-8)
    assert np.allclose(scan.south.point, -f.pole)
    assert scan.rows()[0] == (-0.5, scan.fluxes[0])
    out = scan.to_dict()
    assert out['north']['index_estimate'] == scan.north.index_estimate


def test_stokes_scan_power():
    f = VectorFieldSpec('power', 1, d=2)
    scan = stokes_scan(f, f.pole, [-0.6, 0.6], parallel_grid)
    assert scan.deviation < 1e-3
    assert np.isclose(scan.north.index_estimate, 2.0, atol=1e-2)
    assert np.isclose(scan.south.index_estimate, -2.0, atol=1e-2)


def test_stokes_scan_rejects_bad_latitudes():
    f = VectorFieldSpec('radial', 1)
    with pytest.raises(DomainError):
        stokes_scan(f, f.pole, [0.1], parallel_grid)
    with pytest.raises(DomainError):
        stokes_scan(f, f.pole, [0.1, 0.1], parallel_grid)
    with pytest.raises(DomainError):
        stokes_scan(f, f.pole, [0.1, math.pi / 2], parallel_grid, limits=False)
    with pytest.raises(ConfigurationError):
        stokes_scan(f, f.pole, [0.1, 0.2], GridSpec('product', resolution=[4, 8]))


def test_pole_limit_end():
    f = VectorFieldSpec('radial', 1)
    with pytest.raises(DomainError):
        pole_limit(f, f.pole, end='east')


def test_singularity_fluxes():
    f = VectorFieldSpec('radial', 1)
    north, south = singularity_fluxes(f, f.singular_points(), grid=parallel_grid)
    assert north.radius == 0.2
    assert np.isclose(north.flux, 2.0, atol=1e-9)
    assert np.isclose(south.flux, -2.0, atol=1e-9)
    assert np.isclose(south.index_estimate, -1.0, atol=1e-9)
    with pytest.raises(ConfigurationError):
        singularity_fluxes(f, f.singular_points(), radius=2.0, grid=parallel_grid)


def test_hopf_integrand_is_constant():
    for n in (1, 2):
        f = VectorFieldSpec('hopf', n)
        x = random_points(20, 2 * n + 2, f.pole)
        assert np.allclose(volume_integrand(f, x), 2.0 ** n, rtol=1e-10)


def test_radial_flux_density_on_equator():
    f = VectorFieldSpec('radial', 1)
    x = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.isclose(flux_density(f, x, f.pole), 2.0 / sphere_volume(2), rtol=1e-6)


@pytest.mark.parametrize('d', [1, 2, 3])
def test_power_pole_limits_match_index(d):
    f = VectorFieldSpec('power', 1, d=d)
    north = pole_limit(f, f.pole, 'north', parallel_grid)
    south = pole_limit(f, f.pole, 'south', parallel_grid)
    assert np.isclose(north.local_limit, 2.0 * d, atol=2e-2)
    assert np.isclose(north.index_estimate + south.index_estimate, 0.0, atol=2e-2)
    assert round(north.index_estimate) == field_index(f, f.pole, radius=0.1).index
    assert round(south.index_estimate) == field_index(f, -f.pole, radius=0.1).index


def random_adapted_frame(f, x):
    E = field_frame(f, x)
    m = 2 * f.n
    R, _ = np.linalg.qr(rng.standard_normal((m, m)))
    return np.concatenate([E[..., :m] @ R, E[..., m:]], axis=-1)


@pytest.mark.parametrize('kind', ['hopf', 'radial', 'power', 'perturbed-hopf'])
def test_volume_integrand_in_random_adapted_frames(kind):
    f = VectorFieldSpec(kind, 1, d=2)
    x = random_points(20, 4, f.pole)
    free = volume_integrand(f, x)
    for _ in range(10):
        framed = volume_integrand(f, x, frame=random_adapted_frame(f, x))
        assert np.allclose(framed, free, rtol=1e-9)


@pytest.mark.parametrize('kind,flux,tol', [
    ('hopf', 0.0, 1e-6),
    ('radial', 2.0, 1e-8),
    ('power', 4.0, 1e-4),
    ('perturbed-hopf', 0.0, 1e-4),
])
def test_stokes_scan_over_seven_latitudes(kind, flux, tol):
    f = VectorFieldSpec(kind, 1, d=2)
    scan = stokes_scan(f, f.pole, np.linspace(-1.2, 1.2, 7), parallel_grid, limits=False)
    assert len(scan.fluxes) == 7
    assert scan.deviation < tol
    assert np.allclose(scan.fluxes, flux, atol=tol)


def certified_indices(f):
    return [field_index(f, f.pole, radius=0.1).index, field_index(f, -f.pole, radius=0.1).index]


def test_radial_volume_meets_corollary_bound():
    f = VectorFieldSpec('radial', 1)
    est = volume(f, build_grid(small_sliced, 3, pole=f.pole))
    indices = certified_indices(f)
    assert indices == [1, -1]
    bound = bounds.corollary_bound(1, *indices)
    assert abs(est.value - bound) <= 5e-3 * bound
    report = bounds.bound_report(1, indices, volume=est.value, error=max(est.error, 1e-9))
    assert all(entry['satisfied'] for entry in report.bounds.values())


def test_power_volume_meets_index_bounds():
    f = VectorFieldSpec('power', 1, d=2)
    est = volume(f, build_grid(GridSpec('sliced', slices=16, parallel=[16, 32]), 3, pole=f.pole))
    indices = certified_indices(f)
    assert indices == [2, -2]
    assert est.value >= bounds.thmA_bound(1, *indices)
    assert est.value >= bounds.thmB_bound(1, indices)
    report = bounds.bound_report(1, indices, volume=est.value, error=est.error).to_dict()
    assert all(entry['satisfied'] for entry in report['bounds'].values())


@pytest.mark.slow
def test_power_volume_default_grid():
    f = VectorFieldSpec('power', 1, d=2)
    est = volume(f)
    assert np.isclose(est.value, 93.95, rtol=1e-3)
    report = bounds.bound_report(1, certified_indices(f), volume=est.value, error=est.error)
    assert all(entry['satisfied'] for entry in report.bounds.values())
