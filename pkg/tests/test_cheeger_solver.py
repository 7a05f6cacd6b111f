import math

import numpy as np
import pytest

from config import DEFAULT_SETTINGS
from utils.cantor_domain import build_omega_eps
from utils.cheeger_solver import (CheegerConfig, connected_components, minimality_gap, ratio_of,
                                  reflection_mismatch, solve_cheeger, total_variation,
                                  volume_lower_bound_ok)
from utils.domain_spec import plain_disk
from utils.errors import DegenerateThresholdError, InvalidInputError
from utils.geom_core import Point2
from utils.porous_domain import porous_measures
from utils.raster import RasterField, rasterize, rasterize_function
from utils.verification_suite import check_density_estimate

BOX = (-1.0, 1.0, -1.0, 1.0)


def _dumbbell(x, y):
    big = (x + 0.45) ** 2 + y ** 2 < 0.35 ** 2
    small = (x - 0.55) ** 2 + y ** 2 < 0.2 ** 2
    neck = (np.abs(y) < 0.02) & (x > -0.45) & (x < 0.55)
    return big | small | neck



class TestConfig:
    def test_defaults(self):
        cfg = CheegerConfig()
        assert cfg.thresholds.size == 17
        assert cfg.thresholds[0] == pytest.approx(0.1)
        assert cfg.thresholds[-1] == pytest.approx(0.9)

    def test_fixed_policy(self):
        cfg = CheegerConfig(threshold_policy='fixed', fixed_threshold=0.4)
        assert cfg.thresholds.tolist() == [0.4]

    @pytest.mark.parametrize("kwargs", [
        {'outer_tol': 0.0},
        {'scan_range': (0.0, 0.9)},
        {'fixed_threshold': 1.0},
        {'threshold_policy': 'median'},
        {'seed_policy': 'warm_start'},
        {'inner_iters': 10, 'max_inner_iters': 5},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInputError):
            CheegerConfig(**kwargs)

    def test_no_ratio_bias_by_default(self):
        assert CheegerConfig().ratio_bias == 0.0
        assert DEFAULT_SETTINGS['solver']['ratio_bias'] == 0.0


class TestRatio:
    def test_disk_ratio(self):
        field = rasterize_function(lambda x, y: x ** 2 + y ** 2 < 0.25, BOX, 256)
        _, _, ratio = ratio_of(field, 0.5)
        assert ratio == pytest.approx(4.0, rel=1e-2)

    def test_thin_rectangle_diverges(self):
        def rect(w):
            return rasterize_function(lambda x, y: (np.abs(x) < 0.5) & (np.abs(y) < w / 2), BOX, 256)
        wide = ratio_of(rect(0.2), 0.5)[2]
        thin = ratio_of(rect(0.05), 0.5)[2]
        assert thin > 2.5 * wide
        assert thin == pytest.approx(2 / 0.05 + 2, rel=0.2)

    def test_empty_set(self):
        values = np.zeros((8, 8))
        field = RasterField(8, 8, 0.1, Point2(0.0, 0.0), values, values > 0)
        with pytest.raises(DegenerateThresholdError):
            ratio_of(field, 0.5)

    def test_total_variation_of_step(self):
        u = np.zeros((4, 4))
        u[:, 2:] = 1.0
        assert total_variation(u) == pytest.approx(4.0)


class TestSolveDisk:
    def test_constant_close_to_two(self, disk_result):
        assert disk_result.converged
        assert disk_result.h_estimate == pytest.approx(2.0, abs=0.06)
        assert disk_result.h_estimate == disk_result.history[-1][0]
        assert disk_result.ratio >= disk_result.h_estimate - CheegerConfig().outer_tol

    def test_indicator_inside_mask(self, disk_result):
        assert not np.any(disk_result.indicator.values[~disk_result.domain.mask])

    def test_disk_is_self_cheeger(self, disk_result):
        assert minimality_gap(disk_result) < 0.05
        assert volume_lower_bound_ok(disk_result)
        assert connected_components(disk_result) == 1
        assert reflection_mismatch(disk_result).within_band

    def test_to_dict(self, disk_result):
        data = disk_result.to_dict()
        assert data['grid']['nx'] == 128
        assert len(data['history']) == len(disk_result.history)
        assert all(len(entry) == 4 for entry in data['history'])

    def test_scale_covariance(self, disk_result):
        half = solve_cheeger(rasterize(plain_disk(radius=0.5), 128))
        assert half.h_estimate == pytest.approx(2 * disk_result.h_estimate, rel=0.02)

    def test_monotone_under_inclusion(self, disk_result):
        outer = rasterize_function(lambda x, y: x ** 2 + y ** 2 < 1.0, BOX, 128)
        inner = rasterize_function(lambda x, y: x ** 2 + y ** 2 < 0.64, BOX, 128)
        h_outer = solve_cheeger(outer).h_estimate
        h_inner = solve_cheeger(inner).h_estimate
        assert h_inner >= h_outer - 2 * CheegerConfig().outer_tol

    def test_warm_start(self, disk_result):
        field = disk_result.domain
        cfg = CheegerConfig(seed_policy='warm_start', warm_start=disk_result.indicator.values)
        warm = solve_cheeger(field, cfg)
        assert warm.h_estimate == pytest.approx(disk_result.h_estimate, abs=0.02)

    def test_warm_start_shape_checked(self, disk_result):
        cfg = CheegerConfig(seed_policy='warm_start', warm_start=np.ones((4, 4)))
        with pytest.raises(InvalidInputError):
            solve_cheeger(disk_result.domain, cfg)


def test_empty_mask_rejected():
    values = np.zeros((64, 64))
    field = RasterField(64, 64, 0.1, Point2(0.0, 0.0), values, values > 0)
    with pytest.raises(InvalidInputError):
        solve_cheeger(field)


def test_dumbbell_is_not_self_cheeger():
    field = rasterize_function(_dumbbell, BOX, 128)
    result = solve_cheeger(field)
    assert minimality_gap(result) > 0.15
    xs, _ = field.pixel_centers()
    kept = result.indicator.values >= 0.5
    assert xs[kept].mean() < 0.0


def test_non_convergence_reported():
    cfg = CheegerConfig(max_outer=1, inner_iters=1, max_inner_iters=1, outer_tol=1e-12)
    field = rasterize_function(_dumbbell, BOX, 64)
    result = solve_cheeger(field, cfg)
    assert not result.converged
    assert len(result.history) == 1


def test_history_keeps_best_iterate():
    field = rasterize_function(lambda x, y: (np.abs(x) < 0.5) & (np.abs(y) < 0.5),
                               (-0.5, 0.5, -0.5, 0.5), 128)
    result = solve_cheeger(field)
    hs = [entry[0] for entry in result.history]
    assert all(a >= b for a, b in zip(hs, hs[1:]))
    assert result.h_estimate == min(hs) == hs[-1]
    assert result.ratio == result.h_estimate
    assert ratio_of(result.indicator, 0.5, smoothing=CheegerConfig().smoothing)[2] == pytest.approx(
        result.h_estimate, rel=1e-9)
    assert result.h_estimate == pytest.approx(2 + math.sqrt(math.pi), abs=0.1)


@pytest.mark.slow
def test_unit_disk_fine_grid():
    result = solve_cheeger(rasterize(plain_disk(), 1024))
    assert result.h_estimate == pytest.approx(2.0, abs=0.02)


@pytest.mark.slow
def test_unit_square_fine_grid():
    field = rasterize_function(lambda x, y: (np.abs(x) < 0.5) & (np.abs(y) < 0.5),
                               (-0.5, 0.5, -0.5, 0.5), 1024)
    result = solve_cheeger(field)
    assert result.h_estimate == pytest.approx(2 + math.sqrt(math.pi), abs=0.04)


@pytest.mark.slow
def test_omega_eps_bounds():
    eps = 1 / 25
    result = solve_cheeger(rasterize(build_omega_eps(eps, 12), 1024))
    assert 2 - 0.02 < result.h_estimate <= 2 / (1 - eps) + 0.02
    assert connected_components(result) == 1
    assert reflection_mismatch(result).within_band
    assert minimality_gap(result) <= 0.02


@pytest.mark.slow
def test_omega0_fine_grid(omega0):
    result = solve_cheeger(rasterize(omega0, 1024))
    delta = porous_measures(omega0, None, 12).delta
    assert 2 - 0.02 <= result.h_estimate <= 2 * (1 + delta) + 0.02
    assert minimality_gap(result) <= 0.02


@pytest.mark.slow
def test_omega_eps_density_estimate():
    spec = build_omega_eps(1 / 25, 12)
    result = solve_cheeger(rasterize(spec, 1024))
    report = check_density_estimate(result, spec, trials=200, rng_seed=0)
    assert report.trials > 0
    assert report.violations == 0
