import json

import numpy as np
import pytest

from utils.cantor_domain import build_omega_eps
from utils.domain_spec import SCHEMA_VERSION, DomainSpec, plain_disk
from utils.errors import ConfigError, InvalidInputError
from utils.geom_core import Disk, Point2


def test_plain_disk_contains_open_disk(unit_disk):
    inside = unit_disk.contains(np.array([0.0, 0.999, 1.0, 0.8]), np.array([0.0, 0.0, 0.0, 0.8]))
    assert inside.tolist() == [True, True, False, False]
    assert unit_disk.obstacle_count == 0


def test_holes_are_closed():
    spec = DomainSpec(obstacle_kind='holes', holes=[Disk(Point2(0.5, 0.0), 0.1)])
    assert not spec.contains_point(Point2(0.6, 0.0))
    assert spec.contains_point(Point2(0.61, 0.0))


def test_hole_outside_outer_disk_rejected():
    with pytest.raises(InvalidInputError):
        DomainSpec(obstacle_kind='holes', holes=[Disk(Point2(0.95, 0.0), 0.1)])


def test_inconsistent_kind_rejected():
    with pytest.raises(InvalidInputError):
        DomainSpec(obstacle_kind='none', holes=[Disk(Point2(0.0, 0.0), 0.1)])
    with pytest.raises(InvalidInputError):
        DomainSpec(obstacle_kind='cantor_bumps')
    with pytest.raises(InvalidInputError):
        DomainSpec(obstacle_kind='segments')


def test_empty_domain_contains_nothing():
    spec = DomainSpec(outer=None)
    assert not spec.contains(np.array([0.0]), np.array([0.0])).any()


def test_with_holes_shares_outer(unit_disk):
    spec = unit_disk.with_holes([Disk(Point2(0.0, 0.5), 0.05)], [(1, 1)])
    assert spec.obstacle_kind == 'holes'
    assert spec.hole_labels == [(1, 1)]
    assert unit_disk.with_holes([]).obstacle_kind == 'none'


def test_transformed_scales_holes():
    spec = DomainSpec(obstacle_kind='holes', holes=[Disk(Point2(0.5, 0.0), 0.1)])
    moved = spec.transformed(scale=2.0, shift=Point2(1.0, 0.0))
    assert moved.outer.radius == pytest.approx(2.0)
    assert moved.holes[0].center.as_tuple() == pytest.approx((2.0, 0.0))
    assert moved.holes[0].radius == pytest.approx(0.2)
    with pytest.raises(InvalidInputError):
        build_omega_eps(0.04, 2).transformed(scale=2.0)


def test_save_and_load_holes(tmp_path):
    spec = DomainSpec(obstacle_kind='holes', holes=[Disk(Point2(0.5, 0.0), 0.1)],
                      hole_labels=[(1, 1)], truncation_note='note', metadata={'construction': 'test'})
    path = spec.save(str(tmp_path / 'nested' / 'spec.json'))
    loaded = DomainSpec.load(path)
    assert loaded.to_dict() == spec.to_dict()


def test_save_and_load_cantor_reexpands_structure(tmp_path, omega_eps_small):
    path = omega_eps_small.save(str(tmp_path / 'omega_eps.json'))
    with open(path, encoding='utf-8') as f:
        data = json.load(f)
    assert data['cantor'] == {'epsilon': 0.04, 'depth': 6}
    loaded = DomainSpec.load(path)
    assert loaded.cantor.gap_count == omega_eps_small.cantor.gap_count
    np.testing.assert_array_equal(loaded.cantor.gap_midpoint, omega_eps_small.cantor.gap_midpoint)


def test_load_rejects_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        DomainSpec.load(str(tmp_path / 'missing.json'))

    broken = tmp_path / 'broken.json'
    broken.write_text('{not json', encoding='utf-8')
    with pytest.raises(ConfigError):
        DomainSpec.load(str(broken))

    data = plain_disk().to_dict()
    data['schema_version'] = SCHEMA_VERSION + 1
    with pytest.raises(ConfigError):
        DomainSpec.from_dict(data)
