"""共通のフィクスチャ"""
import os

import pytest

from utils.cantor_domain import build_omega_eps
from utils.cheeger_solver import solve_cheeger
from utils.domain_spec import plain_disk
from utils.porous_domain import build_omega0, default_sequences
from utils.raster import rasterize


@pytest.fixture(autouse=True)
def _isolate_environment(monkeypatch):
    """CHEEGER_ で始まる環境変数がテストに影響しないようにする"""
    for name in list(os.environ):
        if name.startswith('CHEEGER_'):
            monkeypatch.delenv(name, raising=False)


@pytest.fixture(scope='session')
def default_seq():
    return default_sequences(0.2, 1.0, 12)


@pytest.fixture(scope='session')
def omega0(default_seq):
    return build_omega0(default_seq, 12)


@pytest.fixture(scope='session')
def omega_eps_small():
    return build_omega_eps(0.04, 6)


@pytest.fixture
def unit_disk():
    return plain_disk()


@pytest.fixture(scope='session')
def disk_result():
    """単位円板の128格子での解"""
    return solve_cheeger(rasterize(plain_disk(), 128))
