"""
設定ファイル：既定値・環境変数・設定ファイル・コマンドライン引数を統合して管理
"""
import configparser
import copy
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from utils.errors import ConfigError

# .envファイルから環境変数をロード
load_dotenv()

ENV_PREFIX = 'CHEEGER'

# デフォルト設定値
DEFAULT_SETTINGS = {
    # 実行全体
    'run': {
        'seed': 0,
    },
    # Cantorバンプ列の領域 Ω_ε
    'cantor': {
        'epsilon': 0.04,
        'depth': 20,
        'product_depth': 60,
    },
    # 穴の列の領域 Ω_0
    'porous': {
        'eps1': 0.2,
        'safety': 1.0,
        'depth': 12,
    },
    # ラスタ化
    'raster': {
        'grid': 512,
        'subsamples': 4,
        'padding': 2,
        'max_grid': 4096,
        'workers': 0,  # 0 はスレッド数を自動で決める
    },
    # Cheeger集合のソルバー
    'solver': {
        'outer_tol': 1e-4,
        'max_outer': 30,
        'inner_iters': 200,
        'inner_growth': 1.5,
        'max_inner_iters': 5000,
        'inner_tol': 1e-4,
        'gap_check_every': 25,
        'threshold_policy': 'scan',
        'fixed_threshold': 0.5,
        'scan_levels': 17,
        'scan_low': 0.1,
        'scan_high': 0.9,
        'ratio_bias': 0.0,
        'smoothing': 1.0,
        'show_progress': False,
    },
    # 検証スイート
    'verify': {
        'trials': 10000,
        'angle_trials': 1000,
        'density_trials': 500,
        'j1_max': 12,
        'grid': 128,
        'points': 8,
        'show_progress': False,
    },
    # SVGの図
    'render': {
        'size_px': 600,
        'margin_px': 20,
        'min_feature_px': 0.5,
        'zoom_angle': 0.7853981633974483,
        'zoom_halves': '1.05,0.25,0.05',
        'bump_delta': 0.25,
    },
    # ファイル出力設定
    'output': {
        'dir': 'output',
    },
    'logging': {
        'level': 'INFO',
    },
}

_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


@dataclass
class RunConfig:
    """統合済みの設定"""

    settings: Dict[str, Dict[str, Any]]
    output_dir: str
    seed: int

    def section(self, name: str) -> Dict[str, Any]:
        return self.settings[name]


def _coerce(section: str, key: str, value: Any) -> Any:
    """既定値の型に合わせて値を変換"""
    default = DEFAULT_SETTINGS[section][key]
    if not isinstance(value, str):
        if isinstance(default, bool) and not isinstance(value, bool):
            raise ConfigError(f"[{section}] {key} は真偽値です: {value!r}")
        if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
            return float(value)
        return value
    text = value.strip()
    try:
        if isinstance(default, bool):
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key} の値が不正です: {value!r}") from None
    return text


def _merge(settings: Dict, section: str, key: str, value: Any, source: str):
    if section not in DEFAULT_SETTINGS:
        raise ConfigError(f"不明な設定セクションです（{source}）: [{section}]")
    if key not in DEFAULT_SETTINGS[section]:
        raise ConfigError(f"不明な設定キーです（{source}）: [{section}] {key}")
    settings[section][key] = _coerce(section, key, value)


def _apply_environment(settings: Dict):
    """CHEEGER_<SECTION>_<KEY> 形式の環境変数を反映"""
    for section, values in DEFAULT_SETTINGS.items():
        for key in values:
            name = f"{ENV_PREFIX}_{section.upper()}_{key.upper()}"
            if name in os.environ:
                _merge(settings, section, key, os.environ[name], f"環境変数 {name}")
    level = os.getenv(f"{ENV_PREFIX}_LOG_LEVEL")
    if level:
        settings['logging']['level'] = level


def _apply_file(settings: Dict, path: str):
    if not os.path.exists(path):
        raise ConfigError(f"設定ファイルが見つかりません: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=('#', ';'))
    try:
        with open(path, 'r', encoding='utf-8') as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise ConfigError(f"設定ファイルを解析できません: {path}: {e}") from None
    for section in parser.sections():
        for key, value in parser.items(section, raw=True):
            _merge(settings, section, key, value, path)


def load_run_config(path: Optional[str] = None,
                    overrides: Optional[Dict[str, Dict[str, Any]]] = None) -> RunConfig:
    """
    設定を統合する（既定値 < 環境変数 < 設定ファイル < overrides）

    Args:
        path: INI形式の設定ファイル
        overrides: コマンドライン引数など {セクション: {キー: 値}}（None の値は無視）

    Returns:
        RunConfig（出力ディレクトリは作成済み）
    """
    settings = copy.deepcopy(DEFAULT_SETTINGS)
    _apply_environment(settings)
    if path:
        _apply_file(settings, path)
    for section, values in (overrides or {}).items():
        for key, value in values.items():
            if value is not None:
                _merge(settings, section, key, value, "コマンドライン")

    level = str(settings['logging']['level']).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"不明なログレベルです: {settings['logging']['level']}")
    settings['logging']['level'] = level

    output_dir = settings['output']['dir']
    if os.path.exists(output_dir) and not os.path.isdir(output_dir):
        raise ConfigError(f"出力先がディレクトリではありません: {output_dir}")
    os.makedirs(output_dir, exist_ok=True)
    return RunConfig(settings, output_dir, int(settings['run']['seed']))
