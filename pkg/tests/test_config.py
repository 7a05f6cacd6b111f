import pytest

from config import DEFAULT_SETTINGS, ENV_PREFIX, load_run_config
from utils.errors import ConfigError


@pytest.fixture
def out_dir(tmp_path):
    return {'output': {'dir': str(tmp_path / 'out')}}


def _write_ini(tmp_path, text):
    path = tmp_path / 'run.ini'
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_defaults(out_dir):
    run = load_run_config(None, out_dir)
    assert run.seed == 0
    assert run.settings['cantor']['epsilon'] == DEFAULT_SETTINGS['cantor']['epsilon']
    assert run.settings['logging']['level'] == 'INFO'
    assert run.section('solver')['threshold_policy'] == 'scan'


def test_defaults_are_not_mutated(out_dir):
    run = load_run_config(None, {**out_dir, 'solver': {'max_outer': 3}})
    assert run.settings['solver']['max_outer'] == 3
    assert DEFAULT_SETTINGS['solver']['max_outer'] == 30


def test_environment_override(monkeypatch, out_dir):
    monkeypatch.setenv(f"{ENV_PREFIX}_SOLVER_MAX_OUTER", '7')
    monkeypatch.setenv(f"{ENV_PREFIX}_VERIFY_SHOW_PROGRESS", 'yes')
    run = load_run_config(None, out_dir)
    assert run.settings['solver']['max_outer'] == 7
    assert run.settings['verify']['show_progress'] is True


def test_log_level_environment(monkeypatch, out_dir):
    monkeypatch.setenv(f"{ENV_PREFIX}_LOG_LEVEL", 'debug')
    run = load_run_config(None, out_dir)
    assert run.settings['logging']['level'] == 'DEBUG'


def test_ini_file_with_inline_comments(tmp_path, out_dir):
    path = _write_ini(tmp_path, "[cantor]\nepsilon = 0.03  # 半幅\ndepth = 8 ; 浅め\n\n[run]\nseed = 42\n")
    run = load_run_config(path, out_dir)
    assert run.settings['cantor']['epsilon'] == pytest.approx(0.03)
    assert run.settings['cantor']['depth'] == 8
    assert run.seed == 42


@pytest.mark.parametrize("text", [
    "[nosuch]\nvalue = 1\n",
    "[solver]\nnosuch = 1\n",
])
def test_unknown_section_or_key(tmp_path, out_dir, text):
    with pytest.raises(ConfigError):
        load_run_config(_write_ini(tmp_path, text), out_dir)


@pytest.mark.parametrize("text", [
    "[solver]\nshow_progress = maybe\n",
    "[raster]\ngrid = big\n",
    "[cantor]\nepsilon = small\n",
])
def test_bad_values(tmp_path, out_dir, text):
    with pytest.raises(ConfigError):
        load_run_config(_write_ini(tmp_path, text), out_dir)


def test_missing_file(tmp_path, out_dir):
    with pytest.raises(ConfigError):
        load_run_config(str(tmp_path / 'missing.ini'), out_dir)


def test_unparsable_file(tmp_path, out_dir):
    with pytest.raises(ConfigError):
        load_run_config(_write_ini(tmp_path, "no section header\n"), out_dir)


def test_none_overrides_ignored(out_dir):
    run = load_run_config(None, {**out_dir, 'raster': {'grid': None}, 'run': {'seed': None}})
    assert run.settings['raster']['grid'] == DEFAULT_SETTINGS['raster']['grid']
    assert run.seed == 0


def test_int_override_for_float_key(out_dir):
    run = load_run_config(None, {**out_dir, 'cantor': {'epsilon': 1}})
    assert isinstance(run.settings['cantor']['epsilon'], float)


def test_non_bool_for_bool_key(out_dir):
    with pytest.raises(ConfigError):
        load_run_config(None, {**out_dir, 'solver': {'show_progress': 1}})


def test_invalid_log_level(out_dir):
    with pytest.raises(ConfigError):
        load_run_config(None, {**out_dir, 'logging': {'level': 'LOUD'}})


def test_output_dir_created(tmp_path):
    target = tmp_path / 'a' / 'b'
    run = load_run_config(None, {'output': {'dir': str(target)}})
    assert target.is_dir()
    assert run.output_dir == str(target)


def test_output_dir_is_file(tmp_path):
    target = tmp_path / 'file.txt'
    target.write_text('x')
    with pytest.raises(ConfigError):
        load_run_config(None, {'output': {'dir': str(target)}})


def test_precedence(monkeypatch, tmp_path, out_dir):
    monkeypatch.setenv(f"{ENV_PREFIX}_RASTER_GRID", '100')
    monkeypatch.setenv(f"{ENV_PREFIX}_RASTER_SUBSAMPLES", '3')
    monkeypatch.setenv(f"{ENV_PREFIX}_RASTER_PADDING", '5')
    path = _write_ini(tmp_path, "[raster]\ngrid = 200\nsubsamples = 6\n")
    run = load_run_config(path, {**out_dir, 'raster': {'grid': 300}})
    assert run.settings['raster']['grid'] == 300
    assert run.settings['raster']['subsamples'] == 6
    assert run.settings['raster']['padding'] == 5
