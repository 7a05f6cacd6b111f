import logging
import math
import xml.etree.ElementTree as ET

import pytest

from utils.domain_spec import DomainSpec
from utils.errors import InvalidInputError
from utils.svg_renderer import (FULL_HALF, SVG_NS, FigureRenderer, ZoomWindow, clip_window,
                                default_zoom_windows, indicator_contours)

NS = {'svg': SVG_NS}


def parse(path):
    return ET.parse(path).getroot()


def by_class(root, tag, cls):
    return [e for e in root.iter(f'{{{SVG_NS}}}{tag}') if e.get('class') == cls]


@pytest.fixture
def renderer():
    return FigureRenderer(size_px=300, margin_px=10)


class TestWindows:
    def test_invalid_half(self):
        with pytest.raises(InvalidInputError):
            ZoomWindow(0.0, 0.0, 0.0)

    def test_clip_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger='utils.svg_renderer'):
            clipped = clip_window(ZoomWindow(2.0, 0.0, 0.1))
        assert clipped.cx == pytest.approx(FULL_HALF - 0.1)
        assert clipped.cy == 0.0
        assert '切り詰め' in caplog.text

    def test_inside_window_untouched(self, caplog):
        window = ZoomWindow(0.5, 0.5, 0.1)
        with caplog.at_level(logging.WARNING, logger='utils.svg_renderer'):
            assert clip_window(window) == window
        assert not caplog.records

    def test_default_zoom_windows(self):
        windows = default_zoom_windows(math.pi / 4, [1.05, 0.25, 0.05])
        assert (windows[0].cx, windows[0].cy) == (0.0, 0.0)
        assert math.hypot(windows[1].cx, windows[1].cy) == pytest.approx(0.75)
        assert windows[2].zoom == pytest.approx(21.0)


class TestFigures:
    def test_bump_figure(self, renderer, tmp_path):
        path = renderer.render_bump(0.25, str(tmp_path / 'bump.svg'))
        root = parse(path)
        circles = root.findall('.//svg:circle', NS)
        assert len(circles) == 4
        bump = root.find('.//svg:path', NS)
        assert bump.get('d').count('A 1 1 0 0') == 4
        assert bump.get('d').startswith('M -0.25 0')

    def test_output_is_deterministic(self, renderer, tmp_path, omega_eps_small):
        a = renderer.render_domain(omega_eps_small, str(tmp_path / 'a.svg'))
        b = renderer.render_domain(omega_eps_small, str(tmp_path / 'b.svg'))
        with open(a, 'rb') as fa, open(b, 'rb') as fb:
            assert fa.read() == fb.read()

    def test_empty_spec_draws_outline(self, renderer, tmp_path):
        root = parse(renderer.render_domain(DomainSpec(outer=None), str(tmp_path / 'empty.svg')))
        assert len(by_class(root, 'circle', 'outline')) == 1
        assert not by_class(root, 'circle', 'domain')

    def test_small_bumps_omitted(self, tmp_path, omega_eps_small):
        fine = FigureRenderer(size_px=300, min_feature_px=0.0)
        coarse = FigureRenderer(size_px=300, min_feature_px=2.0)
        n_fine = len(by_class(parse(fine.render_domain(omega_eps_small, str(tmp_path / 'f.svg'))),
                              'path', 'obstacle'))
        n_coarse = len(by_class(parse(coarse.render_domain(omega_eps_small, str(tmp_path / 'c.svg'))),
                                'path', 'obstacle'))
        assert n_fine == omega_eps_small.obstacle_count
        assert n_coarse < n_fine

    def test_tiny_holes_become_markers(self, renderer, tmp_path, omega0):
        root = parse(renderer.render_domain(omega0, str(tmp_path / 'omega0.svg')))
        assert len(by_class(root, 'circle', 'marker')) == omega0.obstacle_count
        caption = root.findall('.//svg:text', NS)[0].text
        assert 'Ω_0' in caption

    def test_zoom_triptych(self, renderer, tmp_path, omega0):
        windows = default_zoom_windows(math.pi / 4, [1.05, 0.25, 0.05])
        root = parse(renderer.render_zoom_triptych(omega0, windows, str(tmp_path / 'zoom.svg')))
        assert root.get('width') == str(3 * 300 + 4 * 10)
        assert len(root.findall('.//svg:clipPath', NS)) == 3
        captions = [t.text for t in root.findall('.//svg:text', NS)]
        assert captions[-1] == '×21'

    def test_triptych_needs_windows(self, renderer, tmp_path, omega0):
        with pytest.raises(InvalidInputError):
            renderer.render_zoom_triptych(omega0, [], str(tmp_path / 'none.svg'))

    def test_overlay(self, renderer, tmp_path, disk_result, unit_disk):
        contours = indicator_contours(disk_result.indicator)
        assert len(contours) == 1
        radii = [math.hypot(x, y) for x, y in contours[0]]
        assert max(abs(r - 1.0) for r in radii) < 3 * disk_result.indicator.pixel
        root = parse(renderer.render_domain(unit_disk, str(tmp_path / 'overlay.svg'),
                                            overlay=disk_result.indicator))
        assert len(by_class(root, 'polyline', 'indicator')) == 1

    def test_invalid_size(self):
        with pytest.raises(InvalidInputError):
            FigureRenderer(size_px=8)
