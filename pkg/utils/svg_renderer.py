"""
SVG図形生成モジュール：バンプ F_δ、Ω_ε、Ω_0 の拡大図、Cheeger集合の輪郭を描く

座標は領域の座標系のまま書き出し、パネルごとの変換行列で画面に写す（y軸は上向き）
"""
import logging
import math
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
from xml.dom import minidom
from xml.etree import ElementTree as ET

import numpy as np
from skimage import measure

from .cantor_domain import BumpSpec, bump_profile
from .domain_spec import DomainSpec
from .errors import InvalidInputError
from .raster import RasterField

logger = logging.getLogger(__name__)

SVG_NS = 'http://www.w3.org/2000/svg'

# 全体図の半幅（単位円板に少し余白をつける）
FULL_HALF = 1.05

STYLE = {
    'domain': {'fill': '#d9d9d9', 'stroke': '#000000', 'stroke-width': '1'},
    'outline': {'fill': 'none', 'stroke': '#000000', 'stroke-width': '1'},
    'obstacle': {'fill': '#ffffff', 'stroke': '#000000', 'stroke-width': '0.5'},
    'marker': {'fill': '#1f4e9c', 'stroke': 'none'},
    'indicator': {'fill': 'none', 'stroke': '#c0392b', 'stroke-width': '1.2'},
    'frame': {'fill': 'none', 'stroke': '#7f7f7f', 'stroke-width': '0.5'},
}


@dataclass(frozen=True)
class ZoomWindow:
    """中心 (cx, cy)、半幅 half の正方形の表示範囲"""

    cx: float
    cy: float
    half: float

    def __post_init__(self):
        if not self.half > 0:
            raise InvalidInputError(f"表示範囲の半幅は正である必要があります: {self.half}")

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return (self.cx - self.half, self.cx + self.half, self.cy - self.half, self.cy + self.half)

    @property
    def zoom(self) -> float:
        return FULL_HALF / self.half


FULL_WINDOW = ZoomWindow(0.0, 0.0, FULL_HALF)


def clip_window(window: ZoomWindow) -> ZoomWindow:
    """
    表示範囲を単位円板に合わせて切り詰める

    中心が単位円板の外にあれば円周上に移し、範囲が全体図より大きければ全体図に縮める
    """
    cx, cy, half = window.cx, window.cy, window.half
    clipped = False
    radius = math.hypot(cx, cy)
    if radius > 1.0:
        cx, cy = cx / radius, cy / radius
        clipped = True
    if half > FULL_HALF:
        half = FULL_HALF
        clipped = True
    limit = FULL_HALF - half
    if abs(cx) > limit or abs(cy) > limit:
        cx, cy = max(-limit, min(limit, cx)), max(-limit, min(limit, cy))
        clipped = True
    if clipped:
        logger.warning("表示範囲 (%.6g, %.6g, 半幅 %.6g) が単位円板の外にはみ出すため切り詰めました",
                       window.cx, window.cy, window.half)
    return ZoomWindow(cx, cy, half)


def default_zoom_windows(angle: float, halves: Sequence[float]) -> List[ZoomWindow]:
    """円周上の角度 angle の点に向かって順に拡大する表示範囲"""
    windows = []
    for half in halves:
        # 範囲の中心を円周から半幅だけ内側に置く
        r = max(0.0, 1.0 - half) if half < FULL_HALF else 0.0
        windows.append(ZoomWindow(r * math.cos(angle), r * math.sin(angle), half))
    return windows


def indicator_contours(field: RasterField, level: float = 0.5) -> List[np.ndarray]:
    """格子上の値の等値線を領域の座標 (m, 2) の配列で返す"""
    padded = np.pad(field.values, 1, mode='constant', constant_values=0.0)
    contours = []
    for contour in measure.find_contours(padded, level):
        xs = field.origin.x + (contour[:, 1] - 0.5) * field.pixel
        ys = field.origin.y + (contour[:, 0] - 0.5) * field.pixel
        contours.append(np.column_stack([xs, ys]))
    return contours


class FigureRenderer:
    """SVGの図を生成するクラス"""

    def __init__(self, size_px: int = 600, margin_px: int = 20,
                 min_feature_px: float = 0.5, precision: int = 10):
        """
        初期化

        Args:
            size_px: パネル1枚の一辺（ピクセル）
            margin_px: パネルの余白
            min_feature_px: これより小さく写る障害物は描かない（穴は点で示す）
            precision: 座標の有効桁数
        """
        if size_px < 16 or margin_px < 0:
            raise InvalidInputError(f"図の大きさが不正です: size={size_px} margin={margin_px}")
        self.size_px = int(size_px)
        self.margin_px = int(margin_px)
        self.min_feature_px = float(min_feature_px)
        self.precision = int(precision)

    def _fmt(self, value: float) -> str:
        text = format(float(value), f'.{self.precision}g')
        return '0' if text == '-0' else text

    # ------------------------------------------------------------------
    # 図の種類ごとの出力

    def render_bump(self, delta: float, output_path: str) -> str:
        """単一のバンプ F_δ と、それを作る4つの単位円を描く"""
        bump = BumpSpec(delta, 0.0)
        half = 1.2 * delta
        window = ZoomWindow(0.0, 0.0, half)
        svg, defs = self._canvas(1)
        group, _ = self._panel(svg, defs, window, 0)

        axis = ET.SubElement(group, 'line', {'class': 'frame'})
        axis.set('x1', self._fmt(-half))
        axis.set('y1', '0')
        axis.set('x2', self._fmt(half))
        axis.set('y2', '0')
        self._apply_style(axis, 'frame')
        for arc in bump.arcs():
            circle = ET.SubElement(group, 'circle', {'class': 'frame'})
            circle.set('cx', self._fmt(arc.center.x))
            circle.set('cy', self._fmt(arc.center.y))
            circle.set('r', self._fmt(arc.radius))
            self._apply_style(circle, 'frame')
        path = ET.SubElement(group, 'path', {'class': 'obstacle'})
        path.set('d', self._bump_path(bump))
        self._apply_style(path, 'domain')

        self._caption(svg, 0, f"F_δ (δ = {self._fmt(delta)}, 高さ {self._fmt(bump_profile(delta, 0.0))})")
        return self._write(svg, output_path)

    def render_domain(self, spec: DomainSpec, output_path: str,
                      overlay: Optional[RasterField] = None) -> str:
        """領域の全体図（Ω_ε、Ω_0、円板、空の領域）"""
        svg, defs = self._canvas(1)
        group, scale = self._panel(svg, defs, FULL_WINDOW, 0)
        self._draw_spec(group, spec, FULL_WINDOW, scale)
        if overlay is not None:
            self._draw_overlay(group, overlay)
        self._caption(svg, 0, self._title(spec))
        return self._write(svg, output_path)

    def render_zoom_triptych(self, spec: DomainSpec, windows: Sequence[ZoomWindow], output_path: str,
                             overlay: Optional[RasterField] = None) -> str:
        """複数の表示範囲を横に並べた拡大図"""
        if not windows:
            raise InvalidInputError("表示範囲が指定されていません")
        windows = [clip_window(w) for w in windows]
        svg, defs = self._canvas(len(windows))
        for k, window in enumerate(windows):
            group, scale = self._panel(svg, defs, window, k)
            self._draw_spec(group, spec, window, scale)
            if overlay is not None:
                self._draw_overlay(group, overlay)
            self._caption(svg, k, f"×{self._fmt(round(window.zoom, 3))}")
        return self._write(svg, output_path)

    # ------------------------------------------------------------------
    # 描画の部品

    def _canvas(self, panels: int) -> Tuple[ET.Element, ET.Element]:
        width = panels * self.size_px + (panels + 1) * self.margin_px
        height = self.size_px + 3 * self.margin_px
        svg = ET.Element('svg', {
            'xmlns': SVG_NS,
            'width': str(width),
            'height': str(height),
            'viewBox': f"0 0 {width} {height}",
        })
        ET.SubElement(svg, 'rect', {'x': '0', 'y': '0', 'width': str(width),
                                'height': str(height), 'fill': '#ffffff'})
        defs = ET.SubElement(svg, 'defs')
        return svg, defs

    def _panel(self, svg: ET.Element, defs: ET.Element, window: ZoomWindow,
               index: int) -> Tuple[ET.Element, float]:
        """表示範囲をパネルに写す変換を持つグループ（範囲外は切り取る）"""
        x0 = self.margin_px + index * (self.size_px + self.margin_px)
        y0 = self.margin_px
        clip_id = f"panel{index}"
        clip = ET.SubElement(defs, 'clipPath', {'id': clip_id})
        ET.SubElement(clip, 'rect', {'x': str(x0), 'y': str(y0),
                                     'width': str(self.size_px), 'height': str(self.size_px)})

        scale = self.size_px / (2.0 * window.half)
        tx = x0 + self.size_px / 2.0 - scale * window.cx
        ty = y0 + self.size_px / 2.0 + scale * window.cy
        outer = ET.SubElement(svg, 'g', {'clip-path': f"url(#{clip_id})"})
        group = ET.SubElement(outer, 'g', {
            'transform': f"matrix({self._fmt(scale)},0,0,{self._fmt(-scale)},{self._fmt(tx)},{self._fmt(ty)})",
        })
        frame = ET.SubElement(svg, 'rect', {'x': str(x0), 'y': str(y0),
                                            'width': str(self.size_px), 'height': str(self.size_px)})
        self._apply_style(frame, 'frame', scaled=False)
        return group, scale

    def _apply_style(self, elem: ET.Element, kind: str, scaled: bool = True):
        for key, value in STYLE[kind].items():
            elem.set(key, value)
        if scaled and 'stroke-width' in STYLE[kind]:
            elem.set('vector-effect', 'non-scaling-stroke')

    def _caption(self, svg: ET.Element, index: int, text: str):
        x = self.margin_px + index * (self.size_px + self.margin_px) + self.size_px / 2.0
        y = 2 * self.margin_px + self.size_px - self.margin_px / 4.0
        label = ET.SubElement(svg, 'text', {'x': self._fmt(x), 'y': self._fmt(y),
                                            'text-anchor': 'middle', 'font-size': '14',
                                            'font-family': 'sans-serif'})
        label.text = text

    def _title(self, spec: DomainSpec) -> str:
        construction = spec.metadata.get('construction')
        if construction == 'omega_eps':
            return f"Ω_ε (ε = {self._fmt(spec.metadata['epsilon'])}, N = {spec.metadata['depth']})"
        if construction == 'omega0':
            return f"Ω_0 (j1 <= {spec.metadata['depth']})"
        if spec.outer is None:
            return "空の領域"
        return "円板"

    def _bump_path(self, bump: BumpSpec) -> str:
        """左の付け根 → 上の頂点 → 右の付け根 → 下の頂点 の閉じた円弧の列"""
        right_up, left_up, left_down, right_down = bump.arcs()
        f = self._fmt
        start = left_up.start_point
        parts = [f"M {f(start.x)} {f(start.y)}"]
        for arc in (left_up, right_up, right_down, left_down):
            end = arc.end_point
            sweep_flag = 1 if arc.orientation == 'ccw' else 0
            parts.append(f"A 1 1 0 0 {sweep_flag} {f(end.x)} {f(end.y)}")
        parts.append("Z")
        return ' '.join(parts)

    def _draw_spec(self, group: ET.Element, spec: DomainSpec, window: ZoomWindow, scale: float):
        if spec.outer is None:
            circle = ET.SubElement(group, 'circle', {'class': 'outline', 'cx': '0', 'cy': '0', 'r': '1'})
            self._apply_style(circle, 'outline')
            return

        outer = ET.SubElement(group, 'circle', {'class': 'domain'})
        outer.set('cx', self._fmt(spec.outer.center.x))
        outer.set('cy', self._fmt(spec.outer.center.y))
        outer.set('r', self._fmt(spec.outer.radius))
        self._apply_style(outer, 'domain')

        if spec.obstacle_kind == 'cantor_bumps':
            self._draw_bumps(group, spec, window, scale)
        elif spec.obstacle_kind == 'holes':
            self._draw_holes(group, spec, window, scale)

    def _draw_bumps(self, group: ET.Element, spec: DomainSpec, window: ZoomWindow, scale: float):
        structure = spec.cantor
        mid, half = structure.gap_midpoint, structure.gap_half_length
        xmin, xmax, ymin, ymax = window.bounds
        visible = half * scale >= self.min_feature_px
        inside = (mid + half > xmin) & (mid - half < xmax) & (ymin < half) & (ymax > -half)
        chosen = np.nonzero(visible & inside)[0]
        skipped = int(np.count_nonzero(inside & ~visible))
        if skipped:
            logger.info("表示上 %.2f ピクセル未満のバンプ %d 個を省略しました", self.min_feature_px, skipped)
        # 中点の順に描く
        for k in chosen[np.argsort(mid[chosen], kind='stable')]:
            path = ET.SubElement(group, 'path', {'class': 'obstacle'})
            path.set('d', self._bump_path(BumpSpec(float(half[k]), float(mid[k]))))
            self._apply_style(path, 'obstacle')

    def _draw_holes(self, group: ET.Element, spec: DomainSpec, window: ZoomWindow, scale: float):
        xmin, xmax, ymin, ymax = window.bounds
        marker_radius = self.min_feature_px / scale
        markers = 0
        for hole in spec.holes:
            c = hole.center
            if c.x + hole.radius < xmin or c.x - hole.radius > xmax:
                continue
            if c.y + hole.radius < ymin or c.y - hole.radius > ymax:
                continue
            circle = ET.SubElement(group, 'circle')
            circle.set('cx', self._fmt(c.x))
            circle.set('cy', self._fmt(c.y))
            if hole.radius * scale >= self.min_feature_px:
                circle.set('class', 'obstacle')
                circle.set('r', self._fmt(hole.radius))
                self._apply_style(circle, 'obstacle')
            else:
                circle.set('class', 'marker')
                circle.set('r', self._fmt(marker_radius))
                self._apply_style(circle, 'marker')
                markers += 1
        if markers:
            logger.info("表示上小さすぎる穴 %d 個を点で示しました", markers)

    def _draw_overlay(self, group: ET.Element, field: RasterField):
        for contour in indicator_contours(field):
            points = ' '.join(f"{self._fmt(x)},{self._fmt(y)}" for x, y in contour)
            line = ET.SubElement(group, 'polyline', {'class': 'indicator', 'points': points})
            self._apply_style(line, 'indicator')

    # ------------------------------------------------------------------

    def _prettify_xml(self, elem: ET.Element) -> str:
        """XMLを整形"""
        rough_string = ET.tostring(elem, encoding='unicode')
        reparsed = minidom.parseString(rough_string)
        pretty_xml = reparsed.toprettyxml(indent='  ')
        lines = [line.rstrip() for line in pretty_xml.split('\n') if line.strip()]
        # XML宣言を除外（別途追加するため）
        if lines and lines[0].startswith('<?xml'):
            lines = lines[1:]
        return '\n'.join(lines) + '\n'

    def _write(self, svg: ET.Element, output_path: str) -> str:
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write('<?xml version="1.0" encoding="UTF-8"?>\n')
            f.write(self._prettify_xml(svg))
        logger.info("SVGを保存しました: %s", output_path)
        return output_path
