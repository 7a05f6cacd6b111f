"""
ラスタ化モジュール：領域を被覆率の格子に変換し、格子上で面積・周長を推定する
"""
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import ndimage
from skimage import measure

from .domain_spec import DomainSpec
from .errors import ConfigError, InvalidInputError, RasterMemoryError
from .geom_core import Disk, Point2

logger = logging.getLogger(__name__)

MIN_GRID = 64
DEFAULT_MAX_GRID = 4096
DEFAULT_SUBSAMPLES = 4
DEFAULT_PADDING = 2
BLOCK_ROWS = 32


@dataclass(frozen=True, eq=False)
class RasterField:
    """
    正方画素の格子上の値（被覆率または緩和した指示関数）

    values[i, j] は画素中心 (origin.x + (j+0.5)·pixel, origin.y + (i+0.5)·pixel) の値。
    excluded_holes は画素の半分より小さく格子から除いた穴で、測度の補正に使う
    """

    nx: int
    ny: int
    pixel: float
    origin: Point2
    values: np.ndarray
    mask: np.ndarray
    excluded_holes: List[Disk] = field(default_factory=list)

    def __post_init__(self):
        if not self.pixel > 0:
            raise InvalidInputError(f"画素の一辺は正である必要があります: {self.pixel}")
        if self.values.shape != (self.ny, self.nx) or self.mask.shape != (self.ny, self.nx):
            raise InvalidInputError("配列の形状が格子サイズと一致しません")
        values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(values)) or values.min(initial=0.0) < 0.0 or values.max(initial=0.0) > 1.0:
            raise InvalidInputError("格子の値は [0, 1] にある必要があります")
        if np.any(values[~np.asarray(self.mask, dtype=bool)] != 0.0):
            raise InvalidInputError("マスク外の画素の値は 0 である必要があります")

    @property
    def area_correction(self) -> float:
        """除外した穴の面積の合計（格子上の面積から差し引く量）"""
        return math.fsum(math.pi * h.radius ** 2 for h in self.excluded_holes)

    @property
    def perimeter_correction(self) -> float:
        """除外した穴の周長の合計（格子上の周長に足す量）"""
        return math.fsum(2.0 * math.pi * h.radius for h in self.excluded_holes)

    def pixel_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = self.origin.x + (np.arange(self.nx) + 0.5) * self.pixel
        ys = self.origin.y + (np.arange(self.ny) + 0.5) * self.pixel
        return np.meshgrid(xs, ys)

    def with_values(self, values: np.ndarray) -> "RasterField":
        """同じ格子とマスクで値だけを差し替える（[0,1] に切り詰め、マスク外は 0）"""
        values = np.where(self.mask, np.clip(values, 0.0, 1.0), 0.0)
        return replace(self, values=values)

    def binary(self, threshold: float) -> np.ndarray:
        return self.values >= threshold


def _check_threshold(threshold: float):
    if not (0.0 < threshold < 1.0):
        raise InvalidInputError(f"しきい値は (0, 1) にある必要があります: {threshold}")


def _coverage_rows(inside_fn: Callable, xs: np.ndarray, ys: np.ndarray,
                   offsets: np.ndarray) -> np.ndarray:
    """画素ごとに k×k 点で内外判定し、被覆率を返す"""
    k = offsets.size
    X = xs[None, :, None, None] + offsets[None, None, None, :]
    Y = ys[:, None, None, None] + offsets[None, None, :, None]
    X, Y = np.broadcast_arrays(X, Y)
    inside = inside_fn(X, Y)
    return inside.reshape(ys.size, xs.size, k * k).mean(axis=2)


def _rasterize_grid(inside_fn: Callable, origin: Point2, pixel: float, nx: int, ny: int,
                    subsamples: int, workers: Optional[int]) -> np.ndarray:
    offsets = ((np.arange(subsamples) + 0.5) / subsamples - 0.5) * pixel
    xs = origin.x + (np.arange(nx) + 0.5) * pixel
    ys = origin.y + (np.arange(ny) + 0.5) * pixel
    starts = list(range(0, ny, BLOCK_ROWS))

    def _block(start):
        return _coverage_rows(inside_fn, xs, ys[start:start + BLOCK_ROWS], offsets)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        blocks = list(executor.map(_block, starts))
    return np.vstack(blocks) if blocks else np.zeros((0, nx))


def _check_grid(n: int, max_grid: int):
    if int(n) != n or n < MIN_GRID:
        raise InvalidInputError(f"格子サイズは {MIN_GRID} 以上の整数です: {n}")
    if n > max_grid:
        raise RasterMemoryError(f"格子サイズ {n} は上限 {max_grid} を超えています")


def rasterize(spec: DomainSpec, n: int, subsamples: int = DEFAULT_SUBSAMPLES,
              padding: int = DEFAULT_PADDING, max_grid: int = DEFAULT_MAX_GRID,
              workers: Optional[int] = None) -> RasterField:
    """
    領域を n×n の被覆率格子に変換する

    格子は外側の円板を中心に置き、周囲に padding 画素の余白をとる。
    半径が画素の半分未満の穴は格子から除き、excluded_holes に記録する

    Args:
        spec: 領域
        n: 格子サイズ (>= 64)
        subsamples: 画素あたりの一辺の標本数 k
        padding: 余白の画素数
        max_grid: 格子サイズの上限
        workers: 行ブロックを処理するスレッド数（None は既定）

    Returns:
        RasterField
    """
    _check_grid(n, max_grid)
    if subsamples < 1:
        raise InvalidInputError(f"標本数は1以上です: {subsamples}")
    if padding < 0 or 2 * padding >= n:
        raise InvalidInputError(f"余白が不正です: {padding}")

    xmin, xmax, ymin, ymax = spec.bounds()
    pixel = (xmax - xmin) / (n - 2 * padding)
    origin = Point2(xmin - padding * pixel, ymin - padding * pixel)

    if spec.outer is None:
        zeros = np.zeros((n, n))
        return RasterField(n, n, pixel, origin, zeros, zeros > 0)

    excluded: List[Disk] = []
    effective = spec
    if spec.obstacle_kind == 'holes':
        kept, labels = [], []
        for i, hole in enumerate(spec.holes):
            if hole.radius < 0.5 * pixel:
                excluded.append(hole)
            else:
                kept.append(hole)
                if spec.hole_labels:
                    labels.append(spec.hole_labels[i])
        if excluded:
            effective = spec.with_holes(kept, labels)
            logger.info("画素の半分より小さい穴 %d 個を格子から除外しました", len(excluded))

    values = _rasterize_grid(effective.contains, origin, pixel, n, n, subsamples, workers)
    mask = values > 0
    logger.debug("ラスタ化: n=%d 画素=%.3e 被覆画素=%d", n, pixel, int(mask.sum()))
    return RasterField(n, n, pixel, origin, values, mask, excluded)


def rasterize_function(inside_fn: Callable, bounds: Tuple[float, float, float, float], n: int,
                       subsamples: int = DEFAULT_SUBSAMPLES, padding: int = DEFAULT_PADDING,
                       max_grid: int = DEFAULT_MAX_GRID,
                       workers: Optional[int] = None) -> RasterField:
    """
    ベクトル化された内外判定関数 inside_fn(xs, ys) を格子に変換する

    bounds = (xmin, xmax, ymin, ymax)。長い方の辺を n − 2·padding 画素に割り当てる
    """
    _check_grid(n, max_grid)
    xmin, xmax, ymin, ymax = bounds
    if not (xmax > xmin and ymax > ymin):
        raise InvalidInputError(f"範囲が不正です: {bounds}")
    pixel = max(xmax - xmin, ymax - ymin) / (n - 2 * padding)
    nx = int(math.ceil(round((xmax - xmin) / pixel, 9))) + 2 * padding
    ny = int(math.ceil(round((ymax - ymin) / pixel, 9))) + 2 * padding
    origin = Point2(xmin - padding * pixel, ymin - padding * pixel)
    values = _rasterize_grid(inside_fn, origin, pixel, nx, ny, subsamples, workers)
    return RasterField(nx, ny, pixel, origin, values, values > 0)


def grid_area(field: RasterField, threshold: float) -> float:
    """しきい値以上の画素数 × 画素面積"""
    _check_threshold(threshold)
    return float(np.count_nonzero(field.values >= threshold)) * field.pixel ** 2


def grid_perimeter(field: RasterField, threshold: float, smoothing: float = 0.0) -> float:
    """
    しきい値集合の等値線の長さ（線形補間つきマーチングスクエア）

    格子の外周に 0 を1画素足してから等値線を抽出するため、等値線は常に閉じる。
    単一画素の集合は菱形になり 2√2·pixel を返す

    Args:
        field: 格子
        threshold: しきい値
        smoothing: 抽出前に掛けるガウス平滑化の標準偏差（画素単位、0 で無効）
    """
    _check_threshold(threshold)
    values = field.values
    if smoothing > 0:
        values = ndimage.gaussian_filter(values, sigma=smoothing)
    padded = np.pad(values, 1, mode='constant', constant_values=0.0)
    contours = measure.find_contours(padded, threshold)
    total = 0.0
    for contour in contours:
        steps = np.diff(contour, axis=0)
        total += float(np.sum(np.hypot(steps[:, 0], steps[:, 1])))
    return total * field.pixel


def export_pgm(field: RasterField, output_path: str) -> str:
    """
    値を8ビットのバイナリPGM (P5) として保存

    ヘッダのコメント行に画素サイズと原点を記録し、先頭行が y の最大側になるよう上下反転する
    """
    directory = os.path.dirname(output_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    data = np.round(np.clip(field.values, 0.0, 1.0) * 255.0).astype(np.uint8)[::-1]
    header = (f"P5\n# pixel={field.pixel!r} origin={field.origin.x!r},{field.origin.y!r}\n"
              f"{field.nx} {field.ny}\n255\n")
    with open(output_path, 'wb') as f:
        f.write(header.encode('ascii'))
        f.write(data.tobytes())
    logger.info("PGMを保存しました: %s", output_path)
    return output_path


def read_pgm(input_path: str) -> RasterField:
    """export_pgm で保存したPGMを読み込む（コメントがなければ画素1・原点0とする）"""
    if not os.path.exists(input_path):
        raise ConfigError(f"PGMファイルが見つかりません: {input_path}")
    with open(input_path, 'rb') as f:
        raw = f.read()

    tokens, comments = [], []
    pos = 0
    try:
        while len(tokens) < 4:
            line_end = raw.index(b'\n', pos)
            line = raw[pos:line_end].decode('ascii').strip()
            pos = line_end + 1
            if line.startswith('#'):
                comments.append(line[1:].strip())
            elif line:
                tokens.extend(line.split())
    except (ValueError, UnicodeDecodeError) as e:
        raise ConfigError(f"PGMのヘッダーが不正です: {input_path} ({e})") from None
    if tokens[0] != 'P5' or tokens[3] != '255':
        raise ConfigError(f"未対応のPGM形式です: {input_path}")
    try:
        nx, ny = int(tokens[1]), int(tokens[2])
    except ValueError:
        raise ConfigError(f"PGMの画素数が不正です: {tokens[1]} {tokens[2]}") from None
    if nx < 1 or ny < 1:
        raise ConfigError(f"PGMの画素数が不正です: {nx}x{ny}")

    pixel, origin = 1.0, Point2(0.0, 0.0)
    try:
        for comment in comments:
            for item in comment.split():
                key, _, value = item.partition('=')
                if key == 'pixel':
                    pixel = float(value)
                elif key == 'origin':
                    ox, oy = value.split(',')
                    origin = Point2(float(ox), float(oy))
    except ValueError as e:
        raise ConfigError(f"PGMのコメントが不正です: {input_path} ({e})") from None

    data = np.frombuffer(raw[pos:pos + nx * ny], dtype=np.uint8)
    if data.size != nx * ny:
        raise ConfigError(f"PGMのデータが不足しています: {input_path}")
    values = data.reshape(ny, nx)[::-1].astype(float) / 255.0
    return RasterField(nx, ny, pixel, origin, values, values > 0)
