"""
Cheeger集合計算モジュール：格子上で比 P/|E| を最小化し、Cheeger定数と領域の極小性を評価する

外側は Dinkelbach 反復 h_{n+1} = P(E_n)/|E_n|、内側は u ∈ [0, 被覆率] 上の凸問題
TV(u) − h·Σu を主双対法（Chambolle–Pock）で解き、しきい値処理で集合を取り出す。
画素の半分より小さい穴は格子に現れないため、Ω_0 に関する結論は打ち切った Ω_0^N に対するものになる
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage
from tqdm import tqdm

from .errors import DegenerateThresholdError, InvalidInputError
from .raster import RasterField, grid_area, grid_perimeter

logger = logging.getLogger(__name__)

# ||∇||² <= 8 のため σ·τ·8 < 1 となる歩幅
STEP = 0.99 / math.sqrt(8.0)

THRESHOLD_POLICIES = ('scan', 'fixed')
SEED_POLICIES = ('full_domain', 'warm_start')

# 同じ比とみなす相対差（しきい値の比較でより大きい集合を選ぶ）
TIE_RTOL = 1e-9


@dataclass
class CheegerConfig:
    """
    ソルバーの設定

    Attributes:
        outer_tol: |h_{n+1} − h_n| < outer_tol で停止
        max_outer: 外側反復の上限
        inner_iters: 最初の内側反復の予算
        inner_growth: 外側反復ごとの予算の増加率
        max_inner_iters: 内側反復の予算の上限
        inner_tol: 主双対ギャップの相対許容値
        gap_check_every: 主双対ギャップを評価する間隔
        threshold_policy: 'scan'（scan_levels 個を走査）または 'fixed'
        fixed_threshold: 'fixed' のときのしきい値
        scan_levels / scan_range: 走査するしきい値
        seed_policy: 'full_domain' または 'warm_start'
        warm_start: 'warm_start' のときの初期値
        ratio_bias: 内側問題の h に掛ける余裕（h を (1 + ratio_bias) 倍する）
        smoothing: 周長評価の前に掛けるガウス平滑化（画素単位）
        show_progress: tqdm の進捗表示
    """

    outer_tol: float = 1e-4
    max_outer: int = 30
    inner_iters: int = 200
    inner_growth: float = 1.5
    max_inner_iters: int = 5000
    inner_tol: float = 1e-4
    gap_check_every: int = 25
    threshold_policy: str = 'scan'
    fixed_threshold: float = 0.5
    scan_levels: int = 17
    scan_range: Tuple[float, float] = (0.1, 0.9)
    seed_policy: str = 'full_domain'
    warm_start: Optional[np.ndarray] = None
    ratio_bias: float = 0.0
    smoothing: float = 1.0
    show_progress: bool = False

    def __post_init__(self):
        if not self.outer_tol > 0:
            raise InvalidInputError(f"outer_tol は正である必要があります: {self.outer_tol}")
        if self.max_outer < 1 or self.inner_iters < 1 or self.max_inner_iters < self.inner_iters:
            raise InvalidInputError("反復回数の設定が不正です")
        if not self.inner_growth >= 1.0 or not self.inner_tol > 0 or self.gap_check_every < 1:
            raise InvalidInputError("内側反復の設定が不正です")
        if self.threshold_policy not in THRESHOLD_POLICIES:
            raise InvalidInputError(f"不明なしきい値方針です: {self.threshold_policy}")
        if self.seed_policy not in SEED_POLICIES:
            raise InvalidInputError(f"不明な初期値方針です: {self.seed_policy}")
        if self.seed_policy == 'warm_start' and self.warm_start is None:
            raise InvalidInputError("warm_start 方針には初期値の配列が必要です")
        lo, hi = self.scan_range
        if not (0 < lo <= hi < 1) or not (0 < self.fixed_threshold < 1):
            raise InvalidInputError("しきい値は (0, 1) にある必要があります")
        if self.scan_levels < 1 or self.ratio_bias < 0 or self.smoothing < 0:
            raise InvalidInputError("走査数・バイアス・平滑化の設定が不正です")

    @property
    def thresholds(self) -> np.ndarray:
        if self.threshold_policy == 'fixed':
            return np.array([self.fixed_threshold])
        return np.linspace(self.scan_range[0], self.scan_range[1], self.scan_levels)


@dataclass
class CheegerResult:
    """
    ソルバーの結果

    history の各要素は (h_n, P_n, A_n, h_tv_n)。h_n は n 回目までで最小の比（単調非増加）、
    h_tv は内側問題と同じ離散TVで測った比
    """

    h_estimate: float
    indicator: RasterField
    history: List[Tuple[float, float, float, float]]
    ratio: float
    converged: bool
    threshold: float
    domain: RasterField
    inner_iterations: int = 0
    perimeter: float = 0.0
    area: float = 0.0

    def to_dict(self) -> Dict:
        return {
            'h_estimate': self.h_estimate,
            'ratio': self.ratio,
            'perimeter': self.perimeter,
            'area': self.area,
            'converged': self.converged,
            'threshold': self.threshold,
            'inner_iterations': self.inner_iterations,
            'grid': {'nx': self.indicator.nx, 'ny': self.indicator.ny,
                     'pixel': self.indicator.pixel},
            'history': [list(entry) for entry in self.history],
        }


def _grad(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    gx[:, :-1] = u[:, 1:] - u[:, :-1]
    gy[:-1, :] = u[1:, :] - u[:-1, :]
    return gx, gy


def _div(px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """−∇ の随伴"""
    d = np.zeros_like(px)
    d[:, 0] = px[:, 0]
    d[:, 1:-1] = px[:, 1:-1] - px[:, :-2]
    d[:, -1] = -px[:, -2]
    d[0, :] += py[0, :]
    d[1:-1, :] += py[1:-1, :] - py[:-2, :]
    d[-1, :] += -py[-2, :]
    return d


def total_variation(u: np.ndarray) -> float:
    """等方的な離散全変動（画素単位）"""
    gx, gy = _grad(u)
    return float(np.sum(np.hypot(gx, gy)))


def _tv_ratio(w: np.ndarray, pixel: float) -> float:
    mass = float(np.sum(w))
    if mass <= 0:
        return math.inf
    return total_variation(w) / (pixel * mass)


class _PrimalDual:
    """TV(u) − μ·Σu を 0 <= u <= cap の下で最小化する主双対反復（状態を保持してウォームスタート）"""

    def __init__(self, cap: np.ndarray, u0: np.ndarray):
        self.cap = cap
        self.u = np.clip(u0, 0.0, cap)
        self.px = np.zeros_like(cap)
        self.py = np.zeros_like(cap)

    def gap(self, mu: float) -> float:
        primal = total_variation(self.u) - mu * float(np.sum(self.u))
        dual = float(np.sum(self.cap * np.minimum(0.0, -_div(self.px, self.py) - mu)))
        return primal - dual

    def run(self, mu: float, budget: int, tol: float, check_every: int) -> Tuple[int, float]:
        scale = max(mu * float(np.sum(self.cap)), 1e-300)
        u_bar = self.u.copy()
        rel_gap = math.inf
        for k in range(1, budget + 1):
            gx, gy = _grad(u_bar)
            self.px += STEP * gx
            self.py += STEP * gy
            norm = np.maximum(1.0, np.hypot(self.px, self.py))
            self.px /= norm
            self.py /= norm

            u_old = self.u
            self.u = np.clip(u_old + STEP * (_div(self.px, self.py) + mu), 0.0, self.cap)
            u_bar = 2.0 * self.u - u_old

            if k % check_every == 0 or k == budget:
                rel_gap = self.gap(mu) / scale
                if rel_gap <= tol:
                    return k, rel_gap
        return budget, rel_gap


def _select_level(u: np.ndarray, cap: np.ndarray, pixel: float,
                  thresholds: np.ndarray) -> Tuple[Optional[np.ndarray], float, float]:
    """しきい値ごとの集合から離散TV比が最小のもの（同値なら面積の大きいもの）を選ぶ"""
    best, best_ratio, best_mass, best_t = None, math.inf, -1.0, float(thresholds[0])
    for t in thresholds:
        level = u >= t
        if not level.any():
            continue
        w = np.where(level, cap, 0.0)
        ratio = _tv_ratio(w, pixel)
        mass = float(np.sum(w))
        tie = abs(ratio - best_ratio) <= TIE_RTOL * max(best_ratio, 1.0)
        if ratio < best_ratio and not tie or (tie and mass > best_mass):
            best, best_ratio, best_mass, best_t = w, ratio, mass, float(t)
    return best, best_ratio, best_t


def ratio_of(field: RasterField, threshold: float, smoothing: float = 0.0) -> Tuple[float, float, float]:
    """
    しきい値集合の (周長, 面積, 周長/面積)

    Raises:
        DegenerateThresholdError: しきい値集合が空の場合
    """
    area = grid_area(field, threshold)
    if area <= 0:
        raise DegenerateThresholdError(f"しきい値 {threshold} の集合が空です")
    perimeter = grid_perimeter(field, threshold, smoothing=smoothing)
    return perimeter, area, perimeter / area


@dataclass(frozen=True)
class _Iterate:
    """これまでで比が最小の反復"""

    h: float
    perimeter: float
    area: float
    values: np.ndarray
    threshold: float


def solve_cheeger(field: RasterField, cfg: Optional[CheegerConfig] = None) -> CheegerResult:
    """
    格子上の領域の Cheeger定数と Cheeger集合を求める

    Args:
        field: 領域の被覆率格子（rasterize の結果）
        cfg: ソルバーの設定

    Returns:
        CheegerResult（外側反復が収束しなければ converged=False）

    Raises:
        DegenerateThresholdError: しきい値処理で空集合しか得られない場合
    """
    cfg = cfg or CheegerConfig()
    if not field.mask.any():
        raise InvalidInputError("領域のマスクが空です")

    cap = np.where(field.mask, field.values, 0.0)
    if cfg.seed_policy == 'warm_start':
        warm = np.asarray(cfg.warm_start, dtype=float)
        if warm.shape != cap.shape:
            raise InvalidInputError("warm_start の形状が格子と一致しません")
        w = np.clip(warm, 0.0, cap)
    else:
        w = cap.copy()
    if not np.any(w > 0):
        raise DegenerateThresholdError("初期集合が空です")

    solver = _PrimalDual(cap, w)
    thresholds = cfg.thresholds
    h_tv = _tv_ratio(w, field.pixel)
    history: List[Tuple[float, float, float, float]] = []
    converged = False
    threshold = float(thresholds[0])
    total_inner = 0
    budget = float(cfg.inner_iters)

    progress = tqdm(range(cfg.max_outer), desc="Cheeger", disable=not cfg.show_progress)
    best: Optional[_Iterate] = None
    for n in progress:
        mu = (1.0 + cfg.ratio_bias) * h_tv * field.pixel
        iters, rel_gap = solver.run(mu, int(budget), cfg.inner_tol, cfg.gap_check_every)
        total_inner += iters
        inner_ok = rel_gap <= cfg.inner_tol or int(budget) >= cfg.max_inner_iters

        chosen, new_h_tv, level = _select_level(solver.u, cap, field.pixel, thresholds)
        if chosen is None:
            # h を越えて減らせる集合がないので、現在の集合が不動点
            logger.debug("外側 %d: しきい値集合が空のため現在の集合を保持します（最大値 u=%.3e）",
                         n + 1, float(solver.u.max()))
            chosen, new_h_tv, level = w, h_tv, threshold

        perimeter, area, h = ratio_of(field.with_values(chosen), 0.5, smoothing=cfg.smoothing)
        previous_h = math.inf if best is None else best.h
        tie = best is not None and abs(h - best.h) <= TIE_RTOL * max(best.h, 1.0)
        if best is None or (h < best.h and not tie) or (tie and area > best.area):
            best = _Iterate(h, perimeter, area, chosen, level)
        history.append((best.h, best.perimeter, best.area, new_h_tv))
        logger.debug("外側 %d: h=%.6f（最良 %.6f） h_tv=%.6f 内側=%d 相対ギャップ=%.2e",
                     n + 1, h, best.h, new_h_tv, iters, rel_gap)
        progress.set_postfix(h=f"{best.h:.5f}")

        unchanged = np.array_equal(chosen > 0, w > 0)
        small_step = (abs(new_h_tv - h_tv) < cfg.outer_tol
                      and previous_h - best.h < cfg.outer_tol)
        w, h_tv, threshold = chosen, new_h_tv, level
        if inner_ok and (unchanged or small_step):
            converged = True
            break
        budget = min(budget * cfg.inner_growth, float(cfg.max_inner_iters))
    progress.close()

    if not converged:
        logger.warning("外側反復が %d 回以内に収束しませんでした", cfg.max_outer)

    result = CheegerResult(
        h_estimate=best.h,
        indicator=field.with_values(best.values),
        history=history,
        ratio=best.h,
        converged=converged,
        threshold=best.threshold,
        domain=field,
        inner_iterations=total_inner,
        perimeter=best.perimeter,
        area=best.area,
    )
    logger.info("Cheeger定数 ĥ=%.6f（外側 %d 回、内側 %d 回、収束=%s）",
                best.h, len(history), total_inner, converged)
    return result


def minimality_gap(result: CheegerResult, domain: Optional[RasterField] = None) -> float:
    """
    |E Δ Ω| / |Ω|（格子上、Ω は被覆率で重みづけ）

    0 に近いほど領域自身が唯一の Cheeger集合であることを数値的に支持する
    """
    domain = domain or result.domain
    if not result.converged:
        logger.warning("収束していない結果の極小性ギャップを評価します")
    if domain.values.shape != result.indicator.values.shape:
        raise InvalidInputError("結果と領域の格子が一致しません")
    omega = np.where(domain.mask, domain.values, 0.0)
    total = float(np.sum(omega))
    if total <= 0:
        raise InvalidInputError("領域の面積が 0 です")
    return float(np.sum(np.abs(result.indicator.values - omega))) / total


def _boundary_band(region: np.ndarray) -> np.ndarray:
    return ndimage.binary_dilation(region) & ~ndimage.binary_erosion(region)


@dataclass(frozen=True)
class ReflectionReport:
    """軸に関する鏡映とのずれ（画素数）"""

    mismatch_x: int
    mismatch_y: int
    outside_band: int

    @property
    def within_band(self) -> bool:
        return self.outside_band == 0


def reflection_mismatch(result: CheegerResult, threshold: float = 0.5) -> ReflectionReport:
    """
    Cheeger集合とその x 軸・y 軸に関する鏡映との差

    ずれた画素がすべて集合の境界から1画素の帯に入っていれば within_band が真
    """
    region = result.indicator.values >= threshold
    band = _boundary_band(region)
    flip_x = region[::-1, :]
    flip_y = region[:, ::-1]
    diff_x = region ^ flip_x
    diff_y = region ^ flip_y
    outside = int(np.count_nonzero((diff_x | diff_y) & ~band))
    return ReflectionReport(int(diff_x.sum()), int(diff_y.sum()), outside)


def connected_components(result: CheegerResult, threshold: float = 0.5) -> int:
    """Cheeger集合の連結成分の数（4近傍）"""
    _, count = ndimage.label(result.indicator.values >= threshold)
    return int(count)


def volume_lower_bound_ok(result: CheegerResult, band_pixels: float = 1.0) -> bool:
    """|E| >= π(2/ĥ)² − （周長 × band_pixels 画素）を満たすか"""
    bound = math.pi * (2.0 / result.h_estimate) ** 2
    tolerance = band_pixels * result.perimeter * result.indicator.pixel
    return result.area >= bound - tolerance
