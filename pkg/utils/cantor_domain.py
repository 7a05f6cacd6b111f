"""
Cantor領域モジュール：太いCantor集合の反復、円弧バンプ F_δ、領域 Ω_ε とその測度の区間評価
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Tuple

import numpy as np
from scipy import integrate

from .domain_spec import UNIT_DISK, DomainSpec
from .errors import CertificationError, DepthLimitError, InvalidInputError
from .geom_core import CircularArc, IntervalValue, Point2, Segment

logger = logging.getLogger(__name__)

# 定理が適用できる ε の上限
EPSILON_REGIME = 1.0 / 24.0

# 2^N 本のギャップを配列で保持するため深さに上限を設ける
MAX_CANTOR_DEPTH = 22

# Cantor集合の長さを評価する無限積の打ち切り深さ（バンプの打ち切り N とは独立）
PRODUCT_DEPTH = 60

# これ未満の δ では面積を級数展開で評価する（桁落ち回避）
SERIES_DELTA = 1e-2


def _warn_regime(epsilon: float):
    if not (0 < epsilon < EPSILON_REGIME):
        logger.warning("ε=%.6g は定理の適用範囲 (0, 1/24) の外です", epsilon)


@dataclass(frozen=True)
class BumpSpec:
    """中心 midpoint に置かれたバンプ midpoint + F_δ"""

    delta: float
    midpoint: float

    def __post_init__(self):
        if not (0 < self.delta <= 0.5):
            raise InvalidInputError(f"バンプの半幅は (0, 1/2] にある必要があります: {self.delta}")

    def height(self, x):
        return bump_profile(self.delta, np.asarray(x, dtype=float) - self.midpoint)

    def arcs(self) -> List[CircularArc]:
        """
        境界を構成する半径1の4本の円弧（右上・左上・左下・右下の順）

        中心は (m ± δ, ±1)
        """
        a = math.asin(self.delta)
        m, d = self.midpoint, self.delta
        up = 1.5 * math.pi
        down = 0.5 * math.pi
        return [
            CircularArc(Point2(m + d, 1.0), 1.0, up - a, up),
            CircularArc(Point2(m - d, 1.0), 1.0, up, up + a),
            CircularArc(Point2(m - d, -1.0), 1.0, down - a, down),
            CircularArc(Point2(m + d, -1.0), 1.0, down, down + a),
        ]


@dataclass(frozen=True, eq=False)
class CantorStructure:
    """
    太いCantor集合 C^ε_N の反復結果

    配列はすべて読み取り専用。ギャップはレベル順、同一レベル内では左から順に並ぶ

    Attributes:
        epsilon: 初期区間 [-ε, ε] の半幅
        depth: 反復回数 N
        segment_left / segment_right: C^ε_N の各区間の端点
        gap_level: 各ギャップのレベル i (1..N)
        gap_index: レベル内の番号 j (1..2^{i-1})
        gap_midpoint: ギャップの中点 m^i_j
        gap_half_length: ギャップの半幅 δ_i
        level_deltas: レベルごとの δ_i（長さ N）
        level_lengths: H¹(C^ε_i)（i = 0..N、長さ N+1）
    """

    epsilon: float
    depth: int
    segment_left: np.ndarray
    segment_right: np.ndarray
    gap_level: np.ndarray
    gap_index: np.ndarray
    gap_midpoint: np.ndarray
    gap_half_length: np.ndarray
    level_deltas: np.ndarray
    level_lengths: np.ndarray

    @property
    def total_length(self) -> float:
        """H¹(C^ε_N)"""
        return float(self.level_lengths[-1])

    @property
    def gap_count(self) -> int:
        return int(self.gap_midpoint.size)

    def gaps_per_level(self) -> List[int]:
        return [int(n) for n in np.bincount(self.gap_level, minlength=self.depth + 1)[1:]]

    @property
    def segments(self) -> List[Segment]:
        return [Segment(Point2(a, 0.0), Point2(b, 0.0))
                for a, b in zip(self.segment_left.tolist(), self.segment_right.tolist())]

    @property
    def gaps(self) -> List[Tuple[int, int, float, float]]:
        """(レベル i, 番号 j, 中点 m^i_j, 半幅 δ_i) の一覧"""
        return list(zip(self.gap_level.tolist(), self.gap_index.tolist(),
                        self.gap_midpoint.tolist(), self.gap_half_length.tolist()))

    def bumps(self) -> Iterator[BumpSpec]:
        for m, d in zip(self.gap_midpoint.tolist(), self.gap_half_length.tolist()):
            yield BumpSpec(d, m)

    @cached_property
    def _sorted_gaps(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        order = np.argsort(self.gap_midpoint, kind='stable')
        mid = self.gap_midpoint[order]
        half = self.gap_half_length[order]
        return mid - half, mid, half

    def obstacle_mask(self, xs, ys) -> np.ndarray:
        """点がいずれかのバンプ（開集合）の内部にあるか"""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        xs, ys = np.broadcast_arrays(xs, ys)
        left, mid, half = self._sorted_gaps
        out = np.zeros(xs.shape, dtype=bool)
        if mid.size == 0:
            return out

        candidate = (np.abs(xs) < self.epsilon) & (np.abs(ys) < self.epsilon)
        if not candidate.any():
            return out
        cx, cy = xs[candidate], ys[candidate]
        idx = np.clip(np.searchsorted(left, cx, side='right') - 1, 0, mid.size - 1)
        local = cx - mid[idx]
        heights = bump_profile(half[idx], local)
        out[candidate] = np.abs(cy) < heights
        return out


def cantor_iterate(epsilon: float, N: int) -> CantorStructure:
    """
    [-ε, ε] から太いCantor集合を N 段階構成する

    レベル i では各区間の中央から長さ 2^{1-2i}·H¹(C^ε_{i-1}) の開区間を除く

    Args:
        epsilon: 初期区間の半幅 (0 < ε < 1)
        N: 反復回数 (>= 1)

    Returns:
        CantorStructure
    """
    if not (0 < epsilon < 1):
        raise InvalidInputError(f"ε は (0, 1) にある必要があります: {epsilon}")
    if int(N) != N or N < 1:
        raise InvalidInputError(f"反復回数は1以上の整数です: {N}")
    N = int(N)
    if N > MAX_CANTOR_DEPTH:
        raise DepthLimitError(f"反復回数 {N} は上限 {MAX_CANTOR_DEPTH} を超えています")
    _warn_regime(epsilon)

    left = np.array([-epsilon])
    right = np.array([epsilon])
    lengths = [2.0 * epsilon]
    deltas = []
    gap_levels, gap_indices, gap_mids, gap_halves = [], [], [], []

    for i in range(1, N + 1):
        delta = 2.0 ** (-2 * i) * lengths[-1]
        mids = 0.5 * (left + right)
        new_left = np.empty(2 * left.size)
        new_right = np.empty(2 * left.size)
        new_left[0::2] = left
        new_right[0::2] = mids - delta
        new_left[1::2] = mids + delta
        new_right[1::2] = right
        if np.min(new_right - new_left) <= 4.0 * np.finfo(float).eps * epsilon:
            raise DepthLimitError(f"レベル {i} で区間長がアンダーフローしました")

        gap_levels.append(np.full(mids.size, i, dtype=np.int64))
        gap_indices.append(np.arange(1, mids.size + 1, dtype=np.int64))
        gap_mids.append(mids)
        gap_halves.append(np.full(mids.size, delta))
        deltas.append(delta)
        lengths.append(lengths[-1] * (1.0 - 2.0 ** (-i)))
        left, right = new_left, new_right

    structure = CantorStructure(
        epsilon=float(epsilon),
        depth=N,
        segment_left=left,
        segment_right=right,
        gap_level=np.concatenate(gap_levels),
        gap_index=np.concatenate(gap_indices),
        gap_midpoint=np.concatenate(gap_mids),
        gap_half_length=np.concatenate(gap_halves),
        level_deltas=np.array(deltas),
        level_lengths=np.array(lengths),
    )
    for arr in (structure.segment_left, structure.segment_right, structure.gap_level,
                structure.gap_index, structure.gap_midpoint, structure.gap_half_length,
                structure.level_deltas, structure.level_lengths):
        arr.setflags(write=False)
    logger.debug("Cantor反復: ε=%.6g N=%d ギャップ数=%d", epsilon, N, structure.gap_count)
    return structure


def cantor_product(N: int) -> float:
    """部分積 ∏_{k=1..N} (1 − 2^{-k})"""
    value = 1.0
    for k in range(1, N + 1):
        value *= 1.0 - 2.0 ** (-k)
    return value


def fat_cantor_length(epsilon: float, N: int = PRODUCT_DEPTH) -> IntervalValue:
    """
    H¹(C^ε) = 2ε·∏_{k>=1}(1 − 2^{-k}) を含む区間

    上端は N までの部分積、下端は残りの積の対数の下界 −2^{-N}/(1 − 2^{-N-1}) から求める
    """
    if epsilon < 0:
        raise InvalidInputError(f"ε は非負である必要があります: {epsilon}")
    if N < 1:
        raise InvalidInputError(f"打ち切り深さは1以上です: {N}")
    if epsilon == 0:
        return IntervalValue(0.0, 0.0)
    hi = 2.0 * epsilon * cantor_product(N)
    log_tail = -(2.0 ** (-N)) / (1.0 - 2.0 ** (-N - 1))
    lo = hi * math.exp(log_tail)
    # 部分積の丸め誤差分（1段あたり約1ulp）だけ外側に広げる
    return IntervalValue.enclose(lo, hi, ulps=N + 4)


def bump_profile(delta, x):
    """
    f_δ(x) = 1 − sqrt(1 − (|x| − δ)²)（|x| < δ）、それ以外は 0

    delta・x ともに配列を受け付ける
    """
    delta = np.asarray(delta, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(delta <= 0):
        raise InvalidInputError("δ は正である必要があります")
    u = np.abs(x) - delta
    inside = u < 0
    u = np.where(inside, u, 0.0)
    # 1 − sqrt(1 − u²) = u² / (1 + sqrt(1 − u²))
    values = np.where(inside, u * u / (1.0 + np.sqrt(1.0 - u * u)), 0.0)
    if values.ndim == 0:
        return float(values)
    return values


def _bump_area(delta):
    """|F_δ| = 4δ − 2δ√(1−δ²) − 2 arcsin δ（小さい δ は級数展開）"""
    d = np.asarray(delta, dtype=float)
    closed = 4.0 * d - 2.0 * d * np.sqrt(1.0 - d * d) - 2.0 * np.arcsin(d)
    d2 = d * d
    series = d2 * d * (2.0 / 3.0 + d2 * (1.0 / 10.0 + d2 * (1.0 / 28.0 + d2 * (5.0 / 288.0))))
    return np.where(d < SERIES_DELTA, series, closed)


def bump_measures(delta: float) -> Tuple[float, float]:
    """
    バンプ F_δ の周長と面積

    Args:
        delta: 半幅 (0 <= δ <= 1/2)

    Returns:
        (周長 4 arcsin δ, 面積)
    """
    if delta < 0 or delta > 0.5:
        raise InvalidInputError(f"δ は [0, 1/2] にある必要があります: {delta}")
    if delta == 0:
        return 0.0, 0.0
    return 4.0 * math.asin(delta), float(_bump_area(delta))


def bump_measures_quadrature(delta: float) -> Tuple[float, float]:
    """数値積分による F_δ の周長と面積（閉形式の照合用）"""
    if not (0 < delta <= 0.5):
        raise InvalidInputError(f"δ は (0, 1/2] にある必要があります: {delta}")

    def profile(x):
        return bump_profile(delta, x)

    def arclength(x):
        u = x - delta
        return 1.0 / math.sqrt(1.0 - u * u)

    area, _ = integrate.quad(profile, 0.0, delta, epsabs=1e-14, epsrel=1e-12)
    half_perimeter, _ = integrate.quad(arclength, 0.0, delta, epsabs=1e-14, epsrel=1e-12)
    return 4.0 * half_perimeter, 4.0 * area


def max_bump_radius(structure: CantorStructure) -> float:
    """
    全バンプ上の点 p に対する |p| の上界

    f_δ は1-Lipschitzなので |y| <= δ − |x − m| が成り立ち、|p| <= |x| + |y| <= |m| + δ
    """
    if structure.gap_count == 0:
        return 0.0
    return float(np.max(np.abs(structure.gap_midpoint) + structure.gap_half_length))


def build_omega_eps(epsilon: float, N: int) -> DomainSpec:
    """
    Ω_ε = B_1 から全レベル i <= N のバンプ m^i_j + F_{δ_i} を除いた領域

    Args:
        epsilon: Cantor集合の半幅
        N: 打ち切り深さ

    Returns:
        DomainSpec
    """
    structure = cantor_iterate(epsilon, N)
    note = f"レベル {N} より深いバンプは省略（測度は区間で評価）"
    spec = DomainSpec(outer=UNIT_DISK, obstacle_kind='cantor_bumps', cantor=structure,
                      truncation_note=note,
                      metadata={'construction': 'omega_eps', 'epsilon': float(epsilon), 'depth': N})
    logger.info("Ω_ε を構成しました: ε=%.6g N=%d バンプ数=%d", epsilon, N, structure.gap_count)
    return spec


@dataclass(frozen=True)
class OmegaEpsReport:
    """Ω_ε の測度評価"""

    perimeter: IntervalValue
    area: IntervalValue
    topo_boundary_h1: IntervalValue
    cantor_gap: IntervalValue
    strict_inequality_certified: bool
    epsilon: float
    depth: int

    def to_dict(self) -> dict:
        return {
            'epsilon': self.epsilon,
            'depth': self.depth,
            'perimeter': self.perimeter.to_dict(),
            'area': self.area.to_dict(),
            'topo_boundary_h1': self.topo_boundary_h1.to_dict(),
            'cantor_gap': self.cantor_gap.to_dict(),
            'strict_inequality_certified': self.strict_inequality_certified,
        }


def _plain_disk_report(spec: DomainSpec) -> OmegaEpsReport:
    r = spec.outer.radius
    perimeter = IntervalValue.point(2.0 * math.pi * r)
    area = IntervalValue.point(math.pi * r * r)
    zero = IntervalValue.point(0.0)
    return OmegaEpsReport(perimeter, area, perimeter, zero, False, 0.0, 0)


def omega_eps_measures(spec: DomainSpec, product_depth: int = PRODUCT_DEPTH) -> OmegaEpsReport:
    """
    Ω_ε の周長・面積・位相的境界の H¹ を区間で評価する

    レベル N より深いバンプの寄与は δ_i = 2^{-2i}·H¹(C_{i-1}) と
    H¹(C) <= H¹(C_{i-1}) <= H¹(C_N) から等比級数で上下から抑える

    Raises:
        CertificationError: P(Ω_ε) < H¹(∂Ω_ε) を区間で分離できない場合
    """
    if spec.outer is None:
        raise InvalidInputError("空の領域の測度は定義されません")
    if spec.obstacle_kind == 'none':
        return _plain_disk_report(spec)
    if spec.obstacle_kind != 'cantor_bumps':
        raise InvalidInputError("Cantorバンプ列以外の領域には porous_measures を使用してください")

    structure = spec.cantor
    N = structure.depth
    R = spec.outer.radius
    deltas = structure.level_deltas
    counts = 2.0 ** np.arange(N)

    bump_perimeters = counts * 4.0 * np.arcsin(deltas)
    bump_areas = counts * _bump_area(deltas)
    perim_sum = math.fsum(bump_perimeters.tolist())
    area_sum = math.fsum(bump_areas.tolist())

    cantor_gap = fat_cantor_length(structure.epsilon, product_depth)
    length_n = structure.total_length
    delta_next = 2.0 ** (-2 * (N + 1)) * length_n
    arcsin_slope = 1.0 / math.sqrt(1.0 - delta_next ** 2)

    perim_tail_lo = 2.0 * cantor_gap.lo * 2.0 ** (-N)
    perim_tail_hi = 2.0 * length_n * arcsin_slope * 2.0 ** (-N)
    area_tail_lo = cantor_gap.lo ** 3 / 3.0 * 2.0 ** (-5 * N) / 31.0
    area_tail_hi = length_n ** 3 / 2.0 * 2.0 ** (-5 * N) / 31.0

    base_perimeter = 2.0 * math.pi * R
    base_area = math.pi * R * R
    perimeter = IntervalValue.enclose(base_perimeter + perim_sum + perim_tail_lo,
                                      base_perimeter + perim_sum + perim_tail_hi, ulps=8)
    area = IntervalValue.enclose(base_area - area_sum - area_tail_hi,
                                 base_area - area_sum - area_tail_lo, ulps=8)
    topo = perimeter + cantor_gap
    certified = perimeter.certainly_less(topo)

    report = OmegaEpsReport(perimeter, area, topo, cantor_gap, certified,
                            structure.epsilon, N)
    if not certified:
        raise CertificationError(
            f"P(Ω_ε) < H¹(∂Ω_ε) を区間で分離できません（周長の幅 {perimeter.width:.3e}、"
            f"ギャップ下端 {cantor_gap.lo:.3e}）。打ち切り深さ N を大きくしてください")
    logger.info("Ω_ε の測度: P∈[%.12f, %.12f] ギャップ=%.10f",
                perimeter.lo, perimeter.hi, cantor_gap.mid)
    return report
