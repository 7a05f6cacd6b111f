"""
多孔領域モジュール：添字集合 J の順序、穴の列 ε_j, r_j と条件 (i)-(iv)、領域 Ω_0 / Ω_k、測度と境界密度比
"""
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from .domain_spec import UNIT_DISK, DomainSpec
from .errors import (CertificationError, ConfigError, ConstraintViolationError, DepthLimitError,
                     InvalidInputError)
from .geom_core import Disk, IntervalValue, Point2

logger = logging.getLogger(__name__)

# 条件 (i)-(iv) の定数
SUM_R_BOUND = 1.0 / 257.0
EPS_FIRST_BOUND = 0.25
DECAY_RATIO = 0.3
R_COEFFICIENT = 2.0 ** -18

# 競合集合の評価で使われる r_j <= 2^{-4} ε_j
R_SMALL_COEFFICIENT = 2.0 ** -4

DELTA_BOUND = 2.0 ** -7

DEFAULT_POROUS_DEPTH = 16

# 局所周長比を評価する半径の上限
MAX_LOCAL_RADIUS = 1.0 / 16.0

ON_CIRCLE_TOL = 1e-9


@dataclass(frozen=True, order=True)
class IndexPair:
    """J の元 j = (j1, j2)、1 <= j2 <= j1。辞書式順序が ≼ に一致する"""

    j1: int
    j2: int

    def __post_init__(self):
        if int(self.j1) != self.j1 or int(self.j2) != self.j2:
            raise InvalidInputError(f"添字は整数です: ({self.j1}, {self.j2})")
        if not (1 <= self.j2 <= self.j1):
            raise InvalidInputError(f"添字は 1 <= j2 <= j1 を満たす必要があります: ({self.j1}, {self.j2})")

    @property
    def rank(self) -> int:
        """≼ 順序での位置（(1,1) が 1）"""
        return self.j1 * (self.j1 - 1) // 2 + self.j2

    def as_tuple(self) -> Tuple[int, int]:
        return (self.j1, self.j2)

    def __str__(self):
        return f"({self.j1},{self.j2})"


FIRST_INDEX = IndexPair(1, 1)


def index_successor(j: IndexPair) -> IndexPair:
    """≼ 順序での次の添字"""
    if j.j2 == j.j1:
        return IndexPair(j.j1 + 1, 1)
    return IndexPair(j.j1, j.j2 + 1)


def iter_indices(start: IndexPair = FIRST_INDEX, j1_max: int = DEFAULT_POROUS_DEPTH) -> Iterator[IndexPair]:
    """start から j1 <= j1_max までの添字を ≼ 順に列挙"""
    j = start
    while j.j1 <= j1_max:
        yield j
        j = index_successor(j)


def index_from_rank(rank: int) -> IndexPair:
    if rank < 1:
        raise InvalidInputError(f"順位は1以上です: {rank}")
    j1 = int((math.isqrt(8 * rank) + 1) // 2)
    while j1 * (j1 - 1) // 2 >= rank:
        j1 -= 1
    while (j1 + 1) * j1 // 2 < rank:
        j1 += 1
    return IndexPair(j1, rank - j1 * (j1 - 1) // 2)


@dataclass(frozen=True)
class DecayCertificate:
    """
    生成済みの範囲より先の添字について成り立つ減衰の保証

    ε_{succ(j)} <= ratio·ε_j かつ r_j <= r_coefficient·ε_j³
    """

    ratio: float
    r_coefficient: float

    def __post_init__(self):
        if not (0 < self.ratio < 1) or not (self.r_coefficient > 0):
            raise InvalidInputError("減衰証明の係数が不正です")


@dataclass
class SequenceParams:
    """
    穴の列 ε_j, r_j（添字 j1 <= depth まで生成済み）

    eps と radii は ≼ 順（順位 1..）に並ぶ
    """

    eps: List[float]
    radii: List[float]
    depth: int
    certificate: Optional[DecayCertificate] = None
    generator: Dict = field(default_factory=dict)
    validated_depth: int = 0

    def __post_init__(self):
        expected = self.depth * (self.depth + 1) // 2
        if len(self.eps) != expected or len(self.radii) != expected:
            raise InvalidInputError(f"深さ {self.depth} には {expected} 個の ε_j, r_j が必要です")
        if any(not (e > 0) for e in self.eps) or any(not (r > 0) for r in self.radii):
            raise InvalidInputError("ε_j と r_j は正である必要があります")
        self.eps = [float(e) for e in self.eps]
        self.radii = [float(r) for r in self.radii]

    def _position(self, j: IndexPair) -> int:
        if j.j1 > self.depth:
            raise InvalidInputError(f"添字 {j} は生成済みの深さ {self.depth} を超えています")
        return j.rank - 1

    @property
    def eps_of(self) -> Dict[IndexPair, float]:
        return {index_from_rank(k + 1): e for k, e in enumerate(self.eps)}

    @property
    def r_of(self) -> Dict[IndexPair, float]:
        return {index_from_rank(k + 1): r for k, r in enumerate(self.radii)}

    def epsilon(self, j: IndexPair) -> float:
        return self.eps[self._position(j)]

    def radius(self, j: IndexPair) -> float:
        return self.radii[self._position(j)]

    def rho(self, j: IndexPair) -> float:
        return 1.0 - self.epsilon(j)

    @staticmethod
    def theta(j: IndexPair) -> float:
        return j.j2 * math.pi / (2.0 * (j.j1 + 1))

    def center(self, j: IndexPair) -> Point2:
        return Point2.polar(self.rho(j), self.theta(j))

    def hole(self, j: IndexPair) -> Disk:
        return Disk(self.center(j), self.radius(j))

    def with_overrides(self, eps: Optional[Dict[IndexPair, float]] = None,
                       radii: Optional[Dict[IndexPair, float]] = None) -> "SequenceParams":
        """一部の ε_j, r_j を置き換えた未検証のコピー"""
        new_eps = list(self.eps)
        new_radii = list(self.radii)
        for j, value in (eps or {}).items():
            new_eps[self._position(j)] = value
        for j, value in (radii or {}).items():
            new_radii[self._position(j)] = value
        generator = dict(self.generator, overridden=True)
        return SequenceParams(new_eps, new_radii, self.depth, self.certificate, generator)

    def to_dict(self) -> Dict:
        return {
            'depth': self.depth,
            'eps': self.eps,
            'radii': self.radii,
            'certificate': None if self.certificate is None else {
                'ratio': self.certificate.ratio,
                'r_coefficient': self.certificate.r_coefficient,
            },
            'generator': self.generator,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SequenceParams":
        cert = data.get('certificate')
        certificate = None if cert is None else DecayCertificate(cert['ratio'], cert['r_coefficient'])
        return cls(data['eps'], data['radii'], int(data['depth']), certificate,
                   data.get('generator', {}))


def default_sequences(eps1: float, safety: float = 1.0,
                      depth: int = DEFAULT_POROUS_DEPTH) -> SequenceParams:
    """
    ε_j = eps1·(3/10)^{rank(j)−1}、r_j = safety·2^{-18}·ε_j³ の既定の列

    Args:
        eps1: ε_(1,1) (0 < eps1 < 1/4)
        safety: r_j の縮小率 (0 < safety <= 1)
        depth: 生成する j1 の上限

    Returns:
        SequenceParams（検証済み）
    """
    if not eps1 > 0:
        raise InvalidInputError(f"ε_(1,1) は正である必要があります: {eps1}")
    if eps1 >= EPS_FIRST_BOUND:
        raise ConstraintViolationError(f"ε_(1,1)={eps1} は 1/4 未満である必要があります", ['ii'])
    if not (0 < safety <= 1):
        raise InvalidInputError(f"safety は (0, 1] にある必要があります: {safety}")
    if depth < 1:
        raise InvalidInputError(f"深さは1以上です: {depth}")

    count = depth * (depth + 1) // 2
    eps, radii = [], []
    e = float(eps1)
    for k in range(count):
        if k > 0:
            e = DECAY_RATIO * e
        r = safety * (R_COEFFICIENT * e ** 3)
        if r < sys.float_info.min:
            raise DepthLimitError(f"深さ {depth} では r_j がアンダーフローします（順位 {k + 1}）")
        eps.append(e)
        radii.append(r)

    seq = SequenceParams(
        eps, radii, depth,
        certificate=DecayCertificate(DECAY_RATIO, safety * R_COEFFICIENT),
        generator={'kind': 'default', 'eps1': float(eps1), 'safety': float(safety)},
    )
    report = validate_constraints(seq, depth)
    if not report.passed:
        raise ConstraintViolationError("既定の列が条件を満たしません", report.failed_labels)
    return seq


@dataclass(frozen=True)
class ConditionResult:
    label: str
    passed: bool
    worst_margin: float
    detail: str = ''

    def to_dict(self) -> Dict:
        return {'label': self.label, 'passed': self.passed,
                'worst_margin': self.worst_margin, 'detail': self.detail}


@dataclass
class ValidationReport:
    """条件ごとの検証結果"""

    depth: int
    conditions: Dict[str, ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    @property
    def failed_labels(self) -> List[str]:
        return [label for label, c in self.conditions.items() if not c.passed]

    def to_dict(self) -> Dict:
        return {'depth': self.depth, 'passed': self.passed,
                'conditions': {k: v.to_dict() for k, v in self.conditions.items()}}


@dataclass(frozen=True)
class SeriesReport:
    """Σ r_j と Σ r_j² の区間（start ≼ j の全添字にわたる無限和）"""

    sum_r: IntervalValue
    sum_r2: IntervalValue
    explicit_count: int


def _certificate_tail(seq: SequenceParams) -> Tuple[float, float]:
    if seq.certificate is None:
        raise CertificationError("減衰証明がないため無限和の裾を評価できません")
    q, c = seq.certificate.ratio, seq.certificate.r_coefficient
    e_last = seq.eps[-1]
    q3 = q ** 3
    q6 = q ** 6
    tail_r = c * e_last ** 3 * q3 / (1.0 - q3)
    tail_r2 = c * c * e_last ** 6 * q6 / (1.0 - q6)
    return tail_r, tail_r2


def porous_series(seq: SequenceParams, N: int, start: IndexPair = FIRST_INDEX) -> SeriesReport:
    """
    Σ_{start ≼ j} r_j と Σ r_j² を区間で評価する

    j1 <= N の項は陽に、生成済みの残りも陽に足し、それより先は減衰証明の等比級数で抑える
    """
    if N < 1 or N > seq.depth:
        raise InvalidInputError(f"N は 1..{seq.depth} の範囲で指定してください: {N}")
    first = start.rank - 1
    radii = np.asarray(seq.radii[first:] if first < len(seq.radii) else [], dtype=float)
    explicit = N * (N + 1) // 2 - first
    s1 = math.fsum(radii.tolist())
    s2 = math.fsum((radii ** 2).tolist())
    # start が生成範囲より先でも、最後の生成項からの等比級数が上界になる
    tail_r, tail_r2 = _certificate_tail(seq)
    sum_r = IntervalValue.enclose(s1, s1 + tail_r, ulps=4)
    sum_r2 = IntervalValue.enclose(s2, s2 + tail_r2, ulps=4)
    return SeriesReport(IntervalValue(max(sum_r.lo, 0.0), sum_r.hi),
                        IntervalValue(max(sum_r2.lo, 0.0), sum_r2.hi),
                        max(explicit, 0))


def _pair_margins(eps: np.ndarray, theta: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """全ての穴の組について |x_j − x_j'| − (r_j + r_j')（pdist の並び）"""
    d_eps = pdist(eps[:, None], 'cityblock')
    d_theta = pdist(theta[:, None], 'cityblock')
    iu, ju = np.triu_indices(eps.size, k=1)
    rho_prod = (1.0 - eps[iu]) * (1.0 - eps[ju])
    dist = np.sqrt(d_eps ** 2 + 4.0 * rho_prod * np.sin(0.5 * d_theta) ** 2)
    return dist - (radii[iu] + radii[ju])


def validate_constraints(seq: SequenceParams, N: int) -> ValidationReport:
    """
    条件 (i)-(iv) と派生条件を j1 <= N の添字について検証する

    穴の中心は 1 − ε_j と角度から差を直接計算する（ρ_j が 1 に丸められる深い穴でも正確）

    Returns:
        ValidationReport（失敗は例外ではなくレポートに記録）
    """
    if N < 1 or N > seq.depth:
        raise InvalidInputError(f"N は 1..{seq.depth} の範囲で指定してください: {N}")

    count = N * (N + 1) // 2
    eps = np.asarray(seq.eps, dtype=float)
    radii = np.asarray(seq.radii, dtype=float)
    indices = [index_from_rank(k + 1) for k in range(count)]
    conditions: Dict[str, ConditionResult] = {}

    try:
        series = porous_series(seq, N)
        margin = SUM_R_BOUND - series.sum_r.hi
        conditions['i'] = ConditionResult('i', margin >= 0, margin,
                                          f"Σr_j <= {series.sum_r.hi:.6e}")
    except CertificationError as e:
        conditions['i'] = ConditionResult('i', False, -math.inf, str(e))

    margin = EPS_FIRST_BOUND - eps[0]
    conditions['ii'] = ConditionResult('ii', margin > 0, margin, f"ε_(1,1) = {eps[0]:.6g}")

    # 後続が生成済みである組 (j, succ(j)) について
    pairs = min(count, len(eps) - 1)
    e_now, e_next = eps[:pairs], eps[1:pairs + 1]
    r_now, r_next = radii[:pairs], radii[1:pairs + 1]
    if pairs > 0:
        decay = DECAY_RATIO * e_now - e_next
        worst = int(np.argmin(decay))
        conditions['iii'] = ConditionResult(
            'iii', bool(np.all(decay >= 0)), float(decay[worst] / e_now[worst]),
            f"最悪の添字 {indices[worst]}")
        gap = (e_now - 2.0 * e_next) - (r_now + 2.0 * r_next)
        worst = int(np.argmin(gap))
        conditions['gap'] = ConditionResult(
            'gap', bool(np.all(gap >= 0)), float(gap[worst]),
            "ε_j − 2ε_{j+1} >= r_j + 2r_{j+1}")
    else:
        conditions['iii'] = ConditionResult('iii', True, math.inf, '検査対象なし')
        conditions['gap'] = ConditionResult('gap', True, math.inf, '検査対象なし')

    e_n, r_n = eps[:count], radii[:count]
    cube = R_COEFFICIENT * e_n ** 3
    rel = (cube - r_n) / cube
    worst = int(np.argmin(rel))
    conditions['iv'] = ConditionResult('iv', bool(np.all(rel >= -1e-12)), float(rel[worst]),
                                       f"最悪の添字 {indices[worst]}")

    small = (R_SMALL_COEFFICIENT * e_n - r_n) / e_n
    worst = int(np.argmin(small))
    conditions['r_small'] = ConditionResult('r_small', bool(np.all(small >= 0)), float(small[worst]),
                                            "r_j <= 2^{-4} ε_j")

    inside = (e_n - r_n) / e_n
    worst = int(np.argmin(inside))
    conditions['contained'] = ConditionResult('contained', bool(np.all(inside > 0)),
                                              float(inside[worst]), "ρ_j + r_j < 1")

    if count > 1:
        theta = np.array([SequenceParams.theta(j) for j in indices])
        margins = _pair_margins(e_n, theta, r_n)
        worst = int(np.argmin(margins))
        conditions['disjoint'] = ConditionResult('disjoint', bool(np.all(margins > 0)),
                                                 float(margins[worst]),
                                                 f"{margins.size} 組の穴を検査")
    else:
        conditions['disjoint'] = ConditionResult('disjoint', True, math.inf, '穴が1個のみ')

    report = ValidationReport(N, conditions)
    if report.passed:
        seq.validated_depth = max(seq.validated_depth, N)
    else:
        logger.warning("条件を満たしません: %s", ', '.join(report.failed_labels))
    return report


def build_omega0(seq: SequenceParams, N: int, start: IndexPair = FIRST_INDEX) -> DomainSpec:
    """
    Ω_k = B_1 から start ≼ j（j1 <= N）の閉じた穴 B_j を除いた領域

    start=(1,1) で Ω_0、それ以外では start より前の穴を埋めた Ω_k になる
    """
    if seq.validated_depth < N:
        raise InvalidInputError(f"列が深さ {N} まで検証されていません（validate_constraints を先に実行）")
    holes, labels = [], []
    for j in iter_indices(start, N):
        holes.append(seq.hole(j))
        labels.append(j.as_tuple())

    note = f"j1 > {N} の穴は省略（測度は区間で評価）"
    metadata = {
        'construction': 'omega0',
        'depth': N,
        'start': list(start.as_tuple()),
        'sequence': seq.to_dict(),
    }
    kind = 'holes' if holes else 'none'
    spec = DomainSpec(outer=UNIT_DISK, obstacle_kind=kind, holes=holes, hole_labels=labels,
                      truncation_note=note, metadata=metadata)
    logger.info("Ω_%s を構成しました: 穴の数=%d (j1 <= %d)", start, len(holes), N)
    return spec


@dataclass(frozen=True)
class PorousReport:
    """Ω_0 (Ω_k) の測度評価"""

    perimeter: IntervalValue
    area: IntervalValue
    delta: float
    delta_interval: IntervalValue
    delta_bound_ok: bool
    h_upper: float
    volume_lower: float
    hole_count: int

    def to_dict(self) -> Dict:
        return {
            'perimeter': self.perimeter.to_dict(),
            'area': self.area.to_dict(),
            'delta': self.delta,
            'delta_interval': self.delta_interval.to_dict(),
            'delta_bound_ok': self.delta_bound_ok,
            'h_upper': self.h_upper,
            'volume_lower': self.volume_lower,
            'hole_count': self.hole_count,
        }


def _delta_from_series(sum_r: float, sum_r2: float) -> float:
    # (1 + Σr)/(1 − Σr²) − 1 を桁落ちなしで
    return (sum_r + sum_r2) / (1.0 - sum_r2)


def sequence_from_metadata(spec: DomainSpec) -> Optional[SequenceParams]:
    """spec.metadata['sequence'] から列を復元する（なければ None）"""
    data = spec.metadata.get('sequence')
    if data is None:
        return None
    try:
        return SequenceParams.from_dict(data)
    except InvalidInputError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ConfigError(f"穴の列の情報が不正です: {e!r}") from None


def porous_measures(spec: DomainSpec, seq: Optional[SequenceParams], N: int) -> PorousReport:
    """
    周長 2π + 2πΣr_j、面積 π − πΣr_j²、δ と Cheeger定数の上界 2(1+δ)

    Args:
        spec: build_omega0 の結果（穴がなければ円板として扱う）
        seq: 列（spec.metadata から復元する場合は None）
        N: 陽に和をとる j1 の上限
    """
    if spec.outer is None:
        raise InvalidInputError("空の領域の測度は定義されません")
    if spec.obstacle_kind == 'cantor_bumps':
        raise InvalidInputError("Cantorバンプ列の領域には omega_eps_measures を使用してください")

    if spec.obstacle_kind == 'none' and seq is None and spec.metadata.get('sequence') is None:
        r = spec.outer.radius
        perimeter = IntervalValue.point(2.0 * math.pi * r)
        area = IntervalValue.point(math.pi * r * r)
        zero = IntervalValue.point(0.0)
        return PorousReport(perimeter, area, 0.0, zero, True, 2.0 / r, math.pi * r * r, 0)

    if seq is None:
        seq = sequence_from_metadata(spec)
        if seq is None:
            raise CertificationError("穴の列の情報がないため無限和の裾を評価できません")
    start = IndexPair(*spec.metadata.get('start', [1, 1]))
    series = porous_series(seq, min(N, seq.depth), start)

    two_pi = 2.0 * math.pi
    perimeter = IntervalValue.enclose(two_pi + two_pi * series.sum_r.lo,
                                      two_pi + two_pi * series.sum_r.hi, ulps=4)
    area = IntervalValue.enclose(math.pi - math.pi * series.sum_r2.hi,
                                 math.pi - math.pi * series.sum_r2.lo, ulps=4)

    delta_lo = _delta_from_series(series.sum_r.lo, series.sum_r2.lo)
    delta_hi = _delta_from_series(series.sum_r.hi, series.sum_r2.hi)
    delta_interval = IntervalValue.enclose(delta_lo, delta_hi, ulps=2)
    delta = delta_interval.hi
    report = PorousReport(
        perimeter=perimeter,
        area=area,
        delta=delta,
        delta_interval=delta_interval,
        delta_bound_ok=delta < DELTA_BOUND,
        h_upper=2.0 * (1.0 + delta),
        volume_lower=math.pi / (1.0 + delta) ** 2,
        hole_count=spec.obstacle_count,
    )
    logger.info("Ω_0 の測度: δ=%.4e h<=%.10f", delta, report.h_upper)
    return report


def _arc_inside_ball(d: float, r: float, s: float) -> float:
    """中心間距離 d の円（半径 r）のうち B_s に入る部分の長さ"""
    if d + r <= s:
        return 2.0 * math.pi * r
    if d >= s + r or d + s <= r:
        return 0.0
    cos_phi = (d * d + r * r - s * s) / (2.0 * d * r)
    return 2.0 * r * math.acos(max(-1.0, min(1.0, cos_phi)))


def local_perimeter_ratio(spec: DomainSpec, y: Point2, s: float) -> float:
    """
    P(Ω; B_s(y)) / (2s)（y は外側の円周上）

    外側の円周の寄与は 4R·arcsin(s/(2R))、穴は B_s(y) に含まれれば全周を数える
    """
    if spec.outer is None or spec.obstacle_kind == 'cantor_bumps':
        raise InvalidInputError("局所周長比は円形の穴をもつ領域でのみ評価できます")
    R = spec.outer.radius
    c = spec.outer.center
    if abs(y.distance_to(c) - R) > ON_CIRCLE_TOL:
        raise InvalidInputError(f"y={y.as_tuple()} は外側の円周上にありません")
    if not (0 < s < MAX_LOCAL_RADIUS):
        raise InvalidInputError(f"s は (0, 1/16) にある必要があります: {s}")

    total = 4.0 * R * math.asin(s / (2.0 * R))
    if spec.holes:
        centers, radii = spec.hole_arrays()
        dists = np.hypot(centers[:, 0] - y.x, centers[:, 1] - y.y)
        near = np.nonzero(dists < s + radii)[0]
        total += math.fsum(_arc_inside_ball(float(dists[k]), float(radii[k]), s) for k in near)
    return total / (2.0 * s)


@dataclass
class DensitySweep:
    """境界点と半径の組ごとの局所周長比"""

    points: List[Point2]
    radii: List[float]
    ratios: np.ndarray
    fitted_constant: float
    monotone: bool

    def to_dict(self) -> Dict:
        return {
            'points': [p.as_tuple() for p in self.points],
            'radii': self.radii,
            'ratios': self.ratios.tolist(),
            'fitted_constant': self.fitted_constant,
            'monotone': self.monotone,
        }


def first_quadrant_points(count: int) -> List[Point2]:
    """閉じた第1象限の円弧上に等間隔に並ぶ点"""
    if count < 1:
        raise InvalidInputError(f"点の数は1以上です: {count}")
    if count == 1:
        return [Point2.polar(1.0, math.pi / 4)]
    return [Point2.polar(1.0, 0.5 * math.pi * k / (count - 1)) for k in range(count)]


def geometric_radii(s_max: float = 0.04, s_min: float = 0.0005, count: int = 8) -> List[float]:
    if count < 2 or not (0 < s_min < s_max < MAX_LOCAL_RADIUS):
        raise InvalidInputError("半径の範囲が不正です")
    return np.geomspace(s_max, s_min, count).tolist()


def boundary_density_sweep(spec: DomainSpec, points: Sequence[Point2],
                           radii: Sequence[float], tol: float = 1e-9) -> DensitySweep:
    """
    各 (y, s) で局所周長比を求め、ratio <= 1 + C·s を満たす最小の C を当てはめる

    monotone は各 y について |ratio − 1| が s の減少とともに増えないかを表す
    """
    points = list(points)
    radii = sorted((float(s) for s in radii), reverse=True)
    ratios = np.array([[local_perimeter_ratio(spec, y, s) for s in radii] for y in points])
    s_arr = np.asarray(radii)
    fitted = float(max(0.0, np.max((ratios - 1.0) / s_arr[None, :])))
    deviation = np.abs(ratios - 1.0)
    monotone = bool(np.all(np.diff(deviation, axis=1) <= tol))
    return DensitySweep(points, radii, ratios, fitted, monotone)


@dataclass(frozen=True)
class LadderEntry:
    start: IndexPair
    hole_count: int
    perimeter: IntervalValue
    area: IntervalValue


def omega_ladder(seq: SequenceParams, N: int, starts: Sequence[IndexPair]) -> List[LadderEntry]:
    """
    穴を1つずつ埋めた領域 Ω_k の列の測度

    k が ≼ 順に進むほど周長・面積は単位円板の値へ単調に近づく
    """
    entries = []
    for start in sorted(starts):
        spec = build_omega0(seq, N, start)
        report = porous_measures(spec, seq, N)
        entries.append(LadderEntry(start, spec.obstacle_count, report.perimeter, report.area))
    return entries
