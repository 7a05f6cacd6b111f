"""
幾何プリミティブモジュール：点・線分・円板・円弧と、補題で使う角度・距離の計算
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi

# 掃引角がこれ未満の円弧は退化として扱う
DEGENERATE_SWEEP = 1e-12

# 点が円弧上にあるとみなす許容誤差（半径に対する相対値）
ON_ARC_TOL = 1e-9

DEFAULT_ARC_SAMPLES = 4096


def normalize_angle(theta: float) -> float:
    """角度を [0, 2π) に正規化"""
    value = float(theta) % TWO_PI
    if value >= TWO_PI:
        value = 0.0
    return value


@dataclass(frozen=True)
class Point2:
    """平面上の点（単位なし座標）"""

    x: float
    y: float

    def __post_init__(self):
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidInputError(f"座標が有限ではありません: ({self.x}, {self.y})")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'y', y)

    @classmethod
    def polar(cls, radius: float, theta: float) -> "Point2":
        return cls(radius * math.cos(theta), radius * math.sin(theta))

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def scale(self, k: float) -> "Point2":
        return Point2(k * self.x, k * self.y)

    def dot(self, other: "Point2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


ORIGIN = Point2(0.0, 0.0)


@dataclass(frozen=True)
class Segment:
    """線分。a == b は degenerate=True の場合のみ許可"""

    a: Point2
    b: Point2
    degenerate: bool = False

    def __post_init__(self):
        if self.a == self.b and not self.degenerate:
            raise InvalidInputError("線分の端点が一致しています（degenerate=True が必要）")

    @property
    def length(self) -> float:
        return self.a.distance_to(self.b)

    @property
    def midpoint(self) -> Point2:
        return Point2(0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y))


@dataclass(frozen=True)
class Disk:
    """開円板 B_r(center)"""

    center: Point2
    radius: float

    def __post_init__(self):
        radius = float(self.radius)
        if not (math.isfinite(radius) and radius > 0):
            raise InvalidInputError(f"円板の半径は正である必要があります: {self.radius}")
        object.__setattr__(self, 'radius', radius)

    def contains(self, p: Point2, closed: bool = True) -> bool:
        d = self.center.distance_to(p)
        return d <= self.radius if closed else d < self.radius

    def to_dict(self) -> dict:
        return {'center': [self.center.x, self.center.y], 'radius': self.radius}

    @classmethod
    def from_dict(cls, data: dict) -> "Disk":
        return cls(Point2(*data['center']), data['radius'])


@dataclass(frozen=True)
class CircularArc:
    """
    円弧。角度はラジアンで [0, 2π) に正規化し、向きは明示的に保持する

    Args:
        center: 中心
        radius: 半径 (> 0)
        start_angle: 始点の偏角
        end_angle: 終点の偏角（start と一致する場合は全周）
        orientation: 'ccw' または 'cw'
    """

    center: Point2
    radius: float
    start_angle: float
    end_angle: float
    orientation: str = 'ccw'
    sweep: float = field(init=False, compare=False)

    def __post_init__(self):
        radius = float(self.radius)
        if not (math.isfinite(radius) and radius > 0):
            raise InvalidInputError(f"円弧の半径は正である必要があります: {self.radius}")
        if self.orientation not in ('ccw', 'cw'):
            raise InvalidInputError(f"向きは 'ccw' または 'cw' です: {self.orientation}")
        start = normalize_angle(self.start_angle)
        end = normalize_angle(self.end_angle)
        diff = (end - start) if self.orientation == 'ccw' else (start - end)
        sweep = diff % TWO_PI
        if sweep == 0.0:
            sweep = TWO_PI
        if sweep < DEGENERATE_SWEEP:
            raise InvalidInputError(f"退化した円弧です（掃引角 {sweep:.3e}）")
        object.__setattr__(self, 'radius', radius)
        object.__setattr__(self, 'start_angle', start)
        object.__setattr__(self, 'end_angle', end)
        object.__setattr__(self, 'sweep', sweep)

    @classmethod
    def from_sweep(cls, center: Point2, radius: float, start_angle: float,
                   sweep: float, orientation: str = 'ccw') -> "CircularArc":
        """始点角と掃引角から円弧を作成"""
        if sweep >= TWO_PI:
            return cls(center, radius, start_angle, start_angle, orientation)
        sign = 1.0 if orientation == 'ccw' else -1.0
        return cls(center, radius, start_angle, start_angle + sign * sweep, orientation)

    @property
    def sign(self) -> float:
        return 1.0 if self.orientation == 'ccw' else -1.0

    @property
    def length(self) -> float:
        return self.radius * self.sweep

    def angle_at(self, t: float) -> float:
        return self.start_angle + self.sign * t * self.sweep

    def point_at(self, t: float) -> Point2:
        theta = self.angle_at(t)
        return Point2(self.center.x + self.radius * math.cos(theta),
                      self.center.y + self.radius * math.sin(theta))

    def points(self, ts: np.ndarray) -> np.ndarray:
        """パラメータ列に対応する点を (m, 2) 配列で返す"""
        theta = self.start_angle + self.sign * np.asarray(ts, dtype=float) * self.sweep
        return np.column_stack([self.center.x + self.radius * np.cos(theta),
                                self.center.y + self.radius * np.sin(theta)])

    @property
    def start_point(self) -> Point2:
        return self.point_at(0.0)

    @property
    def end_point(self) -> Point2:
        return self.point_at(1.0)

    def tangent_at(self, t: float) -> Point2:
        """進行方向の単位接ベクトル"""
        theta = self.angle_at(t)
        return Point2(-self.sign * math.sin(theta), self.sign * math.cos(theta))

    def param_of(self, p: Point2, tol: float = ON_ARC_TOL) -> Optional[float]:
        """点 p が円弧上にあればパラメータ t ∈ [0, 1] を、なければ None を返す"""
        if abs(self.center.distance_to(p) - self.radius) > tol * max(1.0, self.radius):
            return None
        offset = ((math.atan2(p.y - self.center.y, p.x - self.center.x) - self.start_angle)
                  * self.sign) % TWO_PI
        t = offset / self.sweep
        if t <= 1.0 + tol:
            return min(t, 1.0)
        # 始点の直前（2π 近く）は t = 0 とみなす
        if (TWO_PI - offset) <= tol * TWO_PI:
            return 0.0
        return None

    def contains_point(self, p: Point2, tol: float = ON_ARC_TOL) -> bool:
        return self.param_of(p, tol) is not None

    def endpoint_kind(self, p: Point2, tol: float = ON_ARC_TOL) -> Optional[str]:
        """p が始点なら 'start'、終点なら 'end'、どちらでもなければ None"""
        scale = tol * max(1.0, self.radius)
        d_start = self.start_point.distance_to(p)
        d_end = self.end_point.distance_to(p)
        if min(d_start, d_end) > scale:
            return None
        return 'start' if d_start <= d_end else 'end'

    def half_tangent(self, kind: str) -> Point2:
        """端点から円弧の内側へ向かう半接線の単位ベクトル"""
        if kind == 'start':
            return self.tangent_at(0.0)
        return self.tangent_at(1.0).scale(-1.0)

    def endpoint(self, kind: str) -> Point2:
        return self.start_point if kind == 'start' else self.end_point

    @property
    def is_free_boundary_admissible(self) -> bool:
        """自由境界の弧として許される長さ（掃引角 ≤ π）か"""
        return self.sweep <= math.pi + 1e-15

    def to_dict(self) -> dict:
        return {
            'center': [self.center.x, self.center.y],
            'radius': self.radius,
            'start_angle': self.start_angle,
            'end_angle': self.end_angle,
            'orientation': self.orientation,
        }


@dataclass(frozen=True)
class IntervalValue:
    """実数の厳密な包含区間 [lo, hi]"""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidInputError(f"区間の端点が有限ではありません: [{self.lo}, {self.hi}]")
        if lo > hi:
            raise InvalidInputError(f"区間の下端が上端を超えています: [{lo}, {hi}]")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @classmethod
    def point(cls, value: float) -> "IntervalValue":
        return cls(value, value)

    @classmethod
    def enclose(cls, lo: float, hi: float, ulps: int = 2) -> "IntervalValue":
        """丸め誤差を考慮して外側に ulps 分だけ広げた区間"""
        for _ in range(ulps):
            lo = math.nextafter(lo, -math.inf)
            hi = math.nextafter(hi, math.inf)
        return cls(lo, hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol

    def is_subset_of(self, other: "IntervalValue") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def certainly_less(self, other: "IntervalValue") -> bool:
        """self のすべての値が other のすべての値より小さいか"""
        return self.hi < other.lo

    def __add__(self, other) -> "IntervalValue":
        if isinstance(other, IntervalValue):
            return IntervalValue.enclose(self.lo + other.lo, self.hi + other.hi, ulps=1)
        return IntervalValue.enclose(self.lo + other, self.hi + other, ulps=1)

    __radd__ = __add__

    def __neg__(self) -> "IntervalValue":
        return IntervalValue(-self.hi, -self.lo)

    def __sub__(self, other) -> "IntervalValue":
        return self + (-other)

    def __rsub__(self, other) -> "IntervalValue":
        return (-self) + other

    def scale(self, k: float) -> "IntervalValue":
        if k >= 0:
            return IntervalValue.enclose(k * self.lo, k * self.hi, ulps=1)
        return IntervalValue.enclose(k * self.hi, k * self.lo, ulps=1)

    def to_dict(self) -> dict:
        return {'lo': self.lo, 'hi': self.hi, 'width': self.width}

    @classmethod
    def from_dict(cls, data: dict) -> "IntervalValue":
        return cls(data['lo'], data['hi'])


def disk_measures(d: Disk) -> Tuple[float, float]:
    """
    円板の周長と面積

    Args:
        d: 円板

    Returns:
        (周長 2πr, 面積 πr²)
    """
    if not isinstance(d, Disk):
        raise InvalidInputError("Disk を指定してください")
    return TWO_PI * d.radius, math.pi * d.radius ** 2


def arc_min_distance_to_origin(arc: CircularArc,
                               samples: int = DEFAULT_ARC_SAMPLES) -> Tuple[float, float]:
    """
    円弧上の点の原点からの距離の最小値

    一様なパラメータ標本と端点の厳密評価のあと、最小標本の近傍で一度だけ局所精密化する

    Args:
        arc: 円弧
        samples: 標本数 (>= 2)

    Returns:
        (最小距離, 最小を与えるパラメータ t ∈ [0, 1])
    """
    if samples < 2:
        raise InvalidInputError(f"標本数は2以上が必要です: {samples}")

    ts = np.linspace(0.0, 1.0, int(samples))
    pts = arc.points(ts)
    dists = np.hypot(pts[:, 0], pts[:, 1])
    i = int(np.argmin(dists))
    best_d, best_t = float(dists[i]), float(ts[i])

    for t, p in ((0.0, arc.start_point), (1.0, arc.end_point)):
        d = p.norm()
        if d < best_d:
            best_d, best_t = d, t

    lo = float(ts[max(i - 1, 0)])
    hi = float(ts[min(i + 1, len(ts) - 1)])
    if hi > lo:
        res = minimize_scalar(lambda t: arc.point_at(t).norm(), bounds=(lo, hi),
                              method='bounded', options={'xatol': 1e-14})
        if res.success and float(res.fun) < best_d:
            best_d, best_t = float(res.fun), float(res.x)

    return best_d, best_t


def _rotation_toward_center(arc: CircularArc, p: Point2, h: Point2) -> float:
    s = h.cross(arc.center - p)
    return 1.0 if s >= 0 else -1.0


def endpoint_tangent_angle(arc: CircularArc, endpoint: Point2, ray_to: Point2) -> float:
    """
    端点における半接線（円弧の内側向き）から、端点→ray_to の線分までの角度

    角度は半接線から円弧の中心がある側へ回転して測り、[0, 2π) で返す

    Args:
        arc: 円弧
        endpoint: 円弧の端点
        ray_to: 線分の行き先

    Returns:
        角度 α（ラジアン）
    """
    kind = arc.endpoint_kind(endpoint)
    if kind is None:
        raise InvalidInputError(f"点 {endpoint.as_tuple()} は円弧の端点ではありません")
    p = arc.endpoint(kind)
    v = ray_to - p
    if v.norm() <= ON_ARC_TOL * max(1.0, arc.radius):
        raise InvalidInputError("ray_to が端点と一致しています")

    h = arc.half_tangent(kind)
    s = _rotation_toward_center(arc, p, h)
    signed = math.atan2(h.cross(v), h.dot(v))
    return normalize_angle(s * signed)


def chord_angle_eta(arc: CircularArc, p0: Point2, p: Point2) -> float:
    """
    端点 p0 における半接線と弦 p0→p のなす角 η

    円弧上の点に対して sin η = |p − p0| / (2r) が成り立つ

    Args:
        arc: 円弧
        p0: 円弧の端点
        p: 円弧上の点 (≠ p0)

    Returns:
        η ∈ [0, π]
    """
    kind = arc.endpoint_kind(p0)
    if kind is None:
        raise InvalidInputError(f"点 {p0.as_tuple()} は円弧の端点ではありません")
    if arc.param_of(p) is None:
        raise InvalidInputError(f"点 {p.as_tuple()} は円弧上にありません")
    start = arc.endpoint(kind)
    v = p - start
    if v.norm() <= ON_ARC_TOL * max(1.0, arc.radius):
        raise InvalidInputError("p が p0 と一致しています")

    h = arc.half_tangent(kind)
    return math.atan2(abs(h.cross(v)), h.dot(v))
