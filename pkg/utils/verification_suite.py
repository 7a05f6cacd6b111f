"""
検証スイートモジュール：補題と不等式の連鎖をランダム標本と算術で確かめる

各検査は (seed, パラメータ) が同じなら同じレポートを返す
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.spatial.distance import pdist
from tqdm import tqdm

from .cantor_domain import EPSILON_REGIME, build_omega_eps, omega_eps_measures
from .cheeger_solver import CheegerConfig, CheegerResult, solve_cheeger
from .domain_spec import UNIT_DISK, DomainSpec
from .errors import InvalidInputError
from .geom_core import (ORIGIN, CircularArc, IntervalValue, Point2, arc_min_distance_to_origin,
                        chord_angle_eta, endpoint_tangent_angle)
from .porous_domain import (DELTA_BOUND, R_SMALL_COEFFICIENT, IndexPair, SequenceParams,
                            boundary_density_sweep, build_omega0, default_sequences,
                            first_quadrant_points, geometric_radii, iter_indices,
                            porous_measures, sequence_from_metadata, validate_constraints)
from .raster import rasterize

logger = logging.getLogger(__name__)

ARC_TOL = 1e-9

# r_j = 2^{-18}ε_j³ ちょうどの列では最後の不等式が等号になる
REL_TOL = 1e-12

# 反例として保存する件数の上限
MAX_EXAMPLES = 5

# 棄却標本の上限（受理数に対する倍率）
MAX_ATTEMPT_FACTOR = 400

# 境界の局所周長比 ratio <= 1 + C·s の C の上限
MAX_DENSITY_CONSTANT = 50.0


@dataclass
class CheckReport:
    """検査結果 {name, parameters, trials, violations, worst_margin}"""

    name: str
    parameters: Dict
    trials: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    skipped: Dict[str, int] = field(default_factory=dict)
    examples: List[Dict] = field(default_factory=list)
    extras: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, margin: float, example: Optional[Dict] = None):
        self.trials += 1
        self.worst_margin = min(self.worst_margin, margin)
        if margin < 0:
            self.violations += 1
            if example is not None and len(self.examples) < MAX_EXAMPLES:
                self.examples.append(example)

    def skip(self, reason: str):
        self.skipped[reason] = self.skipped.get(reason, 0) + 1

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'parameters': self.parameters,
            'trials': self.trials,
            'violations': self.violations,
            'worst_margin': None if math.isinf(self.worst_margin) else self.worst_margin,
            'skipped': self.skipped,
            'examples': self.examples,
            'extras': self.extras,
            'passed': self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


def _log_rejections(report: CheckReport, attempts: int):
    rejected = sum(report.skipped.values())
    if attempts:
        logger.info("%s: 受理 %d / 試行 %d（棄却率 %.1f%%）", report.name, report.trials,
                    attempts, 100.0 * rejected / attempts)


# ---------------------------------------------------------------------------
# 円弧の最小距離（中心 o の円環内の凸領域）

def _arc_radial_range(arc: CircularArc) -> Tuple[float, float]:
    """円弧上の |p| の最小値と最大値（解析的）"""
    candidates = [arc.start_point.norm(), arc.end_point.norm()]
    d = arc.center.norm()
    if d > 0:
        u = arc.center.scale(1.0 / d)
        far = arc.center + u.scale(arc.radius)
        near = arc.center - u.scale(arc.radius)
        if arc.contains_point(far):
            candidates.append(far.norm())
        if arc.contains_point(near):
            candidates.append(near.norm())
    return min(candidates), max(candidates)


def _region_is_convex(arc: CircularArc, samples: int = 32) -> bool:
    """原点・a・円弧・b で囲まれる領域の凸性（境界を一周したときの向きの一貫性）"""
    pts = np.vstack([[0.0, 0.0], arc.points(np.linspace(0.0, 1.0, samples))])
    edges = np.roll(pts, -1, axis=0) - pts
    nxt = np.roll(edges, -1, axis=0)
    cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
    scale = np.max(np.abs(cross))
    if scale == 0:
        return False
    cross = cross / scale
    return bool(np.all(cross >= -1e-12) or np.all(cross <= 1e-12))


def check_arc_min_lemma(trials: int, rng_seed: int, show_progress: bool = False) -> CheckReport:
    """
    半径 r < 1/2 の円弧が円環 1/2 <= |p| <= 1 に含まれ、原点と端点 a, b と円弧で囲む領域が凸なら
    円弧上で |p| >= min(|a|, |b|) となることを標本で確かめる

    半径は 0.6 まで標本化し、r >= 1/2 の配置は前提条件のフィルタで除く
    """
    if trials < 1:
        raise InvalidInputError(f"試行回数は1以上です: {trials}")
    rng = np.random.default_rng(rng_seed)
    report = CheckReport('lemma21', {'trials': trials, 'seed': rng_seed, 'tol': ARC_TOL})
    attempts = 0
    progress = tqdm(total=trials, desc="lemma21", disable=not show_progress)
    while report.trials < trials and attempts < trials * MAX_ATTEMPT_FACTOR:
        attempts += 1
        radius = rng.uniform(0.02, 0.6)
        rc = 0.9 * math.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2.0 * math.pi)
        center = Point2.polar(rc, phi)
        start = rng.uniform(0.0, 2.0 * math.pi)
        sweep = rng.uniform(1e-3, math.pi)
        if radius >= 0.5:
            report.skip('radius')
            continue
        arc = CircularArc.from_sweep(center, radius, start, sweep)
        lo, hi = _arc_radial_range(arc)
        if lo < 0.5 or hi > 1.0:
            report.skip('annulus')
            continue
        if not _region_is_convex(arc):
            report.skip('convexity')
            continue

        a, b = arc.start_point.norm(), arc.end_point.norm()
        dmin, t_min = arc_min_distance_to_origin(arc)
        margin = dmin - (min(a, b) - ARC_TOL)
        report.record(margin, {'center': center.as_tuple(), 'radius': radius,
                               'start': start, 'sweep': sweep, 't_min': t_min})
        progress.update(1)
    progress.close()
    _log_rejections(report, attempts)
    return report


# ---------------------------------------------------------------------------
# 格子上の Cheeger集合に対する検査

def _disk_pixels(result: CheegerResult, z: Point2, radius: float):
    ind = result.indicator
    x0, y0, px = ind.origin.x, ind.origin.y, ind.pixel
    j0 = max(int(math.floor((z.x - radius - x0) / px)) - 1, 0)
    j1 = min(int(math.ceil((z.x + radius - x0) / px)) + 1, ind.nx)
    i0 = max(int(math.floor((z.y - radius - y0) / px)) - 1, 0)
    i1 = min(int(math.ceil((z.y + radius - y0) / px)) + 1, ind.ny)
    xs = x0 + (np.arange(j0, j1) + 0.5) * px
    ys = y0 + (np.arange(i0, i1) + 0.5) * px
    X, Y = np.meshgrid(xs, ys)
    dist = np.hypot(X - z.x, Y - z.y)
    return (slice(i0, i1), slice(j0, j1)), dist


def check_density_estimate(result: CheegerResult, spec: Optional[DomainSpec] = None,
                           trials: int = 1000, rng_seed: int = 0) -> CheckReport:
    """
    |B_r(z) \\ E| <= πr²/36 なら B_{2r/3}(z) ⊂ E（1画素の帯を除く）を標本で確かめる

    B_r(z) が領域のマスクに入らない標本と、πr²/36 が1画素に満たない標本は除く
    """
    rng = np.random.default_rng(rng_seed)
    ind = result.indicator
    px = ind.pixel
    report = CheckReport('density_estimate', {'trials': trials, 'seed': rng_seed, 'pixel': px})
    if spec is not None and spec.outer is not None:
        xmin, xmax, ymin, ymax = spec.bounds()
    else:
        xmin, ymin = ind.origin.x, ind.origin.y
        xmax, ymax = xmin + ind.nx * px, ymin + ind.ny * px
    r_max = 0.5 * min(xmax - xmin, ymax - ymin)
    r_min = 6.0 * px / math.sqrt(math.pi)
    mask = result.domain.values >= 0.5
    values = ind.values
    attempts = 0
    while report.trials < trials and attempts < trials * MAX_ATTEMPT_FACTOR:
        attempts += 1
        z = Point2(rng.uniform(xmin, xmax), rng.uniform(ymin, ymax))
        r = rng.uniform(0.0, r_max)
        if r < r_min:
            report.skip('resolution')
            continue
        window, dist = _disk_pixels(result, z, r + px)
        inside_ball = dist <= r
        if not inside_ball.any() or not np.all(mask[window][dist <= r + px]):
            report.skip('ball_outside_domain')
            continue
        missing = float(np.sum((1.0 - values[window])[inside_ball])) * px * px
        if missing > math.pi * r * r / 36.0:
            report.skip('hypothesis')
            continue
        core = dist <= 2.0 * r / 3.0 - px
        absent = int(np.count_nonzero(values[window][core] < 0.5))
        report.record(-float(absent), {'z': z.as_tuple(), 'r': r, 'missing_pixels': absent})
    _log_rejections(report, attempts)
    return report


def check_half_disk_inclusion(result: CheegerResult, radius: float = 0.5,
                              band_pixels: float = 1.0) -> bool:
    """B_{1/2} ⊂ E（境界から band_pixels 画素の帯を除く）か"""
    window, dist = _disk_pixels(result, ORIGIN, radius)
    core = dist <= radius - band_pixels * result.indicator.pixel
    if not core.any():
        return False
    region = result.indicator.values[window]
    if region.shape != dist.shape:
        return False
    return bool(np.all(region[core] >= 0.5))


# ---------------------------------------------------------------------------
# 端点の角度の評価

@dataclass(frozen=True)
class ArcEndpointGeometry:
    """
    |p| を最小にする端点 p0 をもつ円弧と、角度 α, η, ξ = α − η

    gamma は三角形 (p0, 中心, 原点) の p0 における内角（α = π/2 + γ）、
    beta は原点における内角、sigma は中心における内角
    """

    p0: Point2
    arc: CircularArc
    p: Point2
    d0: float
    alpha: float
    eta: float
    xi: float
    gamma: float
    sigma: float
    beta: float

    def to_dict(self) -> Dict:
        return {'p0': self.p0.as_tuple(), 'p': self.p.as_tuple(), 'arc': self.arc.to_dict(),
                'd0': self.d0, 'alpha': self.alpha, 'eta': self.eta, 'xi': self.xi,
                'gamma': self.gamma, 'sigma': self.sigma, 'beta': self.beta}


def _triangle_angle(at: Point2, u: Point2, v: Point2) -> float:
    a, b = u - at, v - at
    return math.atan2(abs(a.cross(b)), a.dot(b))


def make_arc_geometry(arc: CircularArc, p0: Point2, p: Point2) -> ArcEndpointGeometry:
    """円弧・端点 p0・円弧上の点 p から角度を計算する"""
    alpha = endpoint_tangent_angle(arc, p0, ORIGIN)
    eta = chord_angle_eta(arc, p0, p)
    beta = _triangle_angle(ORIGIN, p0, arc.center)
    sigma = _triangle_angle(arc.center, ORIGIN, p0)
    return ArcEndpointGeometry(p0=p0, arc=arc, p=p, d0=1.0 - p0.norm(), alpha=alpha, eta=eta,
                               xi=alpha - eta, gamma=alpha - 0.5 * math.pi, sigma=sigma, beta=beta)


def sample_angle_geometries(trials: int, rng_seed: int) -> Tuple[List[ArcEndpointGeometry], Dict[str, int]]:
    """
    角度評価の前提を満たす配置を棄却法で生成する

    半径 r ∈ (1/3, 1/2)、d0 ∈ (0, 1/3)、円弧は p0 から |p| が増える向きに進み、
    ∂B_1 までの距離が d* < d0/2 となる点で終わる。p は |p − p0| < d0/12 を満たす
    """
    rng = np.random.default_rng(rng_seed)
    geometries: List[ArcEndpointGeometry] = []
    rejected: Dict[str, int] = {}
    attempts = 0
    while len(geometries) < trials and attempts < trials * MAX_ATTEMPT_FACTOR:
        attempts += 1
        d0 = rng.uniform(1e-3, 1.0 / 3.0)
        r = rng.uniform(1.0 / 3.0, 0.5)
        p0 = Point2.polar(1.0 - d0, rng.uniform(0.0, 2.0 * math.pi))
        psi = rng.uniform(0.0, 2.0 * math.pi)
        center = p0 + Point2.polar(r, psi)
        d_star = rng.uniform(0.0, 0.5 * d0)
        target = 1.0 - d_star
        if center.norm() < 1.0 - r - 0.5 * d0 or center.norm() + r <= target:
            rejected['center'] = rejected.get('center', 0) + 1
            continue

        theta0 = (p0 - center).angle()
        tangent = Point2(-math.sin(theta0), math.cos(theta0))
        slope = tangent.dot(p0)
        if abs(slope) < 1e-12:
            rejected['tangent'] = rejected.get('tangent', 0) + 1
            continue
        orientation = 'ccw' if slope > 0 else 'cw'
        sign = 1.0 if slope > 0 else -1.0

        def excess(s):
            th = theta0 + sign * s
            return math.hypot(center.x + r * math.cos(th), center.y + r * math.sin(th)) - target

        grid = np.linspace(0.0, 2.0 * math.pi, 721)
        vals = np.array([excess(s) for s in grid])
        hits = np.nonzero(vals >= 0)[0]
        if hits.size == 0 or hits[0] == 0:
            rejected['reach'] = rejected.get('reach', 0) + 1
            continue
        sweep = brentq(excess, grid[hits[0] - 1], grid[hits[0]], xtol=1e-15)
        arc = CircularArc.from_sweep(center, r, theta0, sweep, orientation)

        chord = rng.uniform(0.01, 0.99) * d0 / 12.0
        phi = 2.0 * math.asin(chord / (2.0 * r))
        if phi >= sweep:
            rejected['short_arc'] = rejected.get('short_arc', 0) + 1
            continue
        p = arc.point_at(phi / sweep)
        geometries.append(make_arc_geometry(arc, arc.start_point, p))

    logger.info("角度の配置: 受理 %d / 試行 %d", len(geometries), attempts)
    return geometries, rejected


def check_angle_bounds(geom: ArcEndpointGeometry, report: Optional[CheckReport] = None) -> CheckReport:
    """
    α > π/2 + d0/2 と ξ > π/2 + d0/4、および η/2 <= sin η = |p − p0|/(2r) < d0/8 を確かめる

    前提（r ∈ (1/3, 1/2)、0 < d0 < 1/3、p0 が |p| の最小点、|p − p0| < d0/12、d* < d0/2）を
    満たさない配置は理由つきで除く
    """
    report = report or CheckReport('angles', {})
    arc, r, d0 = geom.arc, geom.arc.radius, geom.d0
    chord = geom.p.distance_to(geom.p0)

    if not (1.0 / 3.0 < r < 0.5):
        report.skip('radius')
        return report
    if not (0.0 < d0 < 1.0 / 3.0):
        report.skip('d0')
        return report
    if not (0.0 < chord < d0 / 12.0):
        report.skip('chord')
        return report
    dmin, _ = arc_min_distance_to_origin(arc)
    if dmin < geom.p0.norm() - ARC_TOL:
        report.skip('p0_not_minimal')
        return report
    _, far = _arc_radial_range(arc)
    if 1.0 - far >= 0.5 * d0:
        report.skip('d_star')
        return report

    margin_alpha = geom.alpha - (0.5 * math.pi + 0.5 * d0)
    margin_xi = geom.xi - (0.5 * math.pi + 0.25 * d0)
    sin_eta = chord / (2.0 * r)
    margin_eta = min(sin_eta - 0.5 * geom.eta, d0 / 8.0 - sin_eta,
                     1e-12 - abs(math.sin(geom.eta) - sin_eta))
    report.record(min(margin_alpha, margin_xi, margin_eta), geom.to_dict())
    return report


def check_angle_suite(trials: int, rng_seed: int) -> CheckReport:
    geometries, rejected = sample_angle_geometries(trials, rng_seed)
    report = CheckReport('angles', {'trials': trials, 'seed': rng_seed})
    for reason, count in rejected.items():
        report.skipped[f'sampling_{reason}'] = count
    for geom in geometries:
        check_angle_bounds(geom, report)
    return report


# ---------------------------------------------------------------------------
# 競合集合による周長の増分

@dataclass(frozen=True)
class CompetitorReport:
    """穴 B_j における競合集合の周長増分の上界"""

    j: IndexPair
    d_q0: float
    chord_pq_upper: float
    deltaP_upper: float
    passed: bool
    sigma: float = 0.0
    gamma_lower: float = 0.0
    skipped_reason: Optional[str] = None

    def to_dict(self) -> Dict:
        return {'j': list(self.j.as_tuple()), 'd_q0': self.d_q0,
                'chord_pq_upper': self.chord_pq_upper, 'deltaP_upper': self.deltaP_upper,
                'passed': self.passed, 'sigma': self.sigma, 'gamma_lower': self.gamma_lower,
                'skipped_reason': self.skipped_reason}


def competitor_bound(r_j: float, d: float) -> float:
    """δP <= 2r_j(π+1) − d³/2^11"""
    return 2.0 * r_j * (math.pi + 1.0) - d ** 3 / 2.0 ** 11


def _boundary_distance(seq: SequenceParams, j: IndexPair, v: Point2) -> float:
    """1 − |x_j + v|（x_j は穴の中心、ε_j が小さくても桁落ちしない形で）"""
    eps_j = seq.epsilon(j)
    rho = 1.0 - eps_j
    u = Point2.polar(1.0, seq.theta(j))
    t = (2.0 * rho * u.dot(v) + v.dot(v)) / (rho * rho)
    return eps_j - rho * t / (math.sqrt(1.0 + t) + 1.0)


def _origin_angle(seq: SequenceParams, j: IndexPair, vp: Point2, vq: Point2) -> float:
    """原点から見た x_j + vp と x_j + vq のなす角"""
    rho = 1.0 - seq.epsilon(j)
    u = Point2.polar(1.0, seq.theta(j))
    cross = rho * (u.cross(vq) - u.cross(vp)) + vp.cross(vq)
    dot = rho * rho + rho * u.dot(vp + vq) + vp.dot(vq)
    return math.atan2(abs(cross), dot)


def check_competitor_gain(seq: SequenceParams, j: IndexPair, p0: Point2, q0: Point2,
                          frame: str = 'absolute') -> CompetitorReport:
    """
    穴 B_j の境界上の2点 p0, q0 から出る弧に対し、競合集合の周長増分 δP の上界を評価する

    |p − p0| = |q − q0| = d_q0/16、台形と三角形の角の関係から γ > d_q0/4 − σ/2 >= d_q0/8、
    cos γ <= 1 − d_q0²/2^8 を用いる。passed は上界が負であること

    Args:
        frame: 'absolute' は平面の座標、'hole' は穴の中心からの変位
            （倍精度で中心と区別できない小さな穴では 'hole' を使う）
    """
    if frame not in ('absolute', 'hole'):
        raise InvalidInputError(f"不明な座標系です: {frame}")
    eps_j, r_j = seq.epsilon(j), seq.radius(j)
    if frame == 'absolute':
        center = seq.center(j)
        vp, vq = p0 - center, q0 - center
    else:
        vp, vq = p0, q0

    for name, v in (('p0', vp), ('q0', vq)):
        if abs(v.norm() - r_j) > 1e-9 * r_j:
            return CompetitorReport(j, 0.0, math.inf, math.inf, False,
                                    skipped_reason=f'{name}_not_on_hole')

    d_p0, d_q0 = _boundary_distance(seq, j, vp), _boundary_distance(seq, j, vq)
    if d_q0 > d_p0:
        vp, vq, d_p0, d_q0 = vq, vp, d_q0, d_p0
    if d_q0 < 0.5 * eps_j:
        return CompetitorReport(j, d_q0, math.inf, math.inf, False,
                                skipped_reason='d_q0_below_half_eps')

    ell = d_q0 / 16.0
    sigma = _origin_angle(seq, j, vp, vq)
    gamma_lower = 0.25 * d_q0 - 0.5 * sigma
    cos_gamma_upper = 1.0 - d_q0 ** 2 / 2.0 ** 8
    chord_pq_upper = 2.0 * ell * cos_gamma_upper + vp.distance_to(vq)

    # 角の評価の連鎖が崩れる配置では上界を出さない
    chain_ok = (math.sin(sigma) <= 4.0 * r_j and gamma_lower >= d_q0 / 8.0
                and math.cos(d_q0 / 8.0) <= cos_gamma_upper)
    if not chain_ok:
        return CompetitorReport(j, d_q0, chord_pq_upper, math.inf, False, sigma, gamma_lower,
                                skipped_reason='angle_chain_failed')
    bound = competitor_bound(r_j, d_q0)
    return CompetitorReport(j, d_q0, chord_pq_upper, bound, bound < 0, sigma, gamma_lower)


def north_pole_pair(seq: SequenceParams, j: IndexPair,
                    spread: float = math.pi / 4) -> Tuple[Point2, Point2]:
    """穴 B_j の原点に最も近い点から ±spread だけ回した境界上の2点（穴の中心からの変位）"""
    inward = seq.theta(j) + math.pi
    r_j = seq.radius(j)
    return Point2.polar(r_j, inward + spread), Point2.polar(r_j, inward - spread)


def sweep_competitor(seq: SequenceParams, j1_max: int) -> CheckReport:
    """
    j1 <= j1_max の全ての穴で競合集合を評価し、最悪ケース d = ε_j/2 の算術
    2r_j(π+1) < (ε_j/2)³/2^11 も確かめる。余裕は ε_j³ で正規化する
    """
    report = CheckReport('competitor', {'j1_max': j1_max})
    for j in iter_indices(j1_max=j1_max):
        p0, q0 = north_pole_pair(seq, j)
        result = check_competitor_gain(seq, j, p0, q0, frame='hole')
        if result.skipped_reason is not None and result.skipped_reason != 'angle_chain_failed':
            report.skip(result.skipped_reason)
            continue
        scale = seq.epsilon(j) ** 3
        if scale == 0.0:
            report.skip('underflow')
            continue
        worst_case = -competitor_bound(seq.radius(j), 0.5 * seq.epsilon(j)) / scale
        margin = -result.deltaP_upper / scale if result.passed else -1.0
        report.record(min(margin, worst_case), result.to_dict())
    return report


# ---------------------------------------------------------------------------
# 算術の連鎖

def check_epsilon_arithmetic(epsilon: float) -> CheckReport:
    """
    ε に関する不等式

    体積の下界 π(1−ε)²、分解不能性 2π(1−ε)² > π、連結性 √2π(1−ε)² − 2ε(1−ε) > π、
    半径 1/h >= (1−ε)/2 > 2ε と πε² < π(1−ε)²
    """
    report = CheckReport('epsilon_arithmetic', {'epsilon': epsilon})
    e = epsilon
    if not (0 < e < EPSILON_REGIME):
        report.skip('epsilon_regime')
    checks = {
        'indecomposable': 2.0 * math.pi * (1.0 - e) ** 2 - math.pi,
        'connected': math.sqrt(2.0) * math.pi * (1.0 - e) ** 2 - 2.0 * e * (1.0 - e) - math.pi,
        'radius': 0.5 * (1.0 - e) - 2.0 * e,
        'small_component': math.pi * (1.0 - e) ** 2 - math.pi * e * e,
    }
    for name, margin in checks.items():
        report.record(margin, {'inequality': name, 'margin': margin})
    report.extras['margins'] = checks
    return report


def check_porous_arithmetic(seq: SequenceParams, N: int) -> CheckReport:
    """
    穴の列に関する不等式

    半円板の連鎖 2πδ <= π(3/4)²/36、d_q0 >= ε_j/2（全ての穴で ε_j − r_j >= ε_j/2）、
    r_j <= 2^{-4}ε_j、ε_j³/2^14 >= 16r_j
    """
    report = CheckReport('porous_arithmetic', {'depth': N})
    spec = DomainSpec(outer=UNIT_DISK, metadata={'sequence': seq.to_dict(), 'start': [1, 1]})
    measures = porous_measures(spec, seq, N)
    delta = measures.delta
    report.record(math.pi * 0.75 ** 2 / 36.0 - 2.0 * math.pi * delta,
                  {'inequality': 'half_disk', 'delta': delta})
    report.record(DELTA_BOUND - delta, {'inequality': 'delta_bound', 'delta': delta})

    worst = {'dq0': math.inf, 'r_small': math.inf, 'final': math.inf}
    for j in iter_indices(j1_max=N):
        e, r = seq.epsilon(j), seq.radius(j)
        margins = {
            'dq0': ((e - r) - 0.5 * e) / e,
            'r_small': (R_SMALL_COEFFICIENT * e - r) / e,
            'final': (e ** 3 / 2.0 ** 14 - 16.0 * r) / e ** 3 + REL_TOL,
        }
        for name, margin in margins.items():
            worst[name] = min(worst[name], margin)
            report.record(margin, {'inequality': name, 'j': list(j.as_tuple())})
    report.extras['worst'] = worst
    report.extras['delta'] = delta
    return report


def _holes_from_sequence(spec: DomainSpec, seq: SequenceParams) -> bool:
    """spec の穴がすべて列の添字どおりに置かれているか"""
    if not spec.holes or len(spec.hole_labels) != len(spec.holes):
        return False
    for label, hole in zip(spec.hole_labels, spec.holes):
        j = IndexPair(*label)
        if j.j1 > seq.depth or seq.hole(j) != hole:
            return False
    return True


def _hole_geometry_margins(spec: DomainSpec) -> Dict[str, float]:
    """穴の座標から直接求めた包含と互いに素の余裕"""
    centers, radii = spec.hole_arrays()
    if radii.size == 0:
        return {'contained': math.inf, 'disjoint': math.inf}
    outer = spec.outer
    reach = np.hypot(centers[:, 0] - outer.center.x, centers[:, 1] - outer.center.y) + radii
    margins = {'contained': float(np.min(outer.radius - reach)) / outer.radius,
               'disjoint': math.inf}
    if radii.size > 1:
        iu, ju = np.triu_indices(radii.size, k=1)
        margins['disjoint'] = float(np.min(pdist(centers) - (radii[iu] + radii[ju])))
    return margins


def check_ph_property(spec: DomainSpec) -> CheckReport:
    """
    P(Ω) = H¹(∂Ω) の成否

    穴の領域と円板では、穴が外側の円板に含まれ互いに素なら ∂Ω は円周の和で、
    周長と位相的境界の測度が一致する。Ω_ε では Cantor集合の長さだけ
    厳密に H¹(∂Ω_ε) が大きいことを区間で示す

    Raises:
        CertificationError: 裾の区間が広すぎて厳密な不等式を示せない場合
    """
    report = CheckReport('ph', {'kind': spec.obstacle_kind})
    if spec.obstacle_kind == 'cantor_bumps':
        measures = omega_eps_measures(spec)
        report.extras.update({
            'equality': False,
            'strict_inequality': measures.strict_inequality_certified,
            'gap': measures.cantor_gap.mid,
            'perimeter': measures.perimeter.to_dict(),
            'topo_boundary_h1': measures.topo_boundary_h1.to_dict(),
        })
        report.record(measures.topo_boundary_h1.lo - measures.perimeter.hi)
        return report

    if spec.outer is None:
        raise InvalidInputError("空の領域では P(Ω) = H¹(∂Ω) を評価できません")
    _, radii = spec.hole_arrays()
    inventory = math.fsum([2.0 * math.pi * spec.outer.radius] + (2.0 * math.pi * radii).tolist())
    boundary = IntervalValue.enclose(inventory, inventory, ulps=4)

    seq = sequence_from_metadata(spec)
    series = None
    if seq is not None and _holes_from_sequence(spec, seq):
        # 深い穴の中心は 1 に丸められるので、列の値から直接判定する
        depth = min(int(spec.metadata.get('depth', seq.depth)), seq.depth)
        validation = validate_constraints(seq, depth)
        margins = {label: validation.conditions[label].worst_margin
                   for label in ('contained', 'disjoint')}
        source = 'sequence'
    else:
        margins = _hole_geometry_margins(spec)
        source = 'coordinates'
    for label, margin in margins.items():
        report.record(margin, {'condition': label, 'margin': margin})

    if source == 'sequence' and seq.certificate is not None:
        # 打ち切った穴の円周の和は、列全体の周長の上端を超えない
        measures = porous_measures(spec, seq, depth)
        report.record(measures.perimeter.hi - boundary.lo, {'condition': 'series'})
        series = measures.perimeter.to_dict()

    equality = report.passed
    report.extras.update({
        'equality': equality,
        'strict_inequality': False,
        'gap': 0.0 if equality else None,
        'perimeter': boundary.to_dict(),
        'topo_boundary_h1': boundary.to_dict(),
        'series_perimeter': series,
        'source': source,
        'margins': {k: None if math.isinf(v) else v for k, v in margins.items()},
    })
    return report


# ---------------------------------------------------------------------------
# スイートの実行

SUITE_NAMES = ('lemma21', 'angles', 'competitor', 'constraints', 'arithmetic',
               'density', 'ph', 'cheeger')


def _constraints_report(seq: SequenceParams, N: int) -> CheckReport:
    validation = validate_constraints(seq, N)
    report = CheckReport('constraints', {'depth': N})
    for label, condition in validation.conditions.items():
        if condition.passed:
            margin = max(condition.worst_margin, 0.0)
        else:
            margin = condition.worst_margin if condition.worst_margin < 0 else -1.0
        report.record(margin, condition.to_dict())
    report.extras['labels'] = list(validation.conditions)
    return report


def _density_report(spec: DomainSpec, points: int) -> CheckReport:
    sweep = boundary_density_sweep(spec, first_quadrant_points(points), geometric_radii())
    report = CheckReport('boundary_density', {'points': points, 'max_constant': MAX_DENSITY_CONSTANT})
    report.record(MAX_DENSITY_CONSTANT - sweep.fitted_constant, {'fitted': sweep.fitted_constant})
    report.record(0.0 if sweep.monotone else -1.0, {'monotone': sweep.monotone})
    report.extras['sweep'] = sweep.to_dict()
    return report


def _cheeger_report(spec: DomainSpec, grid: int, trials: int, seed: int,
                    solver_cfg: Optional[CheegerConfig]) -> List[CheckReport]:
    result = solve_cheeger(rasterize(spec, grid), solver_cfg)
    density = check_density_estimate(result, spec, trials, seed)
    half = CheckReport('half_disk', {'grid': grid})
    inside = check_half_disk_inclusion(result)
    half.record(0.0 if inside else -1.0, {'h_estimate': result.h_estimate})
    return [density, half]


def run_suite(names, settings: Dict, seed: int,
              solver_cfg: Optional[CheegerConfig] = None) -> List[CheckReport]:
    """
    名前を指定して検査をまとめて実行する

    Args:
        names: SUITE_NAMES の部分集合
        settings: 'verify' / 'porous' / 'cantor' の各節をもつ設定
        seed: 乱数の種（各検査で同じ種を使う）
        solver_cfg: 'cheeger' 検査で使うソルバーの設定

    Returns:
        CheckReport のリスト（names の順）
    """
    unknown = [n for n in names if n not in SUITE_NAMES]
    if unknown:
        raise InvalidInputError(f"不明な検査です: {', '.join(unknown)}")
    verify, porous, cantor = settings['verify'], settings['porous'], settings['cantor']
    show = bool(verify.get('show_progress', False))

    seq = None
    if any(n in ('competitor', 'constraints', 'arithmetic', 'density', 'cheeger', 'ph') for n in names):
        seq = default_sequences(porous['eps1'], porous['safety'], max(porous['depth'], verify['j1_max']))

    reports: List[CheckReport] = []
    for name in names:
        logger.info("検査を実行します: %s", name)
        if name == 'lemma21':
            reports.append(check_arc_min_lemma(verify['trials'], seed, show))
        elif name == 'angles':
            reports.append(check_angle_suite(verify['angle_trials'], seed))
        elif name == 'competitor':
            reports.append(sweep_competitor(seq, verify['j1_max']))
        elif name == 'constraints':
            reports.append(_constraints_report(seq, verify['j1_max']))
        elif name == 'arithmetic':
            reports.append(check_epsilon_arithmetic(cantor['epsilon']))
            reports.append(check_porous_arithmetic(seq, verify['j1_max']))
        elif name == 'density':
            reports.append(_density_report(build_omega0(seq, verify['j1_max']), verify['points']))
        elif name == 'ph':
            reports.append(check_ph_property(build_omega_eps(cantor['epsilon'], cantor['depth'])))
            reports.append(check_ph_property(build_omega0(seq, verify['j1_max'])))
        elif name == 'cheeger':
            spec = build_omega0(seq, min(porous['depth'], verify['j1_max']))
            reports.extend(_cheeger_report(spec, verify['grid'], verify['density_trials'],
                                           seed, solver_cfg))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning("違反のある検査: %s", ', '.join(failed))
    return reports
