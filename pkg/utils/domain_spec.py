"""
領域記述モジュール：外側の円板から障害物（Cantorバンプ列または円形の穴）を除いた領域を表現し、JSONで保存・読み込みする
"""
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigError, InvalidInputError
from .geom_core import ORIGIN, Disk, Point2

if TYPE_CHECKING:
    from .cantor_domain import CantorStructure

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

OBSTACLE_KINDS = ('cantor_bumps', 'holes', 'none')

UNIT_DISK = Disk(ORIGIN, 1.0)

# 障害物が外側の閉円板に含まれるかの判定許容誤差
CONTAINMENT_TOL = 1e-12


@dataclass(eq=False)
class DomainSpec:
    """
    領域 Ω = outer \\ (障害物の和集合)

    Attributes:
        outer: 外側の開円板（None は空の領域）
        obstacle_kind: 'cantor_bumps' / 'holes' / 'none'
        cantor: Cantorバンプ列の構造（obstacle_kind == 'cantor_bumps' のとき）
        holes: 閉じた穴の一覧（obstacle_kind == 'holes' のとき）
        hole_labels: 各穴の添字 (j1, j2)
        truncation_note: 打ち切りに関する説明
        metadata: 生成パラメータなど
    """

    outer: Optional[Disk] = UNIT_DISK
    obstacle_kind: str = 'none'
    cantor: Optional["CantorStructure"] = None
    holes: List[Disk] = field(default_factory=list)
    hole_labels: List[Tuple[int, int]] = field(default_factory=list)
    truncation_note: str = ''
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.obstacle_kind not in OBSTACLE_KINDS:
            raise InvalidInputError(f"不明な障害物の種類です: {self.obstacle_kind}")
        if self.obstacle_kind == 'cantor_bumps' and self.cantor is None:
            raise InvalidInputError("cantor_bumps には CantorStructure が必要です")
        if self.obstacle_kind != 'holes' and self.holes:
            raise InvalidInputError("穴は obstacle_kind='holes' の場合のみ指定できます")
        if self.hole_labels and len(self.hole_labels) != len(self.holes):
            raise InvalidInputError("hole_labels と holes の数が一致しません")
        self.hole_labels = [tuple(int(v) for v in label) for label in self.hole_labels]
        self._check_containment()

    def _check_containment(self):
        if self.outer is None:
            if self.obstacle_kind != 'none':
                raise InvalidInputError("外側の円板がない領域に障害物は置けません")
            return
        cx, cy, radius = self.outer.center.x, self.outer.center.y, self.outer.radius
        if self.obstacle_kind == 'holes' and self.holes:
            centers, radii = self.hole_arrays()
            reach = np.hypot(centers[:, 0] - cx, centers[:, 1] - cy) + radii
            worst = int(np.argmax(reach))
            if reach[worst] > radius + CONTAINMENT_TOL:
                raise InvalidInputError(
                    f"穴 {worst} が外側の閉円板からはみ出しています (到達距離 {reach[worst]:.6g})")
        if self.obstacle_kind == 'cantor_bumps':
            reach = math.hypot(cx, cy) + self.cantor.epsilon
            if reach > radius + CONTAINMENT_TOL:
                raise InvalidInputError("Cantorバンプ列が外側の閉円板からはみ出しています")

    @property
    def obstacle_count(self) -> int:
        if self.obstacle_kind == 'cantor_bumps':
            return self.cantor.gap_count
        if self.obstacle_kind == 'holes':
            return len(self.holes)
        return 0

    def hole_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """穴の中心 (m, 2) と半径 (m,) の配列"""
        if not self.holes:
            return np.zeros((0, 2)), np.zeros(0)
        centers = np.array([[h.center.x, h.center.y] for h in self.holes], dtype=float)
        radii = np.array([h.radius for h in self.holes], dtype=float)
        return centers, radii

    def bounds(self) -> Tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax)。外側の円板がない場合は単位正方形"""
        if self.outer is None:
            return (-1.0, 1.0, -1.0, 1.0)
        c, r = self.outer.center, self.outer.radius
        return (c.x - r, c.x + r, c.y - r, c.y + r)

    def contains(self, xs, ys) -> np.ndarray:
        """
        点列が領域に属するかをベクトル化して判定

        外側の円板は開集合、穴は閉集合、Cantorバンプは開集合として扱う
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if self.outer is None:
            return np.zeros(np.broadcast(xs, ys).shape, dtype=bool)

        c, radius = self.outer.center, self.outer.radius
        inside = (xs - c.x) ** 2 + (ys - c.y) ** 2 < radius ** 2

        if self.obstacle_kind == 'cantor_bumps':
            inside &= ~self.cantor.obstacle_mask(xs, ys)
        elif self.obstacle_kind == 'holes':
            for hole in self.holes:
                hx, hy, hr = hole.center.x, hole.center.y, hole.radius
                near = (np.abs(xs - hx) <= hr) & (np.abs(ys - hy) <= hr)
                if not near.any():
                    continue
                inside &= ~(near & ((xs - hx) ** 2 + (ys - hy) ** 2 <= hr ** 2))
        return inside

    def contains_point(self, p: Point2) -> bool:
        return bool(self.contains(np.array([p.x]), np.array([p.y]))[0])

    def with_holes(self, holes: List[Disk], labels: Optional[List[Tuple[int, int]]] = None,
                   note: Optional[str] = None) -> "DomainSpec":
        """外側の円板を共有し、穴だけを差し替えた新しい領域"""
        kind = 'holes' if holes else 'none'
        return DomainSpec(outer=self.outer, obstacle_kind=kind, holes=list(holes),
                          hole_labels=list(labels or []),
                          truncation_note=self.truncation_note if note is None else note,
                          metadata=dict(self.metadata))

    def transformed(self, scale: float = 1.0, shift: Point2 = ORIGIN) -> "DomainSpec":
        """相似変換 x -> scale·x + shift を施した領域（Cantorバンプ列は未対応）"""
        if self.obstacle_kind == 'cantor_bumps':
            raise InvalidInputError("Cantorバンプ列の領域は変換できません")
        if not scale > 0:
            raise InvalidInputError(f"倍率は正である必要があります: {scale}")

        def _map(d: Disk) -> Disk:
            return Disk(d.center.scale(scale) + shift, d.radius * scale)

        outer = None if self.outer is None else _map(self.outer)
        return DomainSpec(outer=outer, obstacle_kind=self.obstacle_kind,
                          holes=[_map(h) for h in self.holes],
                          hole_labels=list(self.hole_labels),
                          truncation_note=self.truncation_note,
                          metadata=dict(self.metadata))

    def to_dict(self) -> Dict:
        data = {
            'schema_version': SCHEMA_VERSION,
            'outer': None if self.outer is None else self.outer.to_dict(),
            'obstacle_kind': self.obstacle_kind,
            'cantor': None,
            'holes': [],
            'truncation_note': self.truncation_note,
            'metadata': self.metadata,
        }
        if self.obstacle_kind == 'cantor_bumps':
            data['cantor'] = {'epsilon': self.cantor.epsilon, 'depth': self.cantor.depth}
        for i, hole in enumerate(self.holes):
            entry = hole.to_dict()
            if self.hole_labels:
                entry['label'] = list(self.hole_labels[i])
            data['holes'].append(entry)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "DomainSpec":
        version = data.get('schema_version')
        if version != SCHEMA_VERSION:
            raise ConfigError(f"未対応のスキーマバージョンです: {version}")
        try:
            outer = None if data.get('outer') is None else Disk.from_dict(data['outer'])
            kind = data.get('obstacle_kind', 'none')
            cantor = None
            if kind == 'cantor_bumps':
                from .cantor_domain import cantor_iterate

                params = data['cantor']
                cantor = cantor_iterate(params['epsilon'], params['depth'])
            holes, labels = [], []
            for entry in data.get('holes', []):
                holes.append(Disk.from_dict(entry))
                if 'label' in entry:
                    labels.append(tuple(entry['label']))
        except (KeyError, TypeError) as e:
            raise ConfigError(f"領域JSONの形式が不正です: {e}") from e

        return cls(outer=outer, obstacle_kind=kind, cantor=cantor, holes=holes,
                   hole_labels=labels, truncation_note=data.get('truncation_note', ''),
                   metadata=data.get('metadata', {}))

    def save(self, output_path: str) -> str:
        """
        領域をJSONファイルに保存

        Args:
            output_path: 出力ファイルのパス

        Returns:
            str: 保存したファイルのパス
        """
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(output_path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2)
        logger.info("領域を保存しました: %s", output_path)
        return output_path

    @classmethod
    def load(cls, input_path: str) -> "DomainSpec":
        if not os.path.exists(input_path):
            raise ConfigError(f"領域ファイルが見つかりません: {input_path}")
        with open(input_path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"領域ファイルがJSONとして読めません: {input_path}: {e}") from e
        return cls.from_dict(data)


def plain_disk(radius: float = 1.0, center: Point2 = ORIGIN) -> DomainSpec:
    """障害物のない円板"""
    return DomainSpec(outer=Disk(center, radius), obstacle_kind='none')
