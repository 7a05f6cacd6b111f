"""
例外定義モジュール：各モジュール共通のエラー階層とCLI終了コード
"""
from typing import Iterable, Optional

# CLI終了コード
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONSTRAINT = 3
EXIT_CERTIFICATION = 4
EXIT_VERIFICATION = 5


class CheegerToolError(Exception):
    """このツールが送出する例外の基底クラス"""

    exit_code = 1


class InvalidInputError(CheegerToolError, ValueError):
    """入力値が事前条件を満たさない"""

    exit_code = EXIT_USAGE


class ConfigError(InvalidInputError):
    """設定ファイル・環境変数・パスの誤り"""


class DepthLimitError(InvalidInputError):
    """Cantor反復の深さが数値的に扱える範囲を超えた"""


class RasterMemoryError(InvalidInputError):
    """格子サイズが設定上限を超えた"""


class ConstraintViolationError(CheegerToolError, ValueError):
    """
    穴列の条件 (i)-(iv) または派生条件の違反

    Args:
        message: エラーメッセージ
        labels: 違反した条件のラベル（例: ["ii", "iv"]）
    """

    exit_code = EXIT_CONSTRAINT

    def __init__(self, message: str, labels: Optional[Iterable[str]] = None):
        self.labels = list(labels or [])
        if self.labels:
            message = f"{message} (条件: {', '.join('(' + l + ')' for l in self.labels)})"
        super().__init__(message)


class CertificationError(CheegerToolError, RuntimeError):
    """区間の幅が広すぎて主張を証明できない"""

    exit_code = EXIT_CERTIFICATION


class DegenerateThresholdError(CheegerToolError, RuntimeError):
    """しきい値処理の結果が空集合になった"""

    exit_code = EXIT_CERTIFICATION


class VerificationFailure(CheegerToolError, AssertionError):
    """検証スイートで違反が見つかった"""

    exit_code = EXIT_VERIFICATION
