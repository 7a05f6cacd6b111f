#!/usr/bin/env python3
"""
Cheeger集合ツール - メインスクリプト
Ω_ε・Ω_0 の構成、測度の区間評価、格子上のCheeger集合の計算、補題の検証、図の生成
"""
import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from config import load_run_config
from utils.cantor_domain import build_omega_eps, omega_eps_measures
from utils.cheeger_solver import (CheegerConfig, connected_components, minimality_gap,
                                  reflection_mismatch, solve_cheeger, volume_lower_bound_ok)
from utils.domain_spec import DomainSpec
from utils.errors import EXIT_OK, CheegerToolError, ConfigError, VerificationFailure
from utils.porous_domain import build_omega0, default_sequences, porous_measures, validate_constraints
from utils.raster import export_pgm, rasterize, read_pgm
from utils.svg_renderer import FigureRenderer, default_zoom_windows
from utils.verification_suite import SUITE_NAMES, run_suite

logger = logging.getLogger(__name__)


def _write_json(data, output_path):
    """JSONを書き出す（キー順を固定）"""
    with open(output_path, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write('\n')
    print(f"JSONファイルを生成しました: {output_path}")


def _print_rows(rows):
    """ラベルと値を桁を揃えて表示"""
    width = max(len(label) for label, _ in rows)
    for label, value in rows:
        print(f"  {label.ljust(width)} : {value}")


def _interval(value):
    return f"[{value.lo:.12f}, {value.hi:.12f}]  (幅 {value.width:.2e})"


def _output_path(run, explicit, default_name):
    return explicit if explicit else os.path.join(run.output_dir, default_name)


def solver_config(settings) -> CheegerConfig:
    """設定の [solver] セクションから CheegerConfig を作成"""
    s = settings['solver']
    return CheegerConfig(
        outer_tol=s['outer_tol'],
        max_outer=s['max_outer'],
        inner_iters=s['inner_iters'],
        inner_growth=s['inner_growth'],
        max_inner_iters=s['max_inner_iters'],
        inner_tol=s['inner_tol'],
        gap_check_every=s['gap_check_every'],
        threshold_policy=s['threshold_policy'],
        fixed_threshold=s['fixed_threshold'],
        scan_levels=s['scan_levels'],
        scan_range=(s['scan_low'], s['scan_high']),
        ratio_bias=s['ratio_bias'],
        smoothing=s['smoothing'],
        show_progress=s['show_progress'],
    )


# ---------------------------------------------------------------------------
# 各コマンド

def cmd_build(args, run):
    """領域を構成してJSONに保存"""
    settings = run.settings
    if args.kind == 'cantor':
        eps, depth = settings['cantor']['epsilon'], settings['cantor']['depth']
        print(f"Ω_ε を構成します (ε={eps}, N={depth})...")
        spec = build_omega_eps(eps, depth)
        path = spec.save(_output_path(run, args.output, 'omega_eps.json'))
        print("\n領域の概要:")
        _print_rows([
            ("バンプ数", f"{spec.cantor.gap_count}"),
            ("レベルごとの数", ', '.join(str(n) for n in spec.cantor.gaps_per_level()[:8])
             + (' ...' if depth > 8 else '')),
            ("H¹(C_N)", f"{spec.cantor.total_length:.12f}"),
            ("打ち切り", spec.truncation_note),
        ])
    else:
        p = settings['porous']
        print(f"Ω_0 を構成します (ε_(1,1)={p['eps1']}, safety={p['safety']}, j1 <= {p['depth']})...")
        seq = default_sequences(p['eps1'], p['safety'], p['depth'])
        report = validate_constraints(seq, p['depth'])
        spec = build_omega0(seq, p['depth'])
        path = spec.save(_output_path(run, args.output, 'omega0.json'))
        print("\n条件の検証:")
        _print_rows([(f"({label})", f"{'OK' if c.passed else 'NG'}  余裕 {c.worst_margin:.3e}")
                     for label, c in report.conditions.items()])
        print("\n領域の概要:")
        _print_rows([("穴の数", f"{spec.obstacle_count}"), ("打ち切り", spec.truncation_note)])
    print(f"\n処理が完了しました。出力ファイル: {path}")
    return EXIT_OK


def cmd_measure(args, run):
    """周長・面積などを区間で評価"""
    spec = DomainSpec.load(args.spec)
    if spec.obstacle_kind == 'cantor_bumps':
        report = omega_eps_measures(spec, run.settings['cantor']['product_depth'])
        print("\nΩ_ε の測度:")
        _print_rows([
            ("P(Ω)", _interval(report.perimeter)),
            ("|Ω|", _interval(report.area)),
            ("H¹(∂Ω)", _interval(report.topo_boundary_h1)),
            ("Cantor集合の長さ", _interval(report.cantor_gap)),
            ("P(Ω) < H¹(∂Ω)", "証明済み" if report.strict_inequality_certified else "未証明"),
        ])
    else:
        report = porous_measures(spec, None, int(spec.metadata.get('depth', 1)))
        print("\n領域の測度:")
        _print_rows([
            ("P(Ω)", _interval(report.perimeter)),
            ("|Ω|", _interval(report.area)),
            ("δ", f"{report.delta:.6e}"),
            ("δ < 2^-7", "はい" if report.delta_bound_ok else "いいえ"),
            ("h(Ω) の上界", f"{report.h_upper:.12f}"),
            ("|E| の下界", f"{report.volume_lower:.12f}"),
        ])
    data = {'spec': args.spec, 'kind': spec.obstacle_kind, 'measures': report.to_dict()}
    _write_json(data, _output_path(run, args.output, f"{Path(args.spec).stem}_measures.json"))
    return EXIT_OK


def cmd_solve(args, run):
    """格子上で Cheeger集合を計算"""
    spec = DomainSpec.load(args.spec)
    r = run.settings['raster']
    print(f"ラスタ化を開始します (n={r['grid']}, k={r['subsamples']})...")
    field = rasterize(spec, r['grid'], r['subsamples'], r['padding'], r['max_grid'],
                      r['workers'] or None)
    print("Cheeger集合の計算を開始します...")
    result = solve_cheeger(field, solver_config(run.settings))

    gap = minimality_gap(result)
    reflection = reflection_mismatch(result)
    components = connected_components(result)
    print("\n計算結果:")
    _print_rows([
        ("ĥ(Ω)", f"{result.h_estimate:.6f}"),
        ("収束", "はい" if result.converged else "いいえ"),
        ("外側反復", f"{len(result.history)}"),
        ("しきい値", f"{result.threshold:.4f}"),
        ("|E Δ Ω| / |Ω|", f"{gap:.4e}"),
        ("鏡映のずれ (x, y)", f"{reflection.mismatch_x}, {reflection.mismatch_y} 画素"),
        ("連結成分", f"{components}"),
        ("|E| >= π(2/ĥ)²", "はい" if volume_lower_bound_ok(result) else "いいえ"),
    ])
    if field.excluded_holes:
        print(f"  ※ 画素より小さい穴 {len(field.excluded_holes)} 個は格子に含まれていません")

    stem = Path(args.spec).stem
    pgm_path = export_pgm(result.indicator, os.path.join(run.output_dir, f"{stem}_indicator.pgm"))
    data = result.to_dict()
    data.update({
        'spec': args.spec,
        'minimality_gap': gap,
        'reflection': {'mismatch_x': reflection.mismatch_x, 'mismatch_y': reflection.mismatch_y,
                       'within_band': reflection.within_band},
        'components': components,
        'indicator_pgm': pgm_path,
        'excluded_holes': len(field.excluded_holes),
    })
    _write_json(data, _output_path(run, args.output, f"{stem}_result.json"))
    return EXIT_OK


def cmd_verify(args, run):
    """検証スイートを実行（違反があれば終了コード5）"""
    names = list(SUITE_NAMES) if args.all or not args.suites else args.suites
    print(f"検証を開始します: {', '.join(names)} (seed={run.seed})")
    reports = run_suite(names, run.settings, run.seed, solver_config(run.settings))

    print("\n検証結果:")
    width = max(len(r.name) for r in reports)
    for r in reports:
        margin = 'なし' if math.isinf(r.worst_margin) else f"{r.worst_margin:.3e}"
        status = 'OK' if r.passed else 'NG'
        print(f"  {r.name.ljust(width)}  {status}  試行 {r.trials:>7}  違反 {r.violations:>5}  最小余裕 {margin}")

    data = {'seed': run.seed, 'suites': names, 'reports': [r.to_dict() for r in reports]}
    _write_json(data, _output_path(run, args.output, 'verify_report.json'))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        raise VerificationFailure(f"違反が見つかりました: {', '.join(failed)}")
    return EXIT_OK


def cmd_render(args, run):
    """SVGの図を生成"""
    r = run.settings['render']
    renderer = FigureRenderer(r['size_px'], r['margin_px'], r['min_feature_px'])
    if args.figure == 'bump':
        path = renderer.render_bump(r['bump_delta'], _output_path(run, args.output, 'bump.svg'))
        print(f"\n処理が完了しました。出力ファイル: {path}")
        return EXIT_OK

    if not args.spec:
        raise ConfigError(f"render {args.figure} には領域のJSONファイルが必要です")
    spec = DomainSpec.load(args.spec)
    overlay = read_pgm(args.overlay) if args.overlay else None
    stem = Path(args.spec).stem
    if args.figure == 'domain':
        path = renderer.render_domain(spec, _output_path(run, args.output, f"{stem}.svg"), overlay)
    else:
        try:
            halves = [float(v) for v in str(r['zoom_halves']).split(',') if v.strip()]
        except ValueError:
            raise ConfigError(f"zoom_halves の値が不正です: {r['zoom_halves']}") from None
        windows = default_zoom_windows(r['zoom_angle'], halves)
        path = renderer.render_zoom_triptych(spec, windows,
                                             _output_path(run, args.output, f"{stem}_zoom.svg"),
                                             overlay)
    print(f"\n処理が完了しました。出力ファイル: {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    """引数パーサーを作成"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="INI形式の設定ファイル")
    common.add_argument("--seed", type=int, help="乱数の種")
    common.add_argument("--output-dir", help="出力ディレクトリ（省略時は output）")
    common.add_argument("--output", "-o", help="出力ファイルのパス")
    common.add_argument("--log-level", help="ログレベル（DEBUG / INFO / WARNING）")

    parser = argparse.ArgumentParser(description="Cheeger集合ツール - 領域の構成・測度・Cheeger集合・検証・図")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="領域を構成してJSONに保存")
    p.add_argument("kind", choices=["cantor", "porous"], help="構成する領域")
    p.add_argument("--eps", type=float, help="Cantor集合の半幅 ε")
    p.add_argument("--depth", type=int, help="打ち切り深さ（cantor は N、porous は j1 の上限）")
    p.add_argument("--eps1", type=float, help="ε_(1,1)")
    p.add_argument("--safety", type=float, help="r_j の縮小率 (0, 1]")

    p = sub.add_parser("measure", parents=[common], help="測度を区間で評価")
    p.add_argument("spec", help="領域のJSONファイル")

    p = sub.add_parser("solve", parents=[common], help="格子上で Cheeger集合を計算")
    p.add_argument("spec", help="領域のJSONファイル")
    p.add_argument("--grid", "-n", type=int, help="格子サイズ n")
    p.add_argument("--outer-tol", type=float, help="外側反復の停止許容値")

    p = sub.add_parser("verify", parents=[common], help="検証スイートを実行")
    p.add_argument("suites", nargs="*",
                   help=f"実行する検査（{', '.join(SUITE_NAMES)}）")
    p.add_argument("--all", action="store_true", help="すべての検査を実行")
    p.add_argument("--trials", type=int, help="補題の標本数")
    p.add_argument("--j1-max", type=int, help="穴の添字 j1 の上限")

    p = sub.add_parser("render", parents=[common], help="SVGの図を生成")
    p.add_argument("figure", choices=["bump", "domain", "zoom"], help="図の種類")
    p.add_argument("spec", nargs="?", help="領域のJSONファイル（bump では不要）")
    p.add_argument("--overlay", help="重ねて描く指示関数のPGMファイル")
    p.add_argument("--delta", type=float, help="bump の δ")
    p.add_argument("--zoom-halves", help="拡大図の半幅（カンマ区切り）")
    return parser


def _overrides(args):
    """コマンドライン引数を設定の上書きに変換"""
    get = lambda name: getattr(args, name, None)  # noqa: E731
    overrides = {
        'run': {'seed': get('seed')},
        'output': {'dir': get('output_dir')},
        'logging': {'level': get('log_level')},
        'raster': {'grid': get('grid')},
        'solver': {'outer_tol': get('outer_tol')},
        'verify': {'trials': get('trials'), 'j1_max': get('j1_max')},
        'render': {'bump_delta': get('delta'), 'zoom_halves': get('zoom_halves')},
    }
    if args.command == 'build':
        if args.kind == 'cantor':
            overrides['cantor'] = {'epsilon': args.eps, 'depth': args.depth}
        else:
            overrides['porous'] = {'eps1': args.eps1, 'safety': args.safety, 'depth': args.depth}
    return overrides


COMMANDS = {
    'build': cmd_build,
    'measure': cmd_measure,
    'solve': cmd_solve,
    'verify': cmd_verify,
    'render': cmd_render,
}


def main(argv=None):
    """メイン処理"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == 'verify':
            unknown = [s for s in args.suites if s not in SUITE_NAMES]
            if unknown:
                parser.error(f"不明な検査です: {', '.join(unknown)}")
        run = load_run_config(args.config, _overrides(args))
        logging.basicConfig(level=run.settings['logging']['level'],
                            format='%(asctime)s %(levelname)s %(name)s: %(message)s')
        return COMMANDS[args.command](args, run)
    except CheegerToolError as e:
        print(f"エラー: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
