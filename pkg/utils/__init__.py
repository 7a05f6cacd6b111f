# utils パッケージ初期化（幾何・領域・ラスタ・ソルバー・検証・図）
