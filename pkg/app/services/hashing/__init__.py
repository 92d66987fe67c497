"""ハッシュヘッド・損失・学習ループ."""
