"""二値コードの索引・ランキング・評価指標."""
