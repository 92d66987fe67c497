"""データセットの表現・分割・合成生成."""
