"""基底クラスの定義."""

from pydantic import BaseModel, ConfigDict


class BaseDTO(BaseModel):
    """未知のキーを拒否する不変DTOの基底クラス."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)
