from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field


class Tolerances(BaseModel):
    """數值容許誤差；所有欄位必須 >= 0"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    rank_tol: float = Field(default=1e-10, ge=0)      # 相對於最大特徵值
    residual_tol: float = Field(default=1e-8, ge=0)
    cluster_tol: float = Field(default=1e-8, ge=0)
    herm_tol: float = Field(default=1e-9, ge=0)

    @classmethod
    def from_settings(cls, **overrides):
        """settings.TWINS 為預設值，再套用 overrides (None 代表不覆寫)"""
        values = {}
        if settings.configured:
            config = getattr(settings, 'TWINS', {})
            for field in cls.model_fields:
                key = field.upper()
                if key in config:
                    values[field] = config[key]
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def updated(self, **overrides):
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return type(self)(**values)


def search_defaults():
    """complete twins 搜尋的 (attempts, seed) 預設值"""
    if settings.configured:
        config = getattr(settings, 'TWINS', {})
        return int(config.get('SEARCH_ATTEMPTS', 64)), int(config.get('SEED', 0))
    return 64, 0
