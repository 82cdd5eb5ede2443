from functools import lru_cache
from typing import Any, Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import FieldSpecError
from .scalar import Field as ScalarField


class Settings(BaseSettings):
    field: str = Field(default="q")
    seed: int = Field(default=0)
    dim_cap: int = Field(default=4096)
    output_format: Literal["text", "json"] = Field(default="text")
    samples: int = Field(default=50)
    search_max_len: int = Field(default=6)
    log_level: str = Field(default="WARNING")
    metrics_file: str | None = Field(default=None)

    model_config = SettingsConfigDict(
        env_prefix="LEAVITT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("field", mode="before")
    @classmethod
    def _normalize_field(cls, value: Any) -> str:
        try:
            return ScalarField.from_spec(str(value or "q")).spec
        except FieldSpecError as exc:
            raise ValueError(str(exc)) from None

    @field_validator("seed", "search_max_len")
    @classmethod
    def _validate_non_negative(cls, value: int, info) -> int:
        if value < 0:
            raise ValueError(f"{info.field_name} must be >= 0")
        return value

    @field_validator("dim_cap", "samples")
    @classmethod
    def _validate_positive(cls, value: int, info) -> int:
        if value <= 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return value

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper_level(cls, value: Any) -> str:
        return str(value or "WARNING").strip().upper()


@lru_cache
def _default_settings() -> Settings:
    return Settings()


def get_settings(**overrides: Any) -> Settings:
    provided = {key: value for key, value in overrides.items() if value is not None}
    if not provided:
        return _default_settings()
    return Settings(**provided)
