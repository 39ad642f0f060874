"""
config.py

Runtime configuration. Defaults can be overridden through `LBOW_*` environment
variables or a `.env` file in the working directory; CLI flags override both.
"""

from functools import lru_cache

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="LBOW_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    dim: int = Field(100, ge=1)
    epochs: int = Field(5, ge=1)
    learning_rate: float = Field(0.1, gt=0)
    min_count: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    lowercase: bool = False
    distinct: bool = False
    tol: float = Field(1e-9, ge=0)
    workers: int = Field(1, ge=1)
    log_level: str = "INFO"


@lru_cache
def get_settings() -> Settings:
    return Settings()


class TrainConfig(BaseModel):
    """
    Hyper-parameters of a training run.

    Attributes:
        dim (int): word vector dimension n. Ignored (forced to m) without a hidden layer.
        use_hidden (bool): train an m x n hidden layer B next to the embeddings.
        learning_rate (float): initial SGD rate, decayed linearly to 0.
        epochs (int): passes over the dataset.
        min_count (int): minimum corpus count for a word to enter the vocabulary.
        seed (int): seed for initialization and per-epoch shuffling.
        lowercase (bool): lowercase text tokens before counting.
        distinct (bool): keep only the first occurrence of every word in a document.
    """

    model_config = ConfigDict(frozen=True)

    dim: int = Field(100, ge=1)
    use_hidden: bool = False
    learning_rate: float = Field(0.1, gt=0)
    epochs: int = Field(5, ge=1)
    min_count: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    lowercase: bool = False
    distinct: bool = False

    @classmethod
    def from_settings(cls, settings: Settings | None = None, **overrides) -> "TrainConfig":
        settings = settings or get_settings()
        values = {
            "dim": settings.dim,
            "learning_rate": settings.learning_rate,
            "epochs": settings.epochs,
            "min_count": settings.min_count,
            "seed": settings.seed,
            "lowercase": settings.lowercase,
            "distinct": settings.distinct,
        }
        values.update({key: val for key, val in overrides.items() if val is not None})
        return cls(**values)
