from pathlib import Path
from typing import Literal
from pydantic_settings import BaseSettings, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = "INFO"

    # Spectrum validation
    NORMALIZATION_TOL: float = 1e-12
    TAIL_TOL: float = 1e-12
    EQUALITY_RTOL: float = 1e-12

    # Optimal Hamiltonian
    BETA_DEGENERACY_TOL: float = 1e-14
    LEVELS_PREVIEW: int = 20

    # Gibbs solver
    GIBBS_MAX_ITER: int = 200
    GIBBS_RESIDUAL_TOL: float = 1e-10
    G_ABSCISSA_TOL: float = 1e-9
    DIVERGENCE_THRESHOLD: float = 1e12
    SERIES_CHUNK: int = 4096
    SERIES_MAX_TERMS: int = 2_000_000

    # Oracle
    ORACLE_TRIALS: int = 10_000
    ORACLE_SEED: int = 7
    ORACLE_TOL: float = 1e-10
    ORACLE_GRID_POINTS: int = 10_000

    # Bounds
    PRESET_FILE: Path = BASE_DIR / "bounds" / "presets.json"

    # Output
    DEFAULT_UNITS: Literal["nats", "bits"] = "nats"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="OPTHAM_", extra="ignore")


settings = Settings()
