from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    APP_NAME: str = "ntkit"
    LOG_LEVEL: str = "INFO"

    # Factorization
    FACTOR_BUDGET: int = 200_000          # pollard rho iterations per cofactor
    TRIAL_DIVISION_BOUND: int = 1_000_000

    # Primality above 2^64
    MR_ROUNDS: int = 64
    PRIME_SEED: int = 20240607

    # four_squares returns the lexicographically smallest witness below this
    FOUR_SQUARES_EXHAUSTIVE_LIMIT: int = 1_000_000

    # Runtime
    JOBS: int = 1
    SCHEMA_VERSION: str = "ntkit/1"

    class Config:
        env_file = ".env"

settings = Settings()
