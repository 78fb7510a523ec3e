from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Exhaustive Howell sweep: refuse when p^(2n) exceeds this
    oracle_max_space: int = 6561

    # Signed-monomial searches (|E| = 2^n n!)
    aut_max_n: int = 8
    fingerprint_limit: int = 1 << 16

    # Codeword tables
    codeword_limit: int = 1 << 20

    # Classification families built by the constructive enumerators
    family_limit: int = 250_000

    workers: int = 1
    log_level: str = "warning"  # debug | info | warning | error

    model_config = SettingsConfigDict(env_file=".env", env_prefix="ZPM_", extra="ignore")


settings = Settings()
