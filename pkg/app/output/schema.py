# app/output/schema.py

from datetime import datetime, timezone

from pydantic import BaseModel, ConfigDict, Field

from app import __version__
from app.core.config import settings


class RunManifest(BaseModel):
    """First record of every output stream; replaying `params` reproduces the run."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION, serialization_alias="schema")
    command: str
    params: dict
    version: str = __version__
    timestamp: str
    seed: int

    def to_json(self) -> dict:
        return self.model_dump(by_alias=True)


def make_manifest(command: str, params: dict, timestamp: str | None = None, seed: int | None = None) -> RunManifest:
    # a pinned timestamp makes the whole stream byte-identical across runs
    ts = timestamp or datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    return RunManifest(
        command=command,
        params=params,
        timestamp=ts,
        seed=settings.PRIME_SEED if seed is None else seed,
    )
