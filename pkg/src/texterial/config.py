"""Engine configuration with environment overrides.

Defaults follow the values documented in the README; everything a test or
deployment might reasonably tune is a plain field here.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class GeometryConfig:
    full_blend_threshold: float = 0.95
    influence_threshold: float = 0.25
    brush_radius: float = 18.0
    cell_w: float = 8.0
    cell_h: float = 16.0


@dataclass(frozen=True)
class ClayConfig:
    block_width: float = 320.0
    rip_gap: float = 24.0
    press_full_ms: int = 2000
    voice_drop_x: float = 40.0
    voice_drop_y: float = 40.0


@dataclass(frozen=True)
class GardenConfig:
    base_interval_ms: int = 45_000
    water_factor: float = 4.0
    water_window_ms: int = 60_000
    soil_y: float = 400.0
    fern_half_width: float = 60.0
    fern_height: float = 160.0


@dataclass(frozen=True)
class ProviderConfig:
    provider: str = "mock"  # "mock" | "live"
    base_url: str = ""
    api_key: str = ""
    model: str = ""
    deadline_s: float = 30.0
    mock_delay_ms: int = 0


@dataclass(frozen=True)
class EngineConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    clay: ClayConfig = field(default_factory=ClayConfig)
    garden: GardenConfig = field(default_factory=GardenConfig)
    provider: ProviderConfig = field(default_factory=ProviderConfig)

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "EngineConfig":
        """Build a config from TEXTERIAL_* environment variables."""
        env = os.environ if environ is None else environ
        provider = ProviderConfig(
            provider=env.get("TEXTERIAL_PROVIDER", "mock"),
            base_url=env.get("TEXTERIAL_API_BASE", ""),
            api_key=env.get("TEXTERIAL_API_KEY", ""),
            model=env.get("TEXTERIAL_MODEL", ""),
        )
        return cls(provider=provider)

    def with_provider(self, **kwargs) -> "EngineConfig":
        return replace(self, provider=replace(self.provider, **kwargs))
