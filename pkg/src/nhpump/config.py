from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

TWO_PI = 2.0 * math.pi

DEFAULT_PRESETS_PATH = Path(__file__).resolve().parent / "configs" / "presets.json"


class Boundary(str, enum.Enum):
    PBC = "pbc"
    OBC = "obc"


class Band(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Band.PLUS else -1

    @property
    def other(self) -> "Band":
        return Band.MINUS if self is Band.PLUS else Band.PLUS


@dataclass(frozen=True, slots=True)
class DriveParams:
    """Constants of the driven Rice-Mele family.

    t1 = mu and t2 = mu - cos(phase); the drive phase advances as t / A, so one
    cycle lasts ``period`` = 2 pi A in physical time.
    """

    mu: float
    gamma: float = 0.3
    delta: float = 1.0
    adiabatic_factor: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mu", "gamma", "delta", "adiabatic_factor"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.adiabatic_factor <= 0:
            raise ValueError(f"adiabatic_factor must be positive, got {self.adiabatic_factor!r}")

    @property
    def t1(self) -> float:
        return self.mu

    def t2(self, phase):
        return self.mu - np.cos(phase)

    @property
    def period(self) -> float:
        return TWO_PI * self.adiabatic_factor

    def with_mu(self, mu: float) -> "DriveParams":
        return replace(self, mu=float(mu))

    def as_dict(self) -> Dict[str, float]:
        return {
            "mu": self.mu,
            "gamma": self.gamma,
            "delta": self.delta,
            "adiabatic_factor": self.adiabatic_factor,
        }


@dataclass(frozen=True, slots=True)
class PhasePoint:
    """A point (momentum, drive phase) on the closed 2-torus."""

    momentum: float
    drive_phase: float

    def wrapped(self) -> "PhasePoint":
        return PhasePoint(self.momentum % TWO_PI, self.drive_phase % TWO_PI)


@dataclass(frozen=True, slots=True)
class TorusGrid:
    """Uniform periodic discretization of the (momentum, phase) torus."""

    n_momentum: int = 128
    n_phase: int = 128
    boundary: Boundary = Boundary.PBC

    def __post_init__(self) -> None:
        if self.n_momentum < 8 or self.n_phase < 8:
            raise ValueError(
                f"torus grid needs at least 8 points per direction, got {self.n_momentum}x{self.n_phase}"
            )
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    def momenta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_momentum) / self.n_momentum

    def phases(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_phase) / self.n_phase

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Momentum and phase arrays of shape (n_momentum, n_phase)."""
        return np.meshgrid(self.momenta(), self.phases(), indexing="ij")

    @property
    def spacing(self) -> Tuple[float, float]:
        return TWO_PI / self.n_momentum, TWO_PI / self.n_phase

    def doubled(self) -> "TorusGrid":
        return replace(self, n_momentum=2 * self.n_momentum, n_phase=2 * self.n_phase)

    def as_dict(self) -> Dict[str, Any]:
        return {"n_momentum": self.n_momentum, "n_phase": self.n_phase, "boundary": self.boundary.value}


@dataclass(frozen=True, slots=True)
class Tolerances:
    """Numerical thresholds used across the toolkit."""

    ep_tol: float = 1e-8
    switch_tol: float = 1e-6
    gap_tol: float = 1e-6
    flux_limit: float = math.pi
    overlap_tol: float = 1e-4
    gapless_tol: float = 1e-3
    refine_rounds: int = 3
    refine_factor: int = 10
    admissibility_tol: float = 1e-8
    radius_tol: float = 1e-9
    degenerate_tol: float = 1e-12

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


DEFAULT_TOLERANCES = Tolerances()


@dataclass(slots=True)
class PresetBundle:
    """Named CLI defaults loaded from the presets file."""

    key: str
    command: str
    description: str = ""
    options: Dict[str, Any] = field(default_factory=dict)


def get_presets_path() -> Path:
    if env_path := os.getenv("NHPUMP_PRESETS"):
        return Path(env_path).expanduser()
    return DEFAULT_PRESETS_PATH


def load_presets(path: Optional[Path] = None) -> Dict[str, PresetBundle]:
    path = Path(path).expanduser() if path else get_presets_path()
    if not path.exists():
        raise FileNotFoundError(f"Presets file not found: {path}")

    payload = json.loads(path.read_text(encoding="utf-8"))
    entries = payload.get("presets")
    if not isinstance(entries, list) or not entries:
        raise ValueError(f"No presets defined in {path}")

    bundles: Dict[str, PresetBundle] = {}
    for entry in entries:
        key = entry.get("key")
        command = entry.get("command")
        if not key or not command:
            raise ValueError(f"Preset entries need 'key' and 'command': {entry!r}")
        bundles[key] = PresetBundle(
            key=key,
            command=command,
            description=entry.get("description", ""),
            options=dict(entry.get("options", {})),
        )
    return bundles


def resolve_preset(key: str, path: Optional[Path] = None) -> PresetBundle:
    bundles = load_presets(path)
    if key not in bundles:
        raise KeyError(f"Unknown preset '{key}'. Available: {sorted(bundles)}")
    return bundles[key]
