from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

DEFAULT_OUTPUT_BASE = Path("runs")


def package_version() -> str:
    try:
        return version("nhpump")
    except PackageNotFoundError:
        from . import __version__

        return __version__


def _cell(value: Any) -> Any:
    if hasattr(value, "item") and callable(value.item):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if value is None:
        return ""
    return value


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """Header plus rows, comma separated, LF endings, repr-exact floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
            count += 1
    return count


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if hasattr(value, "item") and callable(value.item):
        return _jsonable(value.item())
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def write_json(path: Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


@dataclass(slots=True)
class RunManifest:
    """Everything needed to re-run a command and compare its outputs."""

    command: str
    argv: List[str]
    parameters: Dict[str, Any] = field(default_factory=dict)
    grids: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, Any] = field(default_factory=dict)
    derived: Dict[str, Any] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    version: str = field(default_factory=package_version)
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    elapsed_seconds: float = 0.0
    _clock: float = field(default_factory=time.perf_counter, repr=False)

    def finish(self) -> "RunManifest":
        self.elapsed_seconds = time.perf_counter() - self._clock
        return self

    def as_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload.pop("_clock", None)
        return payload


def manifest_path(csv_path: Path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(f"{csv_path.stem}.manifest.json")


def write_manifest(csv_path: Path, manifest: RunManifest) -> Path:
    path = manifest_path(csv_path)
    write_json(path, manifest.as_dict())
    return path


def default_run_dir(command: str, base: Optional[Path] = None) -> Path:
    timestamp = datetime.now(timezone.utc).strftime("%Y%m%d-%H%M%S")
    return (base or DEFAULT_OUTPUT_BASE) / f"{timestamp}_{command}"
