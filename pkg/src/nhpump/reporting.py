from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Optional

logger = logging.getLogger(__name__)

DEVIATION_THRESHOLD = 0.1


def build_summary_message(summary: Mapping[str, Any], run_dir: Path) -> str:
    command = summary.get("command", "run")
    parameters = summary.get("parameters", {})
    highlights = summary.get("highlights", [])
    outputs = summary.get("outputs", [])
    elapsed = summary.get("elapsed_seconds")

    param_line = " ".join(f"{key}={value}" for key, value in parameters.items())
    parts: list[str] = []
    headline = f"nhpump {command} completed"
    if param_line:
        headline += f": {param_line}"
    if elapsed is not None:
        headline += f" ({elapsed:.1f}s)"
    parts.append(headline)
    parts.extend(str(line) for line in highlights)
    if outputs:
        parts.append("Outputs: " + ", ".join(str(name) for name in outputs))
    parts.append(f"Run directory: {run_dir}")
    return "\n".join(parts)


@dataclass(slots=True)
class DeviationSummary:
    """How far Re BOD strays from the Chern integer, split by Im E fluctuation."""

    n_points: int
    top_quartile_mean: float
    bottom_quartile_mean: float
    outliers: List[float] = field(default_factory=list)

    @property
    def fluctuation_correlated(self) -> bool:
        return self.top_quartile_mean > self.bottom_quartile_mean

    def as_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "top_quartile_mean": self.top_quartile_mean,
            "bottom_quartile_mean": self.bottom_quartile_mean,
            "fluctuation_correlated": self.fluctuation_correlated,
            "outliers": list(self.outliers),
        }


def _usable(row: Mapping[str, Any]) -> bool:
    chern = row.get("chern")
    re_bod = row.get("re_bod")
    im_range = row.get("im_range")
    if chern is None or re_bod is None or im_range is None:
        return False
    return all(math.isfinite(float(value)) for value in (chern, re_bod, im_range))


def quartile_deviation(
    rows: Iterable[Mapping[str, Any]], threshold: float = DEVIATION_THRESHOLD
) -> Optional[DeviationSummary]:
    """Mean |Re BOD - C| over the top and bottom ``im_range`` quartiles of gapped rows.

    Rows need ``mu``, ``re_bod``, ``chern`` and ``im_range``; rows without a
    converged Chern integer, or flagged ``gapless`` by the refined gap search,
    are skipped. Returns None when fewer than four rows remain.
    """
    usable = [
        row for row in rows if _usable(row) and row.get("converged", True) and not row.get("gapless", False)
    ]
    if len(usable) < 4:
        logger.warning("Only %d gapped pump rows; skipping quartile comparison", len(usable))
        return None

    usable.sort(key=lambda row: float(row["im_range"]))
    quarter = max(1, len(usable) // 4)

    def mean_deviation(chunk: List[Mapping[str, Any]]) -> float:
        return sum(abs(float(row["re_bod"]) - float(row["chern"])) for row in chunk) / len(chunk)

    outliers = [
        float(row["mu"]) for row in usable if abs(float(row["re_bod"]) - float(row["chern"])) > threshold
    ]
    return DeviationSummary(
        n_points=len(usable),
        top_quartile_mean=mean_deviation(usable[-quarter:]),
        bottom_quartile_mean=mean_deviation(usable[:quarter]),
        outliers=outliers,
    )
