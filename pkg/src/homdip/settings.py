"""Global numeric tolerance settings shared by all modules."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_TOLERANCE = "HOMDIP_TOLERANCE"


@dataclass(frozen=True)
class ToleranceSettings:
    """Numeric slack for state checks and criterion verdicts.

    validity: Hermiticity / trace / positivity slack for density operators.
    normalization: pure-state norm and beamsplitter-parameter slack.
    verdict_margin: guard subtracted from the criterion right-hand side so
        rounding noise never certifies entanglement.
    """

    validity: float = 1e-10
    normalization: float = 1e-12
    verdict_margin: float = 1e-12


def tolerances() -> ToleranceSettings:
    """Active settings; the HOMDIP_TOLERANCE env var overrides `validity`."""
    raw = os.environ.get(ENV_TOLERANCE)
    if raw is None:
        return ToleranceSettings()
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_TOLERANCE} must be a float, got {raw!r}") from exc
    if value <= 0.0:
        raise ValueError(f"{ENV_TOLERANCE} must be positive, got {value}")
    return ToleranceSettings(validity=value)
