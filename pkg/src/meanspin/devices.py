"""Device description files (coupling edges plus noise defaults)."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import ConfigError


def load_device(path: str | Path | None = None) -> dict:
    """Read a device JSON file; ``None`` selects the bundled ibmq-ourense description."""
    try:
        if path is None:
            text = resources.files("meanspin").joinpath("data/ourense.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"device file is not valid JSON: {exc}") from exc
