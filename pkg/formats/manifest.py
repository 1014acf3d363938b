"""Run manifest: everything needed to repeat a run bit-identically."""

import json
import logging
from dataclasses import dataclass, field, asdict
from pathlib import Path

from core.errors import FormatError

logger = logging.getLogger(__name__)

TOOL_NAME = "binfsi"
TOOL_VERSION = "1.0.0"
MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    plan: dict = field(default_factory=dict)
    detector: dict = field(default_factory=dict)
    normalization: dict = field(default_factory=dict)
    rescale: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    tool: str = f"{TOOL_NAME} {TOOL_VERSION}"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=False)

    def write(self, directory) -> Path:
        path = Path(directory) / MANIFEST_NAME
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        logger.info("wrote %s", path)
        return path


def read_manifest(path) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return RunManifest(**data)
    except (json.JSONDecodeError, UnicodeDecodeError, TypeError) as exc:
        raise FormatError(f"malformed manifest {path}: {exc}") from exc
