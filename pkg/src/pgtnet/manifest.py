"""
运行清单 (RunManifest)

The manifest hash covers the command, configuration, input hashes, seed and
tool version but not the wall-clock timestamps, so re-running a command with
the same inputs reproduces the same hash.
"""

import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Optional

from pgtnet import __version__
from pgtnet.utils.utils import canonical_json, sha256_file, sha256_text

logger = logging.getLogger(__name__)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: dict
    input_hashes: Dict[str, str]
    seed: int
    tool_version: str = __version__
    started_at: str = field(default_factory=_now)
    finished_at: Optional[str] = None
    artifacts: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def for_inputs(cls, command: str, config: dict, inputs: Dict[str, Optional[str]], seed: int) -> "RunManifest":
        hashes = {name: sha256_file(path) for name, path in sorted(inputs.items()) if path}
        return cls(command=command, config=config, input_hashes=hashes, seed=int(seed))

    @property
    def config_hash(self) -> str:
        return sha256_text(canonical_json(self.config))

    @property
    def hash(self) -> str:
        return sha256_text(canonical_json({
            "command": self.command,
            "config_hash": self.config_hash,
            "input_hashes": self.input_hashes,
            "seed": self.seed,
            "tool_version": self.tool_version,
        }))

    def record_artifact(self, path) -> None:
        path = Path(path)
        self.artifacts[path.name] = sha256_file(path)

    def to_dict(self) -> dict:
        return {
            "manifest_hash": self.hash,
            "command": self.command,
            "config": self.config,
            "config_hash": self.config_hash,
            "input_hashes": self.input_hashes,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "artifacts": dict(sorted(self.artifacts.items())),
        }

    def write(self, out_dir) -> Path:
        """Write ``manifest_<command>.json`` into ``out_dir``."""
        self.finished_at = _now()
        path = Path(out_dir) / f"manifest_{self.command}.json"
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("写出运行清单 %s (hash %s)", path, self.hash[:12])
        return path
