"""Run manifests: reproducibility records written next to CLI outputs.

A manifest captures the command, its full flag set, digests of every input
and primary output, seeds and the tool version.  Primary outputs are
byte-reproducible from the recorded inputs; the manifest itself carries
timestamps and is excluded from byte-identity.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

from . import __version__


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


class RunManifest:
    def __init__(self, command: str, args: dict):
        self.command = command
        self.args = {k: v for k, v in sorted(args.items())}
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.started = datetime.now(timezone.utc).isoformat()

    def add_input(self, path):
        if path:
            self.inputs[str(path)] = file_digest(path)

    def add_output(self, path):
        if path:
            self.outputs[str(path)] = file_digest(path)

    def write(self, target_dir: str | Path | None = None) -> Path:
        """Write ``<command>-manifest.json`` next to the outputs."""
        if target_dir is None:
            if self.outputs:
                target_dir = Path(next(iter(self.outputs))).parent
            else:
                target_dir = Path.cwd()
        name = self.command.replace(" ", "-") + "-manifest.json"
        path = Path(target_dir) / name
        body = {
            "command": self.command,
            "args": self.args,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "tool_version": __version__,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
        }
        with open(path, "w") as f:
            json.dump(body, f, indent=1, sort_keys=True)
            f.write("\n")
        return path
