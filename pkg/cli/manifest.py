"""
Run manifests written next to every artifact a command produces.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .config import MANIFEST_FILE


def file_checksum(path: Union[str, Path]) -> str:
    """sha256 of a file, or of every file under a directory in sorted relative-path order."""
    path = Path(path)
    h = hashlib.sha256()
    if path.is_dir():
        for child in sorted(p for p in path.rglob("*") if p.is_file() and p.name != MANIFEST_FILE):
            h.update(child.relative_to(path).as_posix().encode("utf-8"))
            h.update(child.read_bytes())
    else:
        h.update(path.read_bytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    """What a command ran with and what it wrote"""
    subcommand: str
    config: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)    # name → sha256
    seed: Optional[int] = None
    code_version: str = ""
    outputs: Dict[str, str] = field(default_factory=dict)   # name → file name

    def add_input(self, name: str, path: Optional[Union[str, Path]]) -> None:
        if path is not None:
            self.inputs[name] = file_checksum(path)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, out_dir: Union[str, Path]) -> Path:
        path = Path(out_dir) / MANIFEST_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        return path

    @classmethod
    def read(cls, path: Union[str, Path]) -> "RunManifest":
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_FILE
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})
