import hashlib
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from datagravity.utils.export import to_json


class OutputFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    JSON = "json"
    PDF = "pdf"


@dataclass
class RunRecord:
    subcommand: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    version: str = ""
    output_format: OutputFormat = OutputFormat.TEXT
    output_sha256: Optional[str] = None
    argv: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["output_format"] = self.output_format.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        data = dict(data)
        data["output_format"] = OutputFormat(data.get("output_format", "text"))
        return cls(**data)

    def attach_output(self, payload: bytes) -> None:
        self.output_sha256 = digest(payload)

    def matches(self, payload: bytes) -> bool:
        return self.output_sha256 == digest(payload)

    def write(self, output: Union[str, Path]) -> Path:
        path = record_path(output)
        path.write_text(to_json(self.to_dict()), encoding="utf-8")
        return path


def digest(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def record_path(output: Union[str, Path]) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".run.json")
