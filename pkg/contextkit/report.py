"""
Analysis reports emitted by the command-line interface
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import config
from .file_ops import csv_str, dumps_json


@dataclass
class AnalysisReport:
    command: str
    inputs_digest: Optional[str] = None
    verdicts: Dict[str, Any] = field(default_factory=dict)
    certificates: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, Any] = field(default_factory=dict)
    wall_time: Optional[float] = None
    table: Optional[Tuple[Sequence[str], List[Sequence[Any]]]] = None

    def to_dict(self) -> Dict[str, Any]:
        doc = {
            "schema_version": config.SCHEMA_VERSION,
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "verdicts": self.verdicts,
            "certificates": self.certificates,
            "tolerances": self.tolerances,
        }
        if self.wall_time is not None:
            doc["wall_time"] = round(self.wall_time, 6)
        return doc

    def render(self, fmt: str = "json") -> str:
        """JSON always; CSV emits the report's table, or flat verdict rows when it has none."""
        if fmt == "csv":
            if self.table is not None:
                header, rows = self.table
                return csv_str(header, rows)
            return csv_str(("verdict", "value"), sorted((k, _scalar(v)) for k, v in self.verdicts.items()))
        return dumps_json(self.to_dict())


def _scalar(v: Any) -> Any:
    if isinstance(v, (dict, list, tuple)):
        return dumps_json(v).strip().replace("\n", " ")
    return v


def tolerances(**overrides: Any) -> Dict[str, Any]:
    """The tolerances a command ran with: config defaults, overridden where given."""
    out = {"eps_sum": config.EPS_SUM, "eps_context": config.EPS_CONTEXT}
    out.update({k: v for k, v in overrides.items() if v is not None})
    return out
