"""Result tables and atomic, deterministic file output."""

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

# per-column units and provenance, written into the CSV header comment
COLUMN_NOTES = {
    "r": "dimensionless frequency",
    "lam": "dyadic frequency",
    "t": "time",
    "time": "time",
    "sup": "sup_x |I| (kernel units)",
    "argmax": "x at the sup (length)",
    "dt": "time step",
}


@dataclass(frozen=True)
class Check:
    """One acceptance band: ``passed`` iff ``lo <= value <= hi``."""

    name: str
    criterion: int
    value: float
    lo: float = -math.inf
    hi: float = math.inf
    note: str = ""

    @property
    def passed(self):
        return bool(self.lo <= self.value <= self.hi)

    def as_dict(self):
        return {"name": self.name, "criterion": self.criterion, "value": _num(self.value),
                "lo": _num(self.lo), "hi": _num(self.hi), "passed": self.passed,
                "note": self.note}


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


@dataclass
class ResultTable:
    kind: str
    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row of length {len(row)} does not match schema {self.columns}")

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self):
        """CSV text; the header comment carries kind, config hash and units."""
        lines = [f"# experiment: {self.kind}",
                 f"# config_hash: {self.metadata.get('config_hash', '')}"]
        for c in self.columns:
            if c in COLUMN_NOTES:
                lines.append(f"# {c}: {COLUMN_NOTES[c]}")
        lines.append(",".join(self.columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_json(self, include_timing=True):
        meta = {k: v for k, v in self.metadata.items()
                if include_timing or k != "wall_time"}
        doc = {"kind": self.kind, "columns": list(self.columns),
               "rows": [[_num(v) for v in row] for row in self.rows],
               "metadata": _clean(meta),
               "checks": [c.as_dict() for c in self.checks],
               "passed": self.passed}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        checks = [Check(c["name"], c["criterion"], _float(c["value"]), _float(c["lo"]),
                        _float(c["hi"]), c.get("note", "")) for c in doc.get("checks", [])]
        return cls(doc["kind"], tuple(doc["columns"]), [list(r) for r in doc["rows"]],
                   doc.get("metadata", {}), checks)


def _float(x):
    return float(x) if isinstance(x, str) else x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float):
        return _num(obj)
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def write_atomic(path, text):
    """Write `text` to `path` via a temporary file in the same directory and
    an atomic rename; the target is never partially written."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
