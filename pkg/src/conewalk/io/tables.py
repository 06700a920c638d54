"""CSV and JSON-lines tables written by the CLI.

Every table opens with two comment lines, `# conewalk <version>` and
`# config_hash=<sha256>`; readers skip them. Floats are written with repr and no
table carries a timestamp, so reruns of the same config produce identical bytes.
Points are stored in one column as space-separated coordinates.
"""

import csv
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..exceptions import CurveFileError
from ..models.enums import SurvivalMethod
from ..walk.records import SurvivalCurve

logger = logging.getLogger(__name__)

SURVIVAL_COLUMNS = ("cone_label", "x", "n", "estimate", "std_error", "method", "trials", "seed")
HARMONIC_COLUMNS = (
    "x",
    "value",
    "std_error",
    "method",
    "truncation_n",
    "converged",
    "h",
    "ratio_to_h",
)
FIT_COLUMNS = (
    "cone_label",
    "x",
    "method",
    "slope",
    "slope_stderr",
    "intercept",
    "p_hat",
    "target_p",
)


@dataclass(frozen=True, slots=True)
class OutputMeta:
    """Provenance stamped on every output file."""

    version: str
    config_hash: str

    def comment_lines(self) -> list[str]:
        return [f"# conewalk {self.version}", f"# config_hash={self.config_hash}"]

    def header_record(self) -> dict[str, str]:
        return {"type": "header", "version": self.version, "config_hash": self.config_hash}


def format_value(value: Any) -> str:
    """repr for floats, space-separated coordinates for points, str otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return " ".join(format_value(float(v)) for v in value)
    if value is None:
        return ""
    return str(value)


def parse_point(text: str) -> tuple[float, ...]:
    return tuple(float(c) for c in text.split())


def write_csv(
    path: Path, meta: OutputMeta, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]
) -> int:
    """Write rows under the two comment lines; returns the number of data rows."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as handle:
        for line in meta.comment_lines():
            handle.write(line + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return count


def read_csv(path: Path) -> tuple[dict[str, str], list[tuple[int, dict[str, str]]]]:
    """
    Read a table written by `write_csv`.

    Returns:
        (metadata parsed from the comment lines, [(line number, row)])

    Raises:
        CurveFileError: if the file is missing or has no header
    """
    if not path.exists():
        raise CurveFileError(str(path), "file does not exist")

    meta: dict[str, str] = {}
    lines = path.read_text(encoding="utf-8").splitlines()
    body: list[tuple[int, str]] = []
    for number, line in enumerate(lines, start=1):
        if line.startswith("#"):
            text = line[1:].strip()
            if text.startswith("conewalk "):
                meta["version"] = text.split(" ", 1)[1]
            elif "=" in text:
                key, value = text.split("=", 1)
                meta[key.strip()] = value.strip()
        elif line.strip():
            body.append((number, line))

    if not body:
        raise CurveFileError(str(path), "no header row")
    reader = csv.reader([text for _, text in body])
    header = next(reader)
    rows = []
    for (number, _), values in zip(body[1:], reader, strict=True):
        if len(values) != len(header):
            raise CurveFileError(
                str(path), f"expected {len(header)} fields, found {len(values)}", number
            )
        rows.append((number, dict(zip(header, values, strict=True))))
    return meta, rows


def write_survival_csv(path: Path, meta: OutputMeta, curves: Iterable[SurvivalCurve]) -> int:
    rows = [row for curve in curves for row in curve.to_rows()]
    return write_csv(path, meta, SURVIVAL_COLUMNS, rows)


def read_survival_csv(path: Path) -> list[SurvivalCurve]:
    """
    Rebuild survival curves from a survival CSV, one per (cone, start, method).

    Raises:
        CurveFileError: on missing columns, unparseable values or invalid curves
    """
    _, rows = read_csv(path)
    if not rows:
        raise CurveFileError(str(path), "no data rows")
    missing = set(SURVIVAL_COLUMNS) - set(rows[0][1])
    if missing:
        raise CurveFileError(str(path), f"missing columns {sorted(missing)}", 1)

    groups: dict[tuple[str, str, str], list[tuple[int, dict[str, str]]]] = {}
    for number, row in rows:
        groups.setdefault((row["cone_label"], row["x"], row["method"]), []).append((number, row))

    curves = []
    for (label, x, method), members in groups.items():
        number = members[0][0]
        try:
            curves.append(
                SurvivalCurve(
                    start=parse_point(x),
                    horizons=tuple(int(r["n"]) for _, r in members),
                    estimates=tuple(float(r["estimate"]) for _, r in members),
                    std_errors=tuple(float(r["std_error"]) for _, r in members),
                    method=SurvivalMethod(method),
                    trials=int(members[0][1]["trials"]),
                    cone_label=label,
                    seed=int(members[0][1]["seed"]) if members[0][1]["seed"] else None,
                )
            )
        except ValueError as e:
            raise CurveFileError(str(path), str(e), number) from e
    logger.info(f"Read {len(curves)} survival curves from {path}")
    return curves


def write_jsonl(path: Path, meta: OutputMeta, records: Iterable[Mapping[str, Any]]) -> int:
    """Header record first, then one compact JSON object per line."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as handle:
        handle.write(json.dumps(meta.header_record(), sort_keys=True) + "\n")
        for record in records:
            handle.write(json.dumps(dict(record), sort_keys=True) + "\n")
            count += 1
    logger.debug(f"Wrote {count} records to {path}")
    return count


def read_jsonl(path: Path) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    """(header record, data records) of a JSON-lines file."""
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        raise CurveFileError(str(path), "empty JSON-lines file")
    records = [json.loads(line) for line in lines]
    header = records[0]
    if header.get("type") != "header":
        raise CurveFileError(str(path), "first record is not a header", 1)
    return header, records[1:]
