"""
Deterministic table output for the command-line driver.

CSV rows carry floats with 17 significant digits; comment rows start with
'#'. JSON output holds the same table as {"columns", "rows", "comments"}.
"""

import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

import numpy as np

from stratafold.config import OutputFormat
from stratafold.errors import ConfigError

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Render one cell: floats at 17 significant digits, None as an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


@dataclass
class Table:
    columns: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)

    def add_row(self, row: Sequence[Any]) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells for {len(self.columns)} columns")
        self.rows.append(list(row))

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        for comment in self.comments:
            buffer.write(f"# {comment}\n")
        return buffer.getvalue()

    def to_json(self) -> str:
        document = {
            "columns": self.columns,
            "rows": [[_json_value(v) for v in row] for row in self.rows],
            "comments": self.comments,
        }
        return json.dumps(document, indent=2) + "\n"

    def render(self, fmt: OutputFormat) -> str:
        return self.to_json() if fmt is OutputFormat.JSON else self.to_csv()


def write_table(table: Table, output: Optional[Union[str, Path]], fmt: OutputFormat = OutputFormat.CSV) -> None:
    """
    Write a table to a file, or to stdout when no path is given.

    Raises:
        ConfigError: The output path cannot be written
    """
    text = table.render(fmt)
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot write output file {path}: {e}") from e
    logger.info(f"Wrote {len(table.rows)} rows to {path}")
