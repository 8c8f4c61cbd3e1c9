import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

import confinium
from .hasher import Hasher

logger = logging.getLogger(__name__)

FORMATS = ("text", "json", "csv")
TABLE_QUANTITIES = ("energy", "dV2", "dT2", "cross1", "cross2")


class Reporter:
    @staticmethod
    def document(command: str, config: Dict[str, Any], rows: List[Dict[str, Any]],
                 summary: Dict[str, Any]) -> Dict[str, Any]:
        """Report document; ``digest`` covers the rows only, so it is stable across configs."""
        clean_rows = json.loads(Hasher.canonical_json(rows))
        return {
            "version": confinium.__version__,
            "command": command,
            "config": json.loads(Hasher.canonical_json(config)),
            "rows": clean_rows,
            "summary": summary,
            "digest": Hasher.digest(clean_rows),
        }

    @staticmethod
    def error_document(exc: Exception) -> Dict[str, Any]:
        return {"error": {
            "type": type(exc).__name__,
            "message": str(exc),
            "diagnostics": json.loads(Hasher.canonical_json(getattr(exc, "diagnostics", {}))),
        }}

    @staticmethod
    def render(document: Dict[str, Any], format: str = "text", digits: int = 10) -> str:
        if format not in FORMATS:
            raise ValueError(f"Invalid format {format!r}. Must be one of {', '.join(FORMATS)}")
        if format == "json":
            return Hasher.canonical_json(document)
        if "error" in document:
            err = document["error"]
            return f"{err['type']}: {err['message']}\n"
        if format == "csv":
            return Reporter._render_csv(document["rows"])

        command = document.get("command")
        if command == "table":
            body = Reporter._render_tables(document["rows"], digits)
        elif command == "solve":
            body = Reporter._render_records(document["rows"], digits)
        else:
            body = Reporter._render_frame(document["rows"], digits)
        return body + Reporter._render_summary(document.get("summary", {}))

    @staticmethod
    def write(document: Dict[str, Any], path: Optional[str], format: str = "text", digits: int = 10) -> str:
        """Render and write to ``path`` (or stdout when ``path`` is None)."""
        content = Reporter.render(document, format, digits)
        if path is None:
            print(content, end="")
        else:
            directory = os.path.dirname(os.path.abspath(path))
            os.makedirs(directory, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(content)
            logger.info("report written to %s", path)
        return content

    @staticmethod
    def _number(value: Any, digits: int) -> str:
        if value is None:
            return ""
        if isinstance(value, (bool, np.bool_)):
            return str(bool(value)).lower()
        if isinstance(value, float):
            return f"{value:.{digits}g}"
        return str(value)

    @staticmethod
    def _render_csv(rows: List[Dict[str, Any]]) -> str:
        if not rows:
            return ""
        frame = pd.json_normalize(rows, sep=".")
        return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")

    @staticmethod
    def _render_tables(rows: List[Dict[str, Any]], digits: int) -> str:
        """One block per table: rows state x quantity, columns wall parameters."""
        if not rows:
            return "No rows.\n"
        frame = pd.DataFrame(rows)

        def cell(row) -> str:
            text = "ERROR" if pd.isna(row["computed"]) else Reporter._number(row["computed"], digits)
            if row["status"] in ("disputed", "literature_disputed"):
                return text + " ?"
            if row["status"].startswith("literature"):
                text += " L"
            return text if row["pass"] else text + " *"

        frame["cell"] = frame.apply(cell, axis=1)
        frame["quantity"] = pd.Categorical(frame["quantity"], categories=TABLE_QUANTITIES, ordered=True)
        blocks = []
        for table_id, group in frame.groupby("table", sort=False):
            states = list(dict.fromkeys(group["state"]))
            params = list(dict.fromkeys(group["params"]))
            group = group.assign(
                state=pd.Categorical(group["state"], categories=states, ordered=True),
                params=pd.Categorical(group["params"], categories=params, ordered=True),
                origin=group["status"].str.startswith("literature").map({True: "literature", False: ""}),
            )
            pivot = group.pivot_table(index=["state", "quantity", "origin"], columns="params",
                                      values="cell", aggfunc="first", observed=True)
            blocks.append(f"Table {table_id}\n{pivot.fillna('').to_string()}\n")
        failures = [r for r in rows if not r["pass"] and r["status"] not in ("disputed", "literature_disputed")]
        for row in failures:
            if row.get("error"):
                blocks.append(f"  {row['table']} {row['state']} {row['params']} {row['quantity']}: {row['error']}")
        blocks.append("  * fails tolerance   ? disputed reference   L literature value\n")
        return "\n".join(blocks)

    @staticmethod
    def _render_records(rows: List[Dict[str, Any]], digits: int) -> str:
        lines = []
        for row in rows:
            width = max(len(key) for key in row)
            for key, value in row.items():
                if isinstance(value, dict):
                    value = " ".join(f"{k}={Reporter._number(v, digits)}" for k, v in value.items())
                lines.append(f"{key:<{width}}  {Reporter._number(value, digits)}")
            lines.append("")
        return "\n".join(lines)

    @staticmethod
    def _render_frame(rows: List[Dict[str, Any]], digits: int) -> str:
        if not rows:
            return "No rows.\n"
        frame = pd.json_normalize(rows, sep=".")
        frame = frame.drop(columns=[c for c in frame.columns if c.startswith("system.")])
        formatted = frame.apply(lambda col: col.map(lambda v: Reporter._number(v, digits)))
        return formatted.to_string(index=False) + "\n"

    @staticmethod
    def _render_summary(summary: Dict[str, Any]) -> str:
        if not summary:
            return ""
        return "Summary: " + ", ".join(f"{k}={v}" for k, v in summary.items()) + "\n"
