import json
import logging
import math
import os
from typing import Any, Dict, Iterator, Tuple

import ijson

logger = logging.getLogger(__name__)

KEY_FIELDS = ("table", "system", "state", "params", "quantity", "param", "value", "name")
IGNORED_FIELDS = ("abs_err", "rel_err")
MAX_REPORTED = 20


class Differ:
    @staticmethod
    def diff_reports(file1: str, file2: str, rtol: float = 1e-9) -> int:
        """
        Compares the rows of two JSON reports.
        Returns the number of differences, or -1 if a report cannot be read.
        """
        print(f"Comparing {file1} vs {file2}...")
        try:
            rows1 = Differ._index(file1)
            rows2 = Differ._index(file2)
        except (OSError, ijson.JSONError, ValueError) as e:
            print(f"Error opening reports: {e}")
            return -1

        print(f"Report 1 rows: {len(rows1)}")
        print(f"Report 2 rows: {len(rows2)}")

        differences = 0
        for key in sorted(set(rows1) | set(rows2)):
            label = Differ._label(key)
            if key not in rows2:
                Differ._report(differences, f"Only in {file1}: {label}")
                differences += 1
                continue
            if key not in rows1:
                Differ._report(differences, f"Only in {file2}: {label}")
                differences += 1
                continue
            for field, (a, b) in Differ._field_differences(rows1[key], rows2[key], rtol):
                Differ._report(differences, f"Difference in {label} {field}:\n  < {a}\n  > {b}")
                differences += 1

        if differences > MAX_REPORTED:
            print(f"... ({differences - MAX_REPORTED} more differences suppressed)")
        if differences == 0:
            print("Reports match.")
        else:
            print(f"{differences} difference(s) found.")
        return differences

    @staticmethod
    def _rows(path: str) -> Iterator[Dict[str, Any]]:
        if not os.path.exists(path):
            raise OSError(f"File not found: {path}")
        with open(path, "rb") as f:
            yield from ijson.items(f, "rows.item", use_float=True)

    @staticmethod
    def _index(path: str) -> Dict[Tuple, Dict[str, Any]]:
        index: Dict[Tuple, Dict[str, Any]] = {}
        for row in Differ._rows(path):
            key = Differ._key(row)
            if key in index:
                logger.warning("duplicate row %s in %s", Differ._label(key), path)
            index[key] = row
        return index

    @staticmethod
    def _key(row: Dict[str, Any]) -> Tuple:
        return tuple(json.dumps(row.get(name), sort_keys=True) for name in KEY_FIELDS)

    @staticmethod
    def _label(key: Tuple) -> str:
        parts = []
        for name, encoded in zip(KEY_FIELDS, key):
            value = json.loads(encoded)
            if value is None:
                continue
            if isinstance(value, dict):
                value = " ".join(f"{k}={v}" for k, v in value.items())
            parts.append(str(value))
        return " | ".join(parts)

    @staticmethod
    def _field_differences(row1: Dict[str, Any], row2: Dict[str, Any], rtol: float):
        for field in sorted(set(row1) | set(row2)):
            if field in KEY_FIELDS or field in IGNORED_FIELDS:
                continue
            a, b = row1.get(field, "N/A"), row2.get(field, "N/A")
            if Differ._numeric(a) and Differ._numeric(b):
                if not math.isclose(a, b, rel_tol=rtol, abs_tol=0.0):
                    yield field, (a, b)
            elif a != b:
                yield field, (a, b)

    @staticmethod
    def _numeric(value: Any) -> bool:
        return isinstance(value, (int, float)) and not isinstance(value, bool)

    @staticmethod
    def _report(count: int, message: str) -> None:
        if count < MAX_REPORTED:
            print(message)
