"""File formats: JSON vectors/tensors/reports, CSV matrices and sweeps.

All writers are atomic (temp file + rename) and deterministic: entries are
emitted in sorted order, scalars in a fixed textual form, so identical
inputs produce byte-identical files.  Scalars default to exact rationals
rendered as "p/q" (or a bare integer); ``mode="float"`` switches to
decimal rendering.  Readers accept integers, fractions, and decimal
strings, and report malformed files as InputError so the command line can
map them to the input-error exit code.
"""

import csv
import json
import os
import tempfile
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .counterexample import DivergenceReport
from .errors import InputError
from .extremal import GrowthRecord
from .matrices import SquareMatrix
from .space import Scalar, TreeVector
from .tensor import TensorElement

EXACT = "exact"
FLOAT = "float"


# ---------------------------------------------------------------------------
# scalars

def format_scalar(value: Scalar, mode: str = EXACT) -> str:
    if mode == FLOAT:
        return repr(float(value))
    if mode != EXACT:
        raise InputError(f"unknown scalar mode {mode!r}")
    if isinstance(value, float):
        return repr(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_scalar(text: str, mode: str = EXACT) -> Scalar:
    text = str(text).strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse scalar {text!r}") from exc
    return float(value) if mode == FLOAT else value


# ---------------------------------------------------------------------------
# atomic file output

def atomic_write_text(path: str, text: str) -> None:
    """Write text so readers never observe a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    handle = tempfile.NamedTemporaryFile("w", dir=directory, delete=False,
                                         prefix=".tmp-", suffix="~")
    try:
        with handle as fh:
            fh.write(text)
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def write_json(path: str, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------------------
# tree vectors

def tree_vector_to_dict(x: TreeVector, mode: str = EXACT) -> dict:
    return {"entries": [{"node": node, "value": format_scalar(value, mode)}
                        for node, value in sorted(x.entries.items())]}


def tree_vector_from_dict(obj, mode: str = EXACT) -> TreeVector:
    if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
        raise InputError('tree vector JSON must be {"entries": [...]}')
    entries = {}
    for item in obj["entries"]:
        if not isinstance(item, dict) or "node" not in item or "value" not in item:
            raise InputError('each entry needs "node" and "value" fields')
        node = item["node"]
        if not isinstance(node, str) or any(b not in "01" for b in node):
            raise InputError(f"invalid node string {node!r}")
        entries[node] = entries.get(node, 0) + parse_scalar(item["value"], mode)
    return TreeVector(entries)


def write_tree_vector(path: str, x: TreeVector, mode: str = EXACT) -> None:
    write_json(path, tree_vector_to_dict(x, mode))


def read_tree_vector(path: str, mode: str = EXACT) -> TreeVector:
    return tree_vector_from_dict(read_json(path), mode)


# ---------------------------------------------------------------------------
# tensor elements

def tensor_to_dict(W: TensorElement, mode: str = EXACT) -> dict:
    return {"entries": [{"left": left, "right": right,
                         "value": format_scalar(value, mode)}
                        for (left, right), value in sorted(W.entries.items())]}


def tensor_from_dict(obj, mode: str = EXACT) -> TensorElement:
    if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
        raise InputError('tensor JSON must be {"entries": [...]}')
    entries = {}
    for item in obj["entries"]:
        if not isinstance(item, dict) or not {"left", "right", "value"} <= set(item):
            raise InputError('each entry needs "left", "right" and "value" fields')
        left, right = item["left"], item["right"]
        for node in (left, right):
            if not isinstance(node, str) or any(b not in "01" for b in node):
                raise InputError(f"invalid node string {node!r}")
        key = (left, right)
        entries[key] = entries.get(key, 0) + parse_scalar(item["value"], mode)
    return TensorElement(entries)


def write_tensor(path: str, W: TensorElement, mode: str = EXACT) -> None:
    write_json(path, tensor_to_dict(W, mode))


def read_tensor(path: str, mode: str = EXACT) -> TensorElement:
    return tensor_from_dict(read_json(path), mode)


# ---------------------------------------------------------------------------
# matrices as CSV

def matrix_to_csv_text(M: SquareMatrix, mode: str = EXACT) -> str:
    lines = [",".join(format_scalar(v, mode) for v in row) for row in M.rows]
    return "\n".join(lines) + "\n"


def write_matrix_csv(path: str, M: SquareMatrix, mode: str = EXACT) -> None:
    atomic_write_text(path, matrix_to_csv_text(M, mode))


def read_matrix_csv(path: str, mode: str = EXACT) -> SquareMatrix:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh)
                    if row and not row[0].lstrip().startswith("#")]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path} contains no matrix rows")
    parsed = [[parse_scalar(cell, mode) for cell in row] for row in rows]
    if any(len(row) != len(parsed) for row in parsed):
        raise InputError(f"{path} is not a square matrix "
                         f"({len(parsed)} rows, widths {sorted({len(r) for r in parsed})})")
    return SquareMatrix(parsed)


# ---------------------------------------------------------------------------
# growth sweep CSV

GROWTH_COLUMNS = ("n", "sigma_M", "sigma_EM", "exactness", "measured_ratio")


def growth_records_to_csv_text(records: Sequence[GrowthRecord],
                               header_lines: Iterable[str] = ()) -> str:
    out = [f"# {line}" for line in header_lines]
    out.append(",".join(GROWTH_COLUMNS))
    for record in records:
        ratio = "n/a" if record.measured_ratio is None else repr(record.measured_ratio)
        out.append(",".join([
            str(record.n),
            format_scalar(record.sigma_m),
            format_scalar(record.sigma_em),
            record.exactness,
            ratio,
        ]))
    return "\n".join(out) + "\n"


def write_growth_csv(path: str, records: Sequence[GrowthRecord],
                     header_lines: Iterable[str] = ()) -> None:
    atomic_write_text(path, growth_records_to_csv_text(records, header_lines))


# ---------------------------------------------------------------------------
# divergence report

def report_to_dict(report: DivergenceReport,
                   config_echo: Optional[dict] = None) -> dict:
    out = {
        "rows": [{
            "r": row.r,
            "L_r": format_scalar(row.lower_bound),
            "match": row.match,
            "flagged": row.flagged,
        } for row in report.rows],
        "K_hypothesis": (None if report.K_hypothesis is None
                         else format_scalar(report.K_hypothesis)),
        "max_lower_bound": format_scalar(report.max_lower_bound),
        "all_match": report.all_match,
        "annotation": report.annotation,
    }
    if config_echo is not None:
        out["config"] = config_echo
    return out


def write_report_json(path: str, report: DivergenceReport,
                      config_echo: Optional[dict] = None) -> None:
    write_json(path, report_to_dict(report, config_echo))


def report_to_csv_text(report: DivergenceReport,
                       header_lines: Iterable[str] = ()) -> str:
    out = [f"# {line}" for line in header_lines]
    out.append("r,L_r,match,flagged")
    for row in report.rows:
        out.append(",".join([str(row.r), format_scalar(row.lower_bound),
                             str(row.match).lower(), str(row.flagged).lower()]))
    return "\n".join(out) + "\n"


def write_report_csv(path: str, report: DivergenceReport,
                     header_lines: Iterable[str] = ()) -> None:
    atomic_write_text(path, report_to_csv_text(report, header_lines))
