import csv
import json
import math
from typing import Any, Iterable, List, Sequence, TextIO

from datagravity.utils.types import FieldSample

FIELD_HEADER = [
    "x[m]",
    "y[m]",
    "z[m]",
    "gx[relative]",
    "gy[relative]",
    "gz[relative]",
    "magnitude[relative]",
    "singular",
]


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "__float__"):
        number = float(value)
        if math.isnan(number):
            return "nan"
        return repr(number)
    return str(value)


def write_csv(sink: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])


def field_rows(samples: Iterable[FieldSample]) -> Iterable[List[Any]]:
    for sample in samples:
        if sample.singular:
            yield [*sample.point, None, None, None, None, 1]
        else:
            yield [*sample.point, *sample.field, sample.magnitude, 0]


def write_field_csv(sink: TextIO, samples: Iterable[FieldSample]) -> None:
    write_csv(sink, FIELD_HEADER, field_rows(samples))


def to_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
