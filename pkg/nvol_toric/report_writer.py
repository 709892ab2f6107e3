"""
Вывод отчётов: точные рациональные строки (или десятичные по --decimal), JSON и CSV

Вывод детерминирован: порядок ключей фиксирован, строки CSV завершаются "\\n",
каждый отчёт заканчивается примечанием о мономиальной достаточности.
"""
import contextlib
import csv
import dataclasses
import json
import sys
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Iterator, Optional, Sequence, TextIO

import numpy as np

from convex_core import format_rat
from monomial_algebra import MonomialIdeal, Semigroup, format_monomial
from singularity import MonomialValuation, SingularityModel


def render_rat(value: Fraction, decimal_places: Optional[int] = None) -> str:
    """Точная строка "p/q"; при decimal_places округление половины к чётному"""
    if decimal_places is None:
        return format_rat(value)
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 60 + decimal_places
        exact = Decimal(value.numerator) / Decimal(value.denominator)
        return str(exact.quantize(Decimal(1).scaleb(-decimal_places), rounding=ROUND_HALF_EVEN))


def render_ideal(ideal: MonomialIdeal) -> str:
    """Образующие через ";": "x^2;x*y;y^3" """
    return ";".join(format_monomial(g) for g in ideal.generators)


def jsonable(obj: Any, decimal_places: Optional[int] = None) -> Any:
    """Приводит результаты библиотеки к типам JSON"""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return render_rat(obj, decimal_places)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, MonomialIdeal):
        return {"generators": [list(g) for g in obj.generators], "monomials": render_ideal(obj)}
    if isinstance(obj, MonomialValuation):
        return [render_rat(w, decimal_places) for w in obj.weights]
    if isinstance(obj, (SingularityModel, Semigroup)):
        return obj.describe()
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name), decimal_places) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v, decimal_places) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v, decimal_places) for v in obj]
    raise TypeError(f"Нет JSON-представления для {type(obj).__name__}")


def write_json(payload: dict, stream: TextIO, note: Optional[str], decimal_places: Optional[int] = None):
    document = dict(jsonable(payload, decimal_places))
    if note is not None:
        document["note"] = note
    stream.write(json.dumps(document, indent=2, ensure_ascii=False) + "\n")


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], stream: TextIO, note: Optional[str],
              decimal_places: Optional[int] = None):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v, decimal_places) for v in row])
    if note is not None:
        stream.write(f"# {note}\n")


def _csv_cell(value: Any, decimal_places: Optional[int]) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, MonomialIdeal):
        return render_ideal(value)
    if isinstance(value, Fraction):
        return render_rat(value, decimal_places)
    return str(value)


@contextlib.contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """stdout или файл в UTF-8 с переводами строк "\\n" """
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        yield f
