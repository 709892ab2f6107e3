"""
Настройки запуска: значения по умолчанию и RunConfig
"""
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from errors import NvolInputError

VERSION = "0.3.0"

# Параметры схемы нормированной коразмерности
DEFAULT_C = Fraction(1, 10)
DEFAULT_K_VALUES = tuple(range(2, 11))
DEFAULT_DELTA = Fraction(1, 2)

# Рандомизированные наборы проверок
DEFAULT_SEED = 7
PRNG_NAME = "PCG64"
DEFAULT_TRIALS = {
    "lattice-a1": 100,
    "riemann-a2": 500,
}

# Сетка уточнения вокруг минимизатора в nvol_weights
REFINEMENT_FACTORS = (Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2), Fraction(2))

# Сетка весов {p/q <= 4, q <= 4} для izumi-51, properness-52, els-42b
WEIGHT_GRID_MAX = 4
WEIGHT_GRID_DENOMINATOR = 4

THREADS_ENV = "NVOL_THREADS"

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VIOLATION = 2
EXIT_BUDGET = 3


@dataclass(frozen=True)
class RunConfig:
    """Параметры одного запуска CLI"""
    command: str
    seed: int = DEFAULT_SEED
    trials: Optional[int] = None
    output: Optional[str] = None
    format: str = "json"
    decimal_places: Optional[int] = None
    threads: int = 1

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise NvolInputError(f"Неизвестный формат вывода: {self.format}")
        if not 0 <= self.seed < 2 ** 64:
            raise NvolInputError("Зерно должно быть 64-битным неотрицательным целым")
        if self.trials is not None and self.trials < 1:
            raise NvolInputError("Число испытаний должно быть положительным")
        if self.threads < 1:
            raise NvolInputError("Число потоков должно быть положительным")
        if self.decimal_places is not None and self.decimal_places < 0:
            raise NvolInputError("Число знаков после запятой не может быть отрицательным")


def resolve_threads(cli_value: Optional[int] = None) -> int:
    """Число рабочих процессов: флаг --threads, затем NVOL_THREADS, затем 1"""
    if cli_value is not None:
        return cli_value
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as e:
        raise NvolInputError(f"{THREADS_ENV} должна быть целым числом, получено {raw!r}") from e
    if value < 1:
        raise NvolInputError(f"{THREADS_ENV} должна быть положительной")
    return value
