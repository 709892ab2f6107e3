"""
Исключения приложения

Все ошибки входных данных наследуются от ValueError, как и в парсерах
правил: вызывающий код может ловить ValueError и не знать о подклассах.
"""
from typing import Any, Dict, Optional


class NvolInputError(ValueError):
    """Некорректные входные данные (код выхода 1)"""


class UnsupportedDimensionError(NvolInputError):
    """Размерность вне поддерживаемого диапазона"""


class InfiniteColengthError(NvolInputError):
    """Идеал не является m-примарным, его коразмерность бесконечна"""


class InfeasibleWindowError(NvolInputError):
    """Окно ограничений для нормированной коразмерности пусто"""


class PropertyViolationError(RuntimeError):
    """Нарушен инвариант, который библиотека проверяет сама (код выхода 2)"""

    def __init__(self, message: str, counterexample: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.counterexample = counterexample or {}
