"""
Точная рациональная выпуклая геометрия

Реализует:
- полупространства и многогранники в H-представлении
- симплекс-метод на рациональных числах с правилом Бленда
- максимальное растяжение max{λ : u ∈ λP} для многогранников ньютоновского типа
- точный объём ограниченных многогранников размерности ≤ 4 (рекурсивные сечения)

Плавающей точки здесь нет нигде.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from errors import NvolInputError, UnsupportedDimensionError

logger = logging.getLogger(__name__)

Rat = Fraction
Vector = Tuple[Fraction, ...]

MAX_VOLUME_DIM = 4

ZERO = Fraction(0)
ONE = Fraction(1)


# ==============================
# РАЦИОНАЛЬНЫЕ ЧИСЛА И ВЕКТОРЫ
# ==============================

def to_rat(value) -> Fraction:
    """Приводит int, строку "p/q" или Fraction к Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise NvolInputError(f"Ожидалось рациональное число, получено {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise NvolInputError(f"Некорректное рациональное число: {value!r}") from e
    raise NvolInputError(f"Ожидалось рациональное число, получено {value!r}")


def to_vector(values: Iterable) -> Vector:
    return tuple(to_rat(v) for v in values)


def format_rat(value: Fraction) -> str:
    """Строка "p/q" или "p" при q = 1"""
    return str(Fraction(value))


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), ZERO)


def solve_linear_system(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[Vector]:
    """Решает квадратную систему методом Гаусса; None, если матрица вырождена"""
    n = len(rows)
    m = [list(row) + [b] for row, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def nullspace_vector(rows: Sequence[Sequence[Fraction]], n: int) -> Optional[Vector]:
    """Базисный вектор ядра, если ядро одномерно, иначе None"""
    m = [list(map(Fraction, row)) for row in rows]
    pivots = []
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    free = [col for col in range(n) if col not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    vec = [ZERO] * n
    vec[f] = ONE
    for row_index, col in enumerate(pivots):
        vec[col] = -m[row_index][f]
    return tuple(vec)


# ==============================
# ПОЛУПРОСТРАНСТВА И МНОГОГРАННИКИ
# ==============================

@dataclass(frozen=True)
class Halfspace:
    """Полупространство {u : ⟨normal, u⟩ ≥ offset}"""
    normal: Vector
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", to_vector(self.normal))
        object.__setattr__(self, "offset", to_rat(self.offset))
        if not self.normal:
            raise NvolInputError("Нормаль полупространства пуста")
        if all(c == 0 for c in self.normal):
            raise NvolInputError("Нормаль полупространства не может быть нулевой")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def contains(self, u: Sequence) -> bool:
        return dot(self.normal, u) >= self.offset

    def __str__(self):
        terms = " + ".join(f"{format_rat(c)}*u{i + 1}" for i, c in enumerate(self.normal) if c != 0)
        return f"{terms} >= {format_rat(self.offset)}"


def _section_halfspaces(halfspaces: Sequence[Halfspace], t: Fraction) -> Optional[List[Halfspace]]:
    """Фиксирует последнюю координату; None, если сечение пусто"""
    result = []
    for h in halfspaces:
        normal = h.normal[:-1]
        offset = h.offset - h.normal[-1] * t
        if all(c == 0 for c in normal):
            if offset > 0:
                return None
            continue
        result.append(Halfspace(normal, offset))
    return result


def _interval(halfspaces: Sequence[Halfspace]) -> Optional[Tuple[Optional[Fraction], Optional[Fraction]]]:
    """Отрезок, заданный одномерными полупространствами; None, если он пуст"""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for h in halfspaces:
        a = h.normal[0]
        bound = h.offset / a
        if a > 0:
            lo = bound if lo is None else max(lo, bound)
        else:
            hi = bound if hi is None else min(hi, bound)
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


@dataclass(frozen=True)
class Polyhedron:
    """
    Многогранник {u ∈ Q^n : ⟨ν_i, u⟩ ≥ b_i для всех i}

    Флаг bounded: заявление вызывающего кода; проверяется лениво через
    certify_bounded(). Многогранники Ньютона намеренно неограничены.
    """
    dim: int
    halfspaces: Tuple[Halfspace, ...]
    bounded: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise NvolInputError("Размерность многогранника должна быть положительной")
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))
        for h in self.halfspaces:
            if h.dim != self.dim:
                raise NvolInputError(
                    f"Полупространство размерности {h.dim} в многограннике размерности {self.dim}"
                )

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence) -> "Polyhedron":
        lower, upper = to_vector(lower), to_vector(upper)
        n = len(lower)
        halfspaces = []
        for i in range(n):
            e = tuple(ONE if j == i else ZERO for j in range(n))
            halfspaces.append(Halfspace(e, lower[i]))
            halfspaces.append(Halfspace(tuple(-x for x in e), -upper[i]))
        return cls(n, tuple(halfspaces), bounded=True)

    @classmethod
    def unit_cube(cls, n: int) -> "Polyhedron":
        return cls.box([0] * n, [1] * n)

    @staticmethod
    def orthant_halfspaces(n: int) -> Tuple[Halfspace, ...]:
        return tuple(Halfspace(tuple(ONE if j == i else ZERO for j in range(n)), ZERO) for i in range(n))

    def contains(self, u: Sequence) -> bool:
        return all(h.contains(u) for h in self.halfspaces)

    def intersect(self, extra: Iterable[Halfspace], bounded: Optional[bool] = None) -> "Polyhedron":
        return Polyhedron(self.dim, self.halfspaces + tuple(extra), self.bounded if bounded is None else bounded)

    def section(self, t) -> Optional["Polyhedron"]:
        """Сечение {u : u_n = t} как многогранник размерности n−1; None, если пусто"""
        if self.dim < 2:
            raise NvolInputError("Сечение одномерного многогранника не определено")
        halfspaces = _section_halfspaces(self.halfspaces, to_rat(t))
        if halfspaces is None:
            return None
        return Polyhedron(self.dim - 1, tuple(halfspaces), self.bounded)

    def coordinate_range(self, i: int) -> Optional[Tuple[Fraction, Fraction]]:
        """Точные min и max i-й координаты через LP; None для пустого многогранника"""
        e = tuple(ONE if j == i else ZERO for j in range(self.dim))
        low = lp_optimize(e, self, Sense.MIN)
        if low.status == LPStatus.INFEASIBLE:
            return None
        high = lp_optimize(e, self, Sense.MAX)
        if low.status == LPStatus.UNBOUNDED or high.status == LPStatus.UNBOUNDED:
            raise NvolInputError(f"Координата u{i + 1} не ограничена на многограннике")
        return low.value, high.value

    def certify_bounded(self) -> bool:
        return self._bounded_certificate

    @cached_property
    def _bounded_certificate(self) -> bool:
        e_rows = [tuple(ONE if j == i else ZERO for j in range(self.dim)) for i in range(self.dim)]
        for e in e_rows:
            for sense in Sense:
                result = lp_optimize(e, self, sense)
                if result.status == LPStatus.INFEASIBLE:
                    return True
                if result.status == LPStatus.UNBOUNDED:
                    return False
        return True

    @cached_property
    def vertices(self) -> Tuple[Vector, ...]:
        return tuple(enumerate_vertices(self))


# ==============================
# ЛИНЕЙНОЕ ПРОГРАММИРОВАНИЕ
# ==============================

class Sense(Enum):
    """Направление оптимизации"""
    MAX = "max"
    MIN = "min"


class LPStatus(Enum):
    """Исход задачи линейного программирования"""
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: Optional[Fraction] = None
    point: Optional[Vector] = None


class SimplexTableau:
    """
    Симплекс-таблица для задачи max c·x при A x = b, x ≥ 0, b ≥ 0

    Двухфазный метод с искусственными переменными; выбор входящей и
    выходящей переменной по правилу Бленда (наименьший индекс), поэтому
    зацикливание невозможно.
    """

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction]):
        self.rows = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.width = len(rows[0]) if rows else 0
        self.basis: List[int] = []

    def pivot(self, i: int, j: int):
        piv = self.rows[i][j]
        self.rows[i] = [x / piv for x in self.rows[i]]
        pivot_row = self.rows[i]
        for r in range(len(self.rows)):
            if r != i:
                f = self.rows[r][j]
                if f != 0:
                    self.rows[r] = [x - f * y for x, y in zip(self.rows[r], pivot_row)]
        self.basis[i] = j

    def _reduced_costs(self, costs: Sequence[Fraction]) -> List[Fraction]:
        z = []
        for j in range(len(costs)):
            z.append(sum((costs[self.basis[i]] * self.rows[i][j] for i in range(len(self.rows))), ZERO) - costs[j])
        return z

    def objective(self, costs: Sequence[Fraction]) -> Fraction:
        return sum((costs[self.basis[i]] * self.rows[i][-1] for i in range(len(self.rows))), ZERO)

    def bland(self, costs: Sequence[Fraction]) -> LPStatus:
        """Итерации симплекс-метода до оптимума или луча неограниченности"""
        while True:
            z = self._reduced_costs(costs)
            entering = next((j for j, zj in enumerate(z) if zj < 0), None)
            if entering is None:
                return LPStatus.OPTIMAL
            candidates = [
                (self.rows[i][-1] / self.rows[i][entering], self.basis[i], i)
                for i in range(len(self.rows))
                if self.rows[i][entering] > 0
            ]
            if not candidates:
                return LPStatus.UNBOUNDED
            _, _, leaving = min(candidates)
            self.pivot(leaving, entering)

    def solution(self, width: int) -> List[Fraction]:
        x = [ZERO] * width
        for i, j in enumerate(self.basis):
            if j < width:
                x[j] = self.rows[i][-1]
        return x


def solve_standard_form(a_rows: List[List[Fraction]], b: List[Fraction], c: List[Fraction]):
    """
    max c·x при A x = b, x ≥ 0

    Returns:
        кортеж (статус, x, значение)
    """
    m, n = len(a_rows), len(c)
    rows, rhs = [], []
    for row, bi in zip(a_rows, b):
        if bi < 0:
            row, bi = [-x for x in row], -bi
        rows.append(list(row) + [ONE if k == len(rows) else ZERO for k in range(m)])
        rhs.append(bi)
    tableau = SimplexTableau(rows, rhs)
    tableau.basis = list(range(n, n + m))

    # Фаза 1: минимизация суммы искусственных переменных
    phase1 = [ZERO] * n + [-ONE] * m
    tableau.bland(phase1)
    if tableau.objective(phase1) < 0:
        return LPStatus.INFEASIBLE, None, None

    # Выводим искусственные переменные из базиса, вырожденные строки удаляем
    redundant = []
    for i in range(m):
        if tableau.basis[i] >= n:
            j = next((j for j in range(n) if tableau.rows[i][j] != 0), None)
            if j is None:
                redundant.append(i)
            else:
                tableau.pivot(i, j)
    keep = [i for i in range(m) if i not in redundant]
    tableau.rows = [tableau.rows[i][:n] + [tableau.rows[i][-1]] for i in keep]
    tableau.basis = [tableau.basis[i] for i in keep]

    # Фаза 2
    status = tableau.bland(c)
    if status == LPStatus.UNBOUNDED:
        return status, None, None
    return LPStatus.OPTIMAL, tableau.solution(n), tableau.objective(c)


def lp_optimize(objective: Sequence, polyhedron: Polyhedron, sense: Sense = Sense.MAX) -> LPResult:
    """
    Точный оптимум линейной функции на многограннике

    Свободные переменные раскладываются как u = u⁺ − u⁻, ограничения
    ⟨ν, u⟩ ≥ b превращаются в равенства с избыточными переменными.
    """
    objective = to_vector(objective)
    if not polyhedron.halfspaces:
        raise NvolInputError("Многогранник без полупространств: задача ЛП не определена")
    if len(objective) != polyhedron.dim:
        raise NvolInputError(
            f"Размерность цели {len(objective)} не совпадает с размерностью многогранника {polyhedron.dim}"
        )
    n = polyhedron.dim
    m = len(polyhedron.halfspaces)
    a_rows, b = [], []
    for i, h in enumerate(polyhedron.halfspaces):
        slack = [-ONE if k == i else ZERO for k in range(m)]
        a_rows.append(list(h.normal) + [-x for x in h.normal] + slack)
        b.append(h.offset)
    sign = ONE if sense == Sense.MAX else -ONE
    c = [sign * x for x in objective] + [-sign * x for x in objective] + [ZERO] * m
    status, x, _ = solve_standard_form(a_rows, b, c)
    if status != LPStatus.OPTIMAL:
        return LPResult(status)
    point = tuple(x[i] - x[n + i] for i in range(n))
    return LPResult(LPStatus.OPTIMAL, dot(objective, point), point)


def enumerate_vertices(polyhedron: Polyhedron) -> List[Vector]:
    """Все вершины: решения систем из n граней, удовлетворяющие остальным"""
    n = polyhedron.dim
    found = set()
    for combo in itertools.combinations(polyhedron.halfspaces, n):
        point = solve_linear_system([h.normal for h in combo], [h.offset for h in combo])
        if point is not None and polyhedron.contains(point):
            found.add(point)
    return sorted(found)


def max_dilation(u: Sequence, polyhedron: Polyhedron) -> Fraction:
    """
    sup{λ ≥ 0 : u ∈ λP} для многогранника с ортантом в качестве рецессивного конуса

    Решается одномерной задачей ЛП: ⟨ν_i, u⟩ ≥ λ·b_i для всех граней.
    """
    u = to_vector(u)
    if len(u) != polyhedron.dim:
        raise NvolInputError(f"Вектор размерности {len(u)} для многогранника размерности {polyhedron.dim}")
    if any(x < 0 for x in u):
        raise NvolInputError("Вектор должен лежать в неотрицательном ортанте")
    if all(x == 0 for x in u):
        raise NvolInputError("Растяжение не определено для нулевого вектора")
    constraints = [Halfspace((ONE,), ZERO)]
    for h in polyhedron.halfspaces:
        value = dot(h.normal, u)
        if h.offset == 0:
            if value < 0:
                raise NvolInputError("Вектор не лежит ни в одном растяжении многогранника")
            continue
        constraints.append(Halfspace((-h.offset,), -value))
    result = lp_optimize((ONE,), Polyhedron(1, tuple(constraints)), Sense.MAX)
    if result.status == LPStatus.UNBOUNDED:
        raise NvolInputError("Многогранник содержит начало координат: растяжение бесконечно")
    if result.status == LPStatus.INFEASIBLE:
        raise NvolInputError("Вектор не лежит ни в одном растяжении многогранника")
    return result.value


# ==============================
# ОБЪЁМ
# ==============================

def _poly_mul(p: List[Fraction], q: List[Fraction]) -> List[Fraction]:
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


@lru_cache(maxsize=None)
def _interpolation_weights(points: int) -> Tuple[Fraction, ...]:
    """Веса ∫_0^1 L_i(x) dx для узлов x_i = i/(points+1), i = 1..points"""
    nodes = [Fraction(i, points + 1) for i in range(1, points + 1)]
    weights = []
    for i, xi in enumerate(nodes):
        poly = [ONE]
        for j, xj in enumerate(nodes):
            if j != i:
                poly = _poly_mul(poly, [-xj / (xi - xj), ONE / (xi - xj)])
        weights.append(sum((c / (k + 1) for k, c in enumerate(poly)), ZERO))
    return tuple(weights)


def _volume(halfspaces: Sequence[Halfspace], dim: int) -> Fraction:
    if dim == 1:
        bounds = _interval(halfspaces)
        if bounds is None:
            return ZERO
        lo, hi = bounds
        if lo is None or hi is None:
            raise NvolInputError("Сечение неограничено")
        return hi - lo
    levels = sorted({v[-1] for v in enumerate_vertices(Polyhedron(dim, tuple(halfspaces)))})
    if len(levels) < 2:
        return ZERO
    # Между соседними уровнями вершин объём сечения: многочлен степени ≤ dim−1
    weights = _interpolation_weights(dim)
    total = ZERO
    for t0, t1 in zip(levels, levels[1:]):
        width = t1 - t0
        for i, w in enumerate(weights, 1):
            t = t0 + width * Fraction(i, dim + 1)
            section = _section_halfspaces(halfspaces, t)
            if section is not None:
                total += width * w * _volume(section, dim - 1)
    return total


def polytope_volume(polyhedron: Polyhedron) -> Fraction:
    """
    Точный евклидов объём ограниченного многогранника размерности ≤ 4

    Raises:
        UnsupportedDimensionError: dim > 4
        NvolInputError: многогранник неограничен
    """
    if polyhedron.dim > MAX_VOLUME_DIM:
        raise UnsupportedDimensionError(
            f"Точный объём поддерживается до размерности {MAX_VOLUME_DIM}, получено {polyhedron.dim}"
        )
    if not polyhedron.halfspaces or not polyhedron.certify_bounded():
        raise NvolInputError("Объём неограниченного многогранника не определён")
    volume = _volume(polyhedron.halfspaces, polyhedron.dim)
    logger.debug("Объём многогранника размерности %d: %s", polyhedron.dim, volume)
    return volume
