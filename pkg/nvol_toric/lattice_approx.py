"""
Подсчёт точек решётки в растянутых выпуклых телах

Реализует:
- #(kΔ ∩ Z^n) сечениями по последней координате (индукция по размерности)
- расписание k0(ε, n) с константами доказательства
- сертифицированную оценку объёма count/k^n с погрешностью ε
- разрыв между интегралом монотонной функции и её суммой Римана на сетке 1/k
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from convex_core import ONE, ZERO, Polyhedron, to_rat
from errors import NvolInputError

logger = logging.getLogger(__name__)


# ==============================
# ПОДСЧЁТ ТОЧЕК
# ==============================

@dataclass(frozen=True)
class CertifiedEstimate:
    """Оценка объёма count/k^n, гарантированно отличающаяся от vol(Δ) не более чем на ε"""
    value: Fraction
    error_bound: Fraction
    dilation: int
    raw_count: int
    dim: int

    def __post_init__(self):
        if self.dilation < k0_schedule(self.error_bound, self.dim):
            raise NvolInputError("Растяжение меньше k0(ε, n): оценка не сертифицирована")
        if self.value != Fraction(self.raw_count, self.dilation ** self.dim):
            raise NvolInputError("value должно равняться raw_count / k^n")


def _check_inside_unit_cube(body: Polyhedron):
    for i in range(body.dim):
        bounds = body.coordinate_range(i)
        if bounds is None:
            return
        lo, hi = bounds
        if lo < 0 or hi > 1:
            raise NvolInputError(f"Тело не лежит в [0,1]^{body.dim}: координата u{i + 1} ∈ [{lo}, {hi}]")


def _integer_rows(body: Polyhedron, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Целочисленная запись условий: z ∈ kΔ ⇔ A z ≥ r"""
    rows, rhs = [], []
    for h in body.halfspaces:
        scale = math.lcm(h.offset.denominator, *(c.denominator for c in h.normal))
        rows.append([int(c * scale) for c in h.normal])
        rhs.append(int(h.offset * scale) * k)
    return np.array(rows, dtype=np.int64), np.array(rhs, dtype=np.int64)


def _count_section(rows: np.ndarray, rhs: np.ndarray, dim: int, k: int) -> int:
    """
    Число z ∈ [0,k]^dim ∩ Z^dim с rows[:, :dim]·z ≥ rhs

    rhs может быть пакетом правых частей формы (B, m); все сечения одного
    уровня обрабатываются векторно.
    """
    rhs = np.atleast_2d(rhs)
    grid = np.arange(k + 1, dtype=np.int64)
    # Разворачиваем старшие координаты сетки, пока не останется одна
    for j in range(dim - 1, 0, -1):
        rhs = (rhs[:, None, :] - grid[None, :, None] * rows[None, None, :, j]).reshape(-1, rows.shape[0])
    a = rows[:, 0]
    lo = np.zeros(rhs.shape[0], dtype=np.int64)
    hi = np.full(rhs.shape[0], k, dtype=np.int64)
    empty = np.zeros(rhs.shape[0], dtype=bool)
    for idx, coef in enumerate(a):
        r = rhs[:, idx]
        if coef > 0:
            lo = np.maximum(lo, -((-r) // coef))
        elif coef < 0:
            hi = np.minimum(hi, r // coef)
        else:
            empty |= r > 0
    counts = np.where(empty, 0, np.maximum(hi - lo + 1, 0))
    return int(counts.sum())


def section_counts(body: Polyhedron, k: int) -> List[Tuple[Fraction, int]]:
    """
    Пары (t, #(kΔ_t ∩ Z^{n−1})) по уровням t ∈ [t−, t+] ∩ (1/k)Z

    Для n = 1 каждое "сечение": точка, и её вклад равен 1.
    """
    if k < 1:
        raise NvolInputError("Растяжение k должно быть положительным")
    _check_inside_unit_cube(body)
    bounds = body.coordinate_range(body.dim - 1)
    if bounds is None:
        return []
    t_lo, t_hi = bounds
    rows, rhs = _integer_rows(body, k)
    result = []
    for z in range(math.ceil(t_lo * k), math.floor(t_hi * k) + 1):
        t = Fraction(z, k)
        if body.dim == 1:
            result.append((t, 1))
            continue
        level_rhs = rhs - rows[:, -1] * z
        result.append((t, _count_section(rows[:, :-1], level_rhs, body.dim - 1, k)))
    return result


def count_lattice_points(body: Polyhedron, k: int) -> int:
    """
    #(kΔ ∩ Z^n) для Δ ⊆ [0,1]^n

    Raises:
        NvolInputError: Δ ⊄ [0,1]^n или k < 1
    """
    total = sum(count for _, count in section_counts(body, k))
    logger.debug("#(%dΔ ∩ Z^%d) = %d", k, body.dim, total)
    return total


def k0_schedule(eps, n: int) -> int:
    """
    k0(ε,1) = ⌈1/ε⌉; k0(ε,n) = max(k0(ε/3, n−1), ⌈15/ε⌉) для n ≥ 2
    """
    eps = to_rat(eps)
    if not ZERO < eps < ONE:
        raise NvolInputError(f"ε должно лежать в (0,1), получено {eps}")
    if n < 1:
        raise NvolInputError("Размерность должна быть положительной")
    if n == 1:
        return math.ceil(1 / eps)
    return max(k0_schedule(eps / 3, n - 1), math.ceil(15 / eps))


def dilation_error_bound(k: int, n: int) -> Fraction:
    """
    Наименьшее ε, для которого k0(ε, n) ≤ k: 1/k при n = 1, max(15/k, 3·ε(k, n−1)) при n ≥ 2.
    При ε ≥ 1 оценка тривиальна, но остаётся верной.
    """
    if k < 1:
        raise NvolInputError(f"k должно быть положительным, получено {k}")
    if n < 1:
        raise NvolInputError("Размерность должна быть положительной")
    if n == 1:
        return Fraction(1, k)
    return max(Fraction(15, k), 3 * dilation_error_bound(k, n - 1))


def certified_volume(body: Polyhedron, eps, k: Optional[int] = None) -> CertifiedEstimate:
    """Оценка vol(Δ) при k = max(k, k0(ε, n)); без k берётся ровно k0(ε, n)"""
    eps = to_rat(eps)
    k0 = k0_schedule(eps, body.dim)
    if k is not None and k < 1:
        raise NvolInputError(f"k должно быть положительным, получено {k}")
    k = k0 if k is None else max(k, k0)
    count = count_lattice_points(body, k)
    logger.info("Сертифицированная оценка: k = %d, точек %d, ε = %s", k, count, eps)
    return CertifiedEstimate(Fraction(count, k ** body.dim), eps, k, count, body.dim)


# ==============================
# МОНОТОННЫЕ ФУНКЦИИ
# ==============================

class MonotoneDirection(Enum):
    """Направление монотонности"""
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class MonotonePiece:
    """Линейный кусок на [left, right): значения от left_value до right_value"""
    left: Fraction
    right: Fraction
    left_value: Fraction
    right_value: Fraction

    def value_at(self, t: Fraction) -> Fraction:
        share = (t - self.left) / (self.right - self.left)
        return self.left_value + (self.right_value - self.left_value) * share

    def integral(self) -> Fraction:
        return (self.right - self.left) * (self.left_value + self.right_value) / 2


@dataclass(frozen=True)
class MonotoneTable:
    """
    Монотонная функция g:[a,b] → [0,1], кусочно-линейная с рациональными
    точками излома (ступеньки: частный случай постоянных кусков)
    """
    start: Fraction
    end: Fraction
    pieces: Tuple[MonotonePiece, ...]
    direction: MonotoneDirection

    def __post_init__(self):
        if not self.pieces:
            raise NvolInputError("Функция должна состоять хотя бы из одного куска")
        if self.pieces[0].left != self.start or self.pieces[-1].right != self.end:
            raise NvolInputError("Куски должны покрывать отрезок [a, b]")
        values = []
        for prev, piece in zip((None,) + self.pieces[:-1], self.pieces):
            if piece.left >= piece.right:
                raise NvolInputError("Кусок должен иметь положительную длину")
            if prev is not None and prev.right != piece.left:
                raise NvolInputError("Куски должны идти подряд без разрывов области")
            values.extend([piece.left_value, piece.right_value])
        if any(v < 0 or v > 1 for v in values):
            raise NvolInputError("Значения функции должны лежать в [0,1]")
        ordered = values if self.direction == MonotoneDirection.INCREASING else values[::-1]
        if any(x > y for x, y in zip(ordered, ordered[1:])):
            raise NvolInputError(f"Значения не монотонны в направлении {self.direction.value}")

    @classmethod
    def from_steps(cls, start, breakpoints: Sequence, values: Sequence, end) -> "MonotoneTable":
        """Ступенчатая функция: values[i] на [breakpoints[i-1], breakpoints[i])"""
        edges = [to_rat(start)] + [to_rat(b) for b in breakpoints] + [to_rat(end)]
        values = [to_rat(v) for v in values]
        if len(values) != len(edges) - 1:
            raise NvolInputError("Число значений должно быть на 1 больше числа точек разрыва")
        pieces = tuple(MonotonePiece(l, r, v, v) for l, r, v in zip(edges, edges[1:], values))
        increasing = all(x <= y for x, y in zip(values, values[1:]))
        direction = MonotoneDirection.INCREASING if increasing else MonotoneDirection.DECREASING
        return cls(edges[0], edges[-1], pieces, direction)

    def value_at(self, t) -> Fraction:
        t = to_rat(t)
        if not self.start <= t <= self.end:
            raise NvolInputError(f"Точка {t} вне области [{self.start}, {self.end}]")
        for piece in self.pieces:
            if piece.left <= t < piece.right:
                return piece.value_at(t)
        return self.pieces[-1].right_value

    def integral(self) -> Fraction:
        return sum((p.integral() for p in self.pieces), ZERO)

    def samples(self, k: int) -> List[Tuple[Fraction, Fraction]]:
        """Значения на [a,b] ∩ (1/k)Z"""
        first, last = math.ceil(self.start * k), math.floor(self.end * k)
        return [(Fraction(j, k), self.value_at(Fraction(j, k))) for j in range(first, last + 1)]


@dataclass(frozen=True)
class RiemannGap:
    gap: Fraction
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.gap <= self.bound


def riemann_gap(table: MonotoneTable, k: int) -> RiemannGap:
    """|∫_a^b g − (1/k)Σ g(t)| и граница 2/k"""
    if k < 1:
        raise NvolInputError("k должно быть положительным")
    mean_sum = sum((v for _, v in table.samples(k)), ZERO) / k
    return RiemannGap(abs(table.integral() - mean_sum), Fraction(2, k))
