"""
Комбинаторика лестниц мономиальных идеалов в торическом полугрупповом кольце

Кольцо R = k[S], где S = {u ∈ N^n : ⟨b,u⟩ ≡ 0 mod d} (или всё N^n).
Поле вычетов совпадает с основным полем, поэтому длина ℓ(R/𝔞) равна числу
стандартных мономов: это инвариант всех поддерживаемых моделей.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from convex_core import (
    ONE,
    ZERO,
    Halfspace,
    Polyhedron,
    max_dilation,
    nullspace_vector,
    polytope_volume,
)
from errors import InfiniteColengthError, NvolInputError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]

VARIABLE_NAMES = ("x", "y", "z", "w")


def format_monomial(u: Sequence[int]) -> str:
    """(2,1) → "x^2*y"; нулевой вектор → "1" """
    names = VARIABLE_NAMES if len(u) <= len(VARIABLE_NAMES) else tuple(f"x{i + 1}" for i in range(len(u)))
    parts = []
    for name, power in zip(names, u):
        if power == 1:
            parts.append(name)
        elif power > 1:
            parts.append(f"{name}^{power}")
    return "*".join(parts) or "1"


def minimalize(points: Iterable[Sequence[int]]) -> Tuple[Exponent, ...]:
    """Минимальные по покомпонентному порядку элементы (в лексикографическом порядке)"""
    unique = sorted({tuple(int(x) for x in p) for p in points}, key=lambda u: (sum(u), u))
    kept: List[Exponent] = []
    for p in unique:
        if not any(all(a <= b for a, b in zip(q, p)) for q in kept):
            kept.append(p)
    return tuple(sorted(kept))


# ==============================
# ПОЛУГРУППА
# ==============================

@dataclass(frozen=True)
class Congruence:
    """Условие ⟨weights, u⟩ ≡ 0 mod modulus"""
    weights: Tuple[int, ...]
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(b) for b in self.weights))
        if self.modulus < 2:
            raise NvolInputError(f"Модуль сравнения должен быть не меньше 2, получено {self.modulus}")

    def describe(self) -> str:
        return f"μ_{self.modulus}({','.join(map(str, self.weights))})"


@dataclass(frozen=True)
class Semigroup:
    """Насыщенная полугруппа показателей S ⊆ N^n"""
    dim: int
    congruence: Optional[Congruence] = None

    def __post_init__(self):
        if self.dim < 1:
            raise NvolInputError("Размерность полугруппы должна быть положительной")
        if self.congruence is not None and len(self.congruence.weights) != self.dim:
            raise NvolInputError("Число весов сравнения не совпадает с размерностью")

    @classmethod
    def affine(cls, n: int) -> "Semigroup":
        return cls(n)

    @classmethod
    def cyclic_quotient(cls, weights: Sequence[int], modulus: int) -> "Semigroup":
        return cls(len(weights), Congruence(tuple(weights), modulus))

    @property
    def modulus(self) -> int:
        return 1 if self.congruence is None else self.congruence.modulus

    @cached_property
    def lattice_index(self) -> int:
        """[Z^n : L] = d / gcd(b_1, …, b_n, d)"""
        if self.congruence is None:
            return 1
        return self.modulus // math.gcd(*self.congruence.weights, self.modulus)

    def member_mask(self, points: np.ndarray) -> np.ndarray:
        mask = np.all(points >= 0, axis=1)
        if self.congruence is not None:
            b = np.array(self.congruence.weights, dtype=np.int64)
            mask &= (points @ b) % self.modulus == 0
        return mask

    def contains(self, u: Sequence[int]) -> bool:
        if len(u) != self.dim or any(x < 0 for x in u):
            return False
        if self.congruence is None:
            return True
        return sum(b * x for b, x in zip(self.congruence.weights, u)) % self.modulus == 0

    def points_in_box(self, upper: Sequence[int]) -> np.ndarray:
        """Все точки S с 0 ≤ u_i < upper_i в лексикографическом порядке"""
        if any(e <= 0 for e in upper):
            return np.zeros((0, self.dim), dtype=np.int64)
        points = np.indices(tuple(int(e) for e in upper), dtype=np.int64).reshape(self.dim, -1).T
        return points[self.member_mask(points)]

    @cached_property
    def hilbert_basis(self) -> Tuple[Exponent, ...]:
        """
        Минимальные ненулевые элементы S

        Элемент с координатой ≥ d уменьшается на d·e_i ∈ S, поэтому
        минимальные элементы лежат в кубе [0,d]^n.
        """
        points = self.points_in_box([self.modulus + 1] * self.dim)
        points = points[points.sum(axis=1) > 0]
        below = np.all(points[:, None, :] <= points[None, :, :], axis=2)
        minimal = below.sum(axis=0) == 1
        return tuple(sorted(tuple(int(x) for x in p) for p in points[minimal]))

    def maximal_ideal(self) -> "MonomialIdeal":
        return MonomialIdeal(self, self.hilbert_basis)

    def describe(self) -> str:
        base = f"A^{self.dim}"
        return base if self.congruence is None else f"{base}/{self.congruence.describe()}"


# ==============================
# МОНОМИАЛЬНЫЕ ИДЕАЛЫ
# ==============================

@dataclass(frozen=True)
class MonomialIdeal:
    """Мономиальный идеал, заданный минимальной системой образующих"""
    semigroup: Semigroup
    generators: Tuple[Exponent, ...]

    def __post_init__(self):
        gens = tuple(sorted(tuple(int(x) for x in g) for g in self.generators))
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise NvolInputError("Идеал должен иметь хотя бы одну образующую")
        for g in gens:
            if len(g) != self.semigroup.dim:
                raise NvolInputError(f"Образующая {g} имеет неверную размерность")
            if not self.semigroup.contains(g):
                raise NvolInputError(f"Образующая {g} не лежит в полугруппе {self.semigroup.describe()}")
            if not any(g):
                raise NvolInputError("Нулевая образующая задаёт единичный идеал")
        if len(set(gens)) != len(gens):
            raise NvolInputError("Образующие повторяются")
        array = np.array(gens, dtype=np.int64)
        divides = np.all(array[:, None, :] <= array[None, :, :], axis=2)
        np.fill_diagonal(divides, False)
        if divides.any():
            i, j = (int(x) for x in np.argwhere(divides)[0])
            raise NvolInputError(f"Система образующих не минимальна: {gens[i]} делит {gens[j]}")

    @classmethod
    def from_generators(cls, semigroup: Semigroup, generators: Iterable[Sequence[int]]) -> "MonomialIdeal":
        return cls(semigroup, minimalize(generators))

    @classmethod
    def from_staircase(cls, semigroup: Semigroup, staircase: Set[Exponent]) -> "MonomialIdeal":
        """Идеал с множеством стандартных мономов staircase (порядковый идеал S, содержащий 0)"""
        zero = (0,) * semigroup.dim
        if zero not in staircase:
            raise NvolInputError("Лестница должна содержать 0, иначе идеал единичный")
        basis = semigroup.hilbert_basis
        generators = set()
        for d in staircase:
            for h in basis:
                u = tuple(a + b for a, b in zip(d, h))
                if u in staircase or u in generators:
                    continue
                lower = (tuple(a - b for a, b in zip(u, h2)) for h2 in basis if all(x <= y for x, y in zip(h2, u)))
                if all(v in staircase for v in lower):
                    generators.add(u)
        return cls(semigroup, tuple(generators))

    @property
    def dim(self) -> int:
        return self.semigroup.dim

    def contains(self, u: Sequence[int]) -> bool:
        return self.semigroup.contains(u) and any(all(a <= b for a, b in zip(g, u)) for g in self.generators)

    def is_primary(self) -> bool:
        return all(self._axis_power(i) is not None for i in range(self.dim))

    def _axis_power(self, i: int) -> Optional[int]:
        powers = [g[i] for g in self.generators if all(x == 0 for j, x in enumerate(g) if j != i)]
        return min(powers) if powers else None

    def axis_powers(self) -> Tuple[int, ...]:
        """Показатели чистых степеней c_i: стандартные мономы лежат в ∏[0, c_i)"""
        powers = tuple(self._axis_power(i) for i in range(self.dim))
        if any(p is None for p in powers):
            raise InfiniteColengthError(f"Идеал {self} не является m-примарным")
        return powers

    def generator_array(self) -> np.ndarray:
        return np.array(self.generators, dtype=np.int64)

    def __str__(self):
        return "(" + ", ".join(format_monomial(g) for g in self.generators) + ")"


def standard_monomials(ideal: MonomialIdeal) -> np.ndarray:
    """Показатели мономов из S, не лежащих в идеале"""
    points = ideal.semigroup.points_in_box(ideal.axis_powers())
    outside = np.ones(len(points), dtype=bool)
    for g in ideal.generators:
        outside &= ~np.all(points >= np.array(g, dtype=np.int64), axis=1)
    return points[outside]


def colength(ideal: MonomialIdeal) -> int:
    """ℓ(R/𝔞): число стандартных мономов"""
    return int(len(standard_monomials(ideal)))


def ideal_power(ideal: MonomialIdeal, m: int) -> MonomialIdeal:
    """𝔞^m: минимализованная m-кратная сумма образующих"""
    if m < 1:
        raise NvolInputError("Степень идеала должна быть положительной")
    current = ideal.generators
    for _ in range(m - 1):
        current = minimalize(tuple(a + b for a, b in zip(p, q)) for p in current for q in ideal.generators)
    return MonomialIdeal(ideal.semigroup, current)


@dataclass(frozen=True)
class HSRecord:
    """Таблица функции Гильберта–Самюэля HS(m) = ℓ(R/𝔞^m)"""
    ideal: MonomialIdeal
    table: Tuple[Tuple[int, int], ...]

    def normalized_terms(self) -> List[Fraction]:
        """n!·HS(m)/m^n: сходится к e(𝔞)"""
        n = self.ideal.dim
        return [Fraction(math.factorial(n) * length, m ** n) for m, length in self.table]

    @property
    def strictly_increasing(self) -> bool:
        lengths = [length for _, length in self.table]
        return all(a < b for a, b in zip(lengths, lengths[1:]))


def hilbert_samuel(ideal: MonomialIdeal, max_power: int) -> HSRecord:
    if max_power < 1:
        raise NvolInputError("Максимальная степень должна быть положительной")
    table = []
    power = ideal
    for m in range(1, max_power + 1):
        if m > 1:
            power = MonomialIdeal(
                ideal.semigroup,
                minimalize(tuple(a + b for a, b in zip(p, q)) for p in power.generators for q in ideal.generators),
            )
        table.append((m, colength(power)))
    logger.debug("HS для %s до m = %d: %s", ideal, max_power, table)
    return HSRecord(ideal, tuple(table))


def hilbert_samuel_strata(ideals: Sequence[MonomialIdeal], max_power: int) -> List[Tuple[Tuple[Tuple[int, int], ...], List[MonomialIdeal]]]:
    """Группирует идеалы семейства по совпадающим таблицам HS (в порядке первого появления)"""
    groups: Dict[Tuple[Tuple[int, int], ...], List[MonomialIdeal]] = {}
    for ideal in ideals:
        groups.setdefault(hilbert_samuel(ideal, max_power).table, []).append(ideal)
    return list(groups.items())


# ==============================
# МНОГОГРАННИК НЬЮТОНА
# ==============================

def _primitive(vector: Sequence[Fraction]) -> Tuple[int, ...]:
    scale = math.lcm(*(Fraction(x).denominator for x in vector))
    ints = [int(x * scale) for x in vector]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


def _cross(o: Exponent, a: Exponent, b: Exponent) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _planar_lower_hull(generators: Sequence[Exponent]) -> List[Exponent]:
    """Вершины ограниченной части границы многоугольника Ньютона слева направо"""
    hull: List[Exponent] = []
    for p in sorted(generators):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _planar_facets(generators: Sequence[Exponent]) -> Set[Tuple[Tuple[int, ...], int]]:
    hull = _planar_lower_hull(generators)
    facets = {((1, 0), hull[0][0]), ((0, 1), hull[-1][1])}
    for p, q in zip(hull, hull[1:]):
        normal = _primitive((Fraction(p[1] - q[1]), Fraction(q[0] - p[0])))
        facets.add((normal, normal[0] * p[0] + normal[1] * p[1]))
    return facets


def _general_facets(generators: Sequence[Exponent], n: int) -> Set[Tuple[Tuple[int, ...], int]]:
    """
    Грани conv(G) + ортант: гиперплоскости через k образующих и n−k
    координатных направлений, опорные ко всем образующим
    """
    units = [tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n)]
    facets = set()
    for k in range(1, n + 1):
        for chosen in itertools.combinations(generators, k):
            base = chosen[0]
            diffs = [tuple(Fraction(a - b) for a, b in zip(g, base)) for g in chosen[1:]]
            for directions in itertools.combinations(range(n), n - k):
                normal = nullspace_vector(diffs + [units[i] for i in directions], n)
                if normal is None:
                    continue
                if all(x <= 0 for x in normal):
                    normal = tuple(-x for x in normal)
                if any(x < 0 for x in normal):
                    continue
                normal = _primitive(normal)
                offset = sum(a * b for a, b in zip(normal, base))
                if all(sum(a * b for a, b in zip(normal, g)) >= offset for g in generators):
                    facets.add((normal, offset))
    return facets


@lru_cache(maxsize=4096)
def newton_polyhedron(ideal: MonomialIdeal) -> Polyhedron:
    """Грани conv(показатели 𝔞) + R^n_{≥0}, включая координатные u_i ≥ 0"""
    n = ideal.dim
    gens = ideal.generators
    if n == 1:
        facets = {((1,), min(g[0] for g in gens))}
    elif n == 2:
        facets = _planar_facets(gens)
    else:
        facets = _general_facets(gens, n)
    facets |= {(tuple(int(i == j) for j in range(n)), 0) for i in range(n)}
    halfspaces = tuple(Halfspace(normal, offset) for normal, offset in sorted(facets))
    return Polyhedron(n, halfspaces, bounded=False)


def _newton_mask(points: np.ndarray, polyhedron: Polyhedron) -> np.ndarray:
    """Точки, лежащие в многограннике Ньютона (нормали граней целые)"""
    normals = np.array([[int(c) for c in h.normal] for h in polyhedron.halfspaces], dtype=np.int64)
    offsets = np.array([int(h.offset) for h in polyhedron.halfspaces], dtype=np.int64)
    return np.all(points @ normals.T >= offsets, axis=1)


def covolume(ideal: MonomialIdeal) -> Fraction:
    """
    Объём области ортанта вне многогранника Ньютона

    На плоскости считается площадь многоугольника под нижней оболочкой, в старших
    размерностях используется polytope_volume.
    """
    powers = ideal.axis_powers()
    if ideal.dim == 1:
        return Fraction(powers[0])
    if ideal.dim == 2:
        hull = _planar_lower_hull(ideal.generators)
        polygon = [(0, 0)] + hull[::-1]
        twice_area = sum(
            a[0] * b[1] - b[0] * a[1] for a, b in zip(polygon, polygon[1:] + polygon[:1])
        )
        return Fraction(abs(twice_area), 2)
    return covolume_by_slicing(ideal)


def covolume_by_slicing(ideal: MonomialIdeal) -> Fraction:
    """∏c_i − vol(P(𝔞) ∩ ∏[0, c_i]): дополнение содержится в ящике чистых степеней"""
    powers = ideal.axis_powers()
    box = Polyhedron.box([0] * ideal.dim, powers)
    clipped = newton_polyhedron(ideal).intersect(box.halfspaces, bounded=True)
    return Fraction(math.prod(powers)) - polytope_volume(clipped)


def multiplicity(ideal: MonomialIdeal) -> Fraction:
    """e(𝔞) = n!·covol(𝔞)/[Z^n : L]"""
    return math.factorial(ideal.dim) * covolume(ideal) / ideal.semigroup.lattice_index


def minimal_elements(semigroup: Semigroup, points: np.ndarray, member: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Минимальные элементы верхнего множества S, заданного предикатом member:
    u минимален, если u − h не принадлежит множеству ни для какого h из базиса Гильберта
    """
    inside = member(points)
    minimal = inside.copy()
    for h in semigroup.hilbert_basis:
        shifted = points - np.array(h, dtype=np.int64)
        valid = np.all(shifted >= 0, axis=1)
        below = np.zeros(len(points), dtype=bool)
        below[valid] = member(shifted[valid])
        minimal &= ~below
    return points[minimal]


def integral_closure(ideal: MonomialIdeal) -> MonomialIdeal:
    """Минимальные элементы S ∩ P(𝔞)"""
    semigroup = ideal.semigroup
    polyhedron = newton_polyhedron(ideal)
    edges = [max(g[i] for g in ideal.generators) + semigroup.modulus for i in range(ideal.dim)]
    points = semigroup.points_in_box(edges)
    minimal = minimal_elements(semigroup, points, lambda pts: _newton_mask(pts, polyhedron))
    return MonomialIdeal(semigroup, tuple(tuple(int(x) for x in p) for p in minimal))


# ==============================
# ПОРЯДКИ ord И ôrd
# ==============================

def _check_exponent(u: Sequence[int], semigroup: Semigroup) -> Exponent:
    u = tuple(int(x) for x in u)
    if not semigroup.contains(u):
        raise NvolInputError(f"Показатель {u} не лежит в полугруппе {semigroup.describe()}")
    if not any(u):
        raise NvolInputError("Порядок нулевого монома не определён")
    return u


def order_of(u: Sequence[int], semigroup: Semigroup, memo: Optional[Dict[Exponent, int]] = None) -> int:
    """
    ord(u) = max{j : u ∈ 𝔪^j}: наибольшая длина разложения u в сумму
    элементов базиса Гильберта (динамическое программирование)
    """
    u = _check_exponent(u, semigroup)
    memo = {} if memo is None else memo
    basis = semigroup.hilbert_basis

    def longest(v: Exponent) -> int:
        if not any(v):
            return 0
        if v not in memo:
            memo[v] = 1 + max(
                longest(tuple(a - b for a, b in zip(v, h)))
                for h in basis
                if all(b <= a for a, b in zip(v, h))
            )
        return memo[v]

    return longest(u)


def order_hat(u: Sequence[int], semigroup: Semigroup) -> Fraction:
    """ôrd(u) = max{λ : u ∈ λ·P(𝔪)}"""
    u = _check_exponent(u, semigroup)
    return max_dilation(u, newton_polyhedron(semigroup.maximal_ideal()))


def order_of_ideal(ideal: MonomialIdeal) -> int:
    """ord_𝔪(𝔞) = min ord по образующим"""
    memo: Dict[Exponent, int] = {}
    return min(order_of(g, ideal.semigroup, memo) for g in ideal.generators)


# ==============================
# НЕРАВЕНСТВО ЛЕХА
# ==============================

@dataclass(frozen=True)
class LechReport:
    ideal: MonomialIdeal
    colength: int
    multiplicity: Fraction
    maximal_multiplicity: Fraction
    ratio: Fraction

    @property
    def holds(self) -> bool:
        return self.ratio >= 1


def lech_check(ideal: MonomialIdeal) -> LechReport:
    """Отношение n!·ℓ(R/𝔞)·e(𝔪)/e(𝔞); неравенство Леха требует ≥ 1"""
    length = colength(ideal)
    e = multiplicity(ideal)
    e_max = multiplicity(ideal.semigroup.maximal_ideal())
    ratio = math.factorial(ideal.dim) * length * e_max / e
    return LechReport(ideal, length, e, e_max, ratio)


# ==============================
# ПЕРЕБОР ЛЕСТНИЦ
# ==============================

PruneCallback = Callable[[Set[Exponent], List[Exponent], int], bool]


def iter_staircases(
    semigroup: Semigroup,
    window: Iterable[Sequence[int]],
    required: Iterable[Sequence[int]] = (),
    prune: Optional[PruneCallback] = None,
) -> Iterator[frozenset]:
    """
    Порядковые идеалы D полугруппы с required ⊆ D ⊆ window

    window должно быть порядковым идеалом. Элементы решаются по одному в
    порядке (степень, лексикографический): включить можно, только если
    включены все нижние соседи u − h; исключённый элемент отсекает всё
    выше себя. Каждая лестница выдаётся ровно один раз.
    prune(включённые, исключённые, число нерешённых) → True обрезает ветвь.
    """
    order = sorted({tuple(int(x) for x in u) for u in window}, key=lambda u: (sum(u), u))
    required_set = {tuple(int(x) for x in u) for u in required}
    basis = semigroup.hilbert_basis
    covers = {
        u: [tuple(a - b for a, b in zip(u, h)) for h in basis if all(b <= a for a, b in zip(u, h))]
        for u in order
    }
    included: Set[Exponent] = set()
    excluded: List[Exponent] = []

    def walk(index: int) -> Iterator[frozenset]:
        if prune is not None and prune(included, excluded, len(order) - index):
            return
        if index == len(order):
            yield frozenset(included)
            return
        u = order[index]
        if all(v in included for v in covers[u]):
            included.add(u)
            yield from walk(index + 1)
            included.discard(u)
        if u not in required_set:
            excluded.append(u)
            yield from walk(index + 1)
            excluded.pop()

    yield from walk(0)


def window_of(ideal: MonomialIdeal) -> List[Exponent]:
    return [tuple(int(x) for x in p) for p in standard_monomials(ideal)]
