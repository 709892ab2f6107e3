"""
Модели торических klt-особенностей и мономиальные нормирования

Модель: аффинное пространство с мономиальной границей Σ a_i·H_i или
фактор A^n/μ_d без отражений. Нормирование задаётся положительными
весами w: v(x^u) = ⟨w, u⟩.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from convex_core import ONE, ZERO, Vector, dot, format_rat, to_rat, to_vector
from errors import NvolInputError
from monomial_algebra import (
    MonomialIdeal,
    Semigroup,
    colength,
    minimal_elements,
    multiplicity,
)

logger = logging.getLogger(__name__)

# Точность рациональной нижней оценки корня vol(v)^{1/n}
ROOT_PRECISION = 10 ** 6


# ==============================
# МОДЕЛЬ ОСОБЕННОСТИ
# ==============================

@dataclass(frozen=True)
class SingularityModel:
    """
    Точка x ∈ (X, D)

    Граница допускается только на гладком объемлющем пространстве;
    группа μ_d должна действовать точно и без псевдоотражений, тогда
    факторотображение квазиэтально.
    """
    semigroup: Semigroup
    boundary: Vector = field(default=())

    def __post_init__(self):
        n = self.semigroup.dim
        boundary = to_vector(self.boundary) if self.boundary else (ZERO,) * n
        object.__setattr__(self, "boundary", boundary)
        if len(boundary) != n:
            raise NvolInputError(f"Ожидалось {n} коэффициентов границы, получено {len(boundary)}")
        for a in boundary:
            if not ZERO <= a < ONE:
                raise NvolInputError(f"Коэффициент границы {a} вне [0, 1): пара не klt")
        congruence = self.semigroup.congruence
        if congruence is None:
            return
        if any(boundary):
            raise NvolInputError("Граница поддерживается только на гладком объемлющем пространстве")
        d = congruence.modulus
        if math.gcd(*congruence.weights, d) != 1:
            raise NvolInputError(f"Действие {congruence.describe()} не точное")
        for i in range(n):
            others = [b for j, b in enumerate(congruence.weights) if j != i]
            if math.gcd(*others, d) != 1:
                raise NvolInputError(
                    f"Действие {congruence.describe()} содержит псевдоотражение вдоль оси {i + 1}"
                )

    @classmethod
    def affine(cls, n: int, boundary: Optional[Sequence] = None) -> "SingularityModel":
        return cls(Semigroup.affine(n), tuple(boundary or ()))

    @classmethod
    def cyclic_quotient(cls, weights: Sequence[int], modulus: int) -> "SingularityModel":
        return cls(Semigroup.cyclic_quotient(weights, modulus))

    @property
    def dim(self) -> int:
        return self.semigroup.dim

    @property
    def lattice_index(self) -> int:
        return self.semigroup.lattice_index

    @property
    def is_smooth_ambient(self) -> bool:
        return self.semigroup.congruence is None

    @property
    def has_boundary(self) -> bool:
        return any(self.boundary)

    def log_discrepancy_vector(self) -> Vector:
        """(1 − a_1, …, 1 − a_n): A(v_w) = ⟨этот вектор, w⟩"""
        return tuple(ONE - a for a in self.boundary)

    def maximal_ideal(self) -> MonomialIdeal:
        return self.semigroup.maximal_ideal()

    def describe(self) -> str:
        terms = [f"{format_rat(a)}·H{i + 1}" for i, a in enumerate(self.boundary) if a]
        base = self.semigroup.describe()
        return f"({base}, {' + '.join(terms)})" if terms else base


# ==============================
# МОНОМИАЛЬНЫЕ НОРМИРОВАНИЯ
# ==============================

@dataclass(frozen=True)
class MonomialValuation:
    """v_w(x^u) = ⟨w, u⟩ с положительными рациональными весами"""
    weights: Vector

    def __post_init__(self):
        weights = to_vector(self.weights)
        object.__setattr__(self, "weights", weights)
        if not weights:
            raise NvolInputError("Нормирование должно иметь хотя бы один вес")
        if any(w <= 0 for w in weights):
            raise NvolInputError(f"Веса нормирования должны быть положительными: {weights}")

    @property
    def dim(self) -> int:
        return len(self.weights)

    def value(self, u: Sequence) -> Fraction:
        return dot(self.weights, u)

    def scaled(self, t) -> "MonomialValuation":
        t = to_rat(t)
        return MonomialValuation(tuple(t * w for w in self.weights))

    def normalized(self, semigroup: Semigroup) -> "MonomialValuation":
        """Растяжение с v(𝔪) = 1"""
        return self.scaled(ONE / min(self.value(h) for h in semigroup.hilbert_basis))

    def __str__(self):
        return "v(" + ", ".join(format_rat(w) for w in self.weights) + ")"


def _check_dims(v: MonomialValuation, model: SingularityModel):
    if v.dim != model.dim:
        raise NvolInputError(f"Нормирование размерности {v.dim} на модели размерности {model.dim}")


def log_discrepancy(v: MonomialValuation, model: SingularityModel) -> Fraction:
    """
    A(v_w) = Σ (1 − a_i)·w_i

    На факторах берётся A поднятого нормирования на A^n: квазиэтальное
    отображение сохраняет лог-дискрепанс.
    """
    _check_dims(v, model)
    return dot(model.log_discrepancy_vector(), v.weights)


def _integer_weights(v: MonomialValuation, level: Fraction) -> Tuple[np.ndarray, int]:
    scale = math.lcm(level.denominator, *(w.denominator for w in v.weights))
    return np.array([int(w * scale) for w in v.weights], dtype=np.int64), int(level * scale)


def valuation_ideal(v: MonomialValuation, m, model: SingularityModel) -> MonomialIdeal:
    """
    𝔞_m(v) = {u ∈ S : ⟨w,u⟩ ≥ m}

    Минимальный элемент с u_i ≥ ⌈m/w_i⌉ + d уменьшается на d·e_i, поэтому
    поиск ведётся в ящике ∏[0, ⌈m/w_i⌉ + d).
    """
    _check_dims(v, model)
    m = to_rat(m)
    if m <= 0:
        raise NvolInputError("Уровень идеала нормирования должен быть положительным")
    semigroup = model.semigroup
    weights, level = _integer_weights(v, m)
    edges = [math.ceil(m / w) + semigroup.modulus for w in v.weights]
    points = semigroup.points_in_box(edges)
    minimal = minimal_elements(semigroup, points, lambda pts: pts @ weights >= level)
    return MonomialIdeal(semigroup, tuple(tuple(int(x) for x in p) for p in minimal))


def valuation_volume(v: MonomialValuation, model: SingularityModel) -> Fraction:
    """vol(v_w) = 1/(d·∏w_i)"""
    _check_dims(v, model)
    return ONE / (model.lattice_index * math.prod(v.weights))


def volume_by_colength(v: MonomialValuation, m: int, model: SingularityModel) -> Fraction:
    """n!·ℓ(R/𝔞_m(v))/m^n: приближение vol(v) по определению"""
    n = model.dim
    return Fraction(math.factorial(n) * colength(valuation_ideal(v, m, model)), m ** n)


def value_on_ideal(v: MonomialValuation, ideal: MonomialIdeal) -> Fraction:
    """v(𝔞) = min по образующим ⟨w, u⟩"""
    if not ideal.generators:
        raise NvolInputError("Нормирование нулевого идеала не определено")
    if v.dim != ideal.dim:
        raise NvolInputError(f"Нормирование размерности {v.dim} на идеале размерности {ideal.dim}")
    return min(v.value(g) for g in ideal.generators)


def normalized_volume_of_valuation(v: MonomialValuation, model: SingularityModel) -> Fraction:
    """A(v)^n · vol(v)"""
    return log_discrepancy(v, model) ** model.dim * valuation_volume(v, model)


def extremal_valuation(model: SingularityModel) -> MonomialValuation:
    """Минимизатор A^n·vol среди мономиальных нормирований: w_i = 1/(1 − a_i)"""
    return MonomialValuation(tuple(ONE / c for c in model.log_discrepancy_vector()))


def izumi_constant(model: SingularityModel) -> Fraction:
    """K₀ = 1/min(1 − a_i): ⟨w,u⟩ ≤ K₀·A(v_w)·ord(u)"""
    return ONE / min(model.log_discrepancy_vector())


def properness_constant(model: SingularityModel) -> Fraction:
    """K₁ = ∏(1 − a_i): A^n·vol ≥ K₁·A/v(𝔪)"""
    return math.prod(model.log_discrepancy_vector(), start=ONE)


# ==============================
# ОЦЕНКА ТИПА ЭЙН–ЛАЦАРСФЕЛЬД–СМИТ
# ==============================

def _integer_root(x: int, n: int) -> int:
    """⌊x^{1/n}⌋ для неотрицательного целого x: целочисленный Ньютон от оценки сверху"""
    if x < 0:
        raise NvolInputError("Корень из отрицательного числа")
    if n == 1 or x < 2:
        return x
    if n == 2:
        return math.isqrt(x)
    r = 1 << -(-x.bit_length() // n)
    while True:
        s = ((n - 1) * r + x // r ** (n - 1)) // n
        if s >= r:
            return r
        r = s


@dataclass(frozen=True)
class ElsReport:
    valuation: MonomialValuation
    m: int
    multiplicity: Fraction
    root_lower_bound: Fraction
    log_discrepancy_ceiling: int
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.multiplicity <= self.bound


def els_check(v: MonomialValuation, m: int, model: SingularityModel) -> ElsReport:
    """
    e(𝔞_m(v)) ≤ (m·r + ⌈A(v)⌉)^n при v(𝔪) = 1, где r ≤ vol(v)^{1/n} рационально

    Только гладкая точка без границы: общий случай требует идеала Якоби.
    """
    if not model.is_smooth_ambient or model.has_boundary:
        raise NvolInputError("Оценка реализована только для гладкой точки без границы")
    if m < 1:
        raise NvolInputError("Уровень m должен быть положительным")
    v = v.normalized(model.semigroup)
    n = model.dim
    volume = valuation_volume(v, model)
    root = Fraction(_integer_root(math.floor(volume * ROOT_PRECISION ** n), n), ROOT_PRECISION)
    ceiling = math.ceil(log_discrepancy(v, model))
    e = multiplicity(valuation_ideal(v, m, model))
    report = ElsReport(v, m, e, root, ceiling, (m * root + ceiling) ** n)
    logger.debug("ELS: %s, m = %d: e = %s, граница %s", v, m, e, report.bound)
    return report
