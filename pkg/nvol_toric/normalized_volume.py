"""
Нормированный объём и связанные величины

- lct мономиальных идеалов через растяжение многогранника Ньютона
- v̂ol двумя путями: по весам мономиальных нормирований и поиском по идеалам
- нормированная коразмерность ℓ̂_{c,k} методом ветвей и границ
- проверка конуса над P^{n−1} и обход семейств моделей
"""
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from config import DEFAULT_DELTA, REFINEMENT_FACTORS
from convex_core import ONE, ZERO, Halfspace, Polyhedron, max_dilation, polytope_volume, to_rat
from errors import InfeasibleWindowError, NvolInputError, PropertyViolationError
from monomial_algebra import (
    Exponent,
    MonomialIdeal,
    colength,
    ideal_power,
    iter_staircases,
    multiplicity,
    newton_polyhedron,
    window_of,
)
from singularity import (
    MonomialValuation,
    SingularityModel,
    extremal_valuation,
    normalized_volume_of_valuation,
)

logger = logging.getLogger(__name__)

MONOMIAL_SUFFICIENCY_NOTE = (
    "values are infima over monomial ideals and monomial valuations; "
    "equality with the true normalized volume relies on monomial sufficiency for toric models"
)


# ==============================
# ПОРОГ ЛОГ-КАНОНИЧНОСТИ
# ==============================

def lct(ideal: MonomialIdeal, model: SingularityModel) -> Fraction:
    """
    lct(X, D; 𝔞) = max{t : (1 − a_1, …, 1 − a_n) ∈ t·P(𝔞)}

    На факторах вектор лог-дискрепансов равен (1, …, 1).
    """
    if ideal.semigroup != model.semigroup:
        raise NvolInputError(f"Идеал {ideal} задан не в кольце модели {model.describe()}")
    return max_dilation(model.log_discrepancy_vector(), newton_polyhedron(ideal))


def lct_volume(ideal: MonomialIdeal, model: SingularityModel) -> Fraction:
    """lct(𝔞)^n · e(𝔞)"""
    return lct(ideal, model) ** model.dim * multiplicity(ideal)


# ==============================
# v̂ol ПО ВЕСАМ
# ==============================

@dataclass(frozen=True)
class NvolResult:
    value: Fraction
    argmin: MonomialValuation
    grid_points: int


def nvol_weights(model: SingularityModel) -> NvolResult:
    """
    v̂ol = n^n·∏(1 − a_i)/d с минимизатором w_i = 1/(1 − a_i)

    Закрытая формула сверяется с A^n·vol на сетке w*·s, s_i ∈ REFINEMENT_FACTORS.

    Raises:
        PropertyViolationError: формула не является минимумом на сетке
    """
    n = model.dim
    closed = Fraction(n ** n) * math.prod(model.log_discrepancy_vector(), start=ONE) / model.lattice_index
    best = extremal_valuation(model)
    attained = normalized_volume_of_valuation(best, model)
    if attained != closed:
        raise PropertyViolationError(
            f"Минимизатор {best} даёт {attained}, а не {closed}",
            {"model": model.describe(), "weights": best.weights, "expected": closed, "observed": attained},
        )
    grid = 0
    for factors in itertools.product(REFINEMENT_FACTORS, repeat=n):
        v = MonomialValuation(tuple(w * s for w, s in zip(best.weights, factors)))
        value = normalized_volume_of_valuation(v, model)
        grid += 1
        if value < closed:
            raise PropertyViolationError(
                f"На сетке найдено нормирование {v} с A^n·vol = {value} < {closed}",
                {"model": model.describe(), "weights": v.weights, "expected": closed, "observed": value},
            )
    logger.info("v̂ol(%s) = %s, проверено %d точек сетки", model.describe(), closed, grid)
    return NvolResult(closed, best, grid)


# ==============================
# v̂ol ПОИСКОМ ПО ИДЕАЛАМ
# ==============================

@dataclass(frozen=True)
class IdealBoundResult:
    value: Fraction
    witness: MonomialIdeal
    candidates: int
    exhaustive: bool
    gap: Fraction


def _box_window(model: SingularityModel, box: int) -> List[Exponent]:
    if box < 1:
        raise NvolInputError("Размер ящика должен быть положительным")
    return [tuple(int(x) for x in p) for p in model.semigroup.points_in_box([box] * model.dim)]


def iter_box_ideals(model: SingularityModel, box: int) -> Iterator[MonomialIdeal]:
    """Все 𝔪-примарные мономиальные идеалы с лестницей в [0, box)^n"""
    zero = (0,) * model.dim
    for staircase in iter_staircases(model.semigroup, _box_window(model, box), required=[zero]):
        yield MonomialIdeal.from_staircase(model.semigroup, staircase)


def nvol_ideal_bound(model: SingularityModel, box: int, node_budget: Optional[int] = None) -> IdealBoundResult:
    """
    min lct(𝔞)^n·e(𝔞) по идеалам с лестницей в ящике

    Ничья разрешается лексикографически наименьшим списком образующих.

    Raises:
        PropertyViolationError: найден идеал со значением ниже v̂ol по весам
    """
    floor = nvol_weights(model).value
    best: Optional[Tuple[Fraction, Tuple[Exponent, ...], MonomialIdeal]] = None
    count = 0
    exhaustive = True
    for ideal in iter_box_ideals(model, box):
        if node_budget is not None and count >= node_budget:
            exhaustive = False
            break
        count += 1
        value = lct_volume(ideal, model)
        if value < floor:
            raise PropertyViolationError(
                f"lct^n·e({ideal}) = {value} меньше v̂ol = {floor}",
                {"model": model.describe(), "ideal": ideal.generators, "expected": floor, "observed": value},
            )
        if best is None or (value, ideal.generators) < best[:2]:
            best = (value, ideal.generators, ideal)
    if best is None:
        raise NvolInputError("Бюджет не позволил рассмотреть ни одного идеала")
    logger.info("Поиск по идеалам: %d кандидатов, минимум %s на %s", count, best[0], best[2])
    return IdealBoundResult(best[0], best[2], count, exhaustive, best[0] - floor)


# ==============================
# НОРМИРОВАННАЯ КОРАЗМЕРНОСТЬ
# ==============================

@dataclass(frozen=True)
class ApproxParams:
    """Окно 𝔪^k ⊆ 𝔞 ⊆ 𝔪 с ℓ(R/𝔞) ≥ c·k^n; delta задаёт окно Леха 𝔞 ⊆ 𝔪^{⌈δk⌉}"""
    c: Fraction
    k: int
    delta: Fraction = DEFAULT_DELTA

    def __post_init__(self):
        object.__setattr__(self, "c", to_rat(self.c))
        object.__setattr__(self, "delta", to_rat(self.delta))
        if not ZERO < self.c < ONE:
            raise NvolInputError(f"c должно лежать в (0, 1), получено {self.c}")
        if not ZERO < self.delta < ONE:
            raise NvolInputError(f"δ должно лежать в (0, 1), получено {self.delta}")
        if self.k < 1:
            raise NvolInputError("k должно быть положительным")

    @property
    def lech_power(self) -> int:
        return math.ceil(self.delta * self.k)


@dataclass(frozen=True)
class NColengthResult:
    value: Fraction
    argmin: MonomialIdeal
    nodes_explored: int
    exhaustive: bool
    colength: int


class _ColengthSearch:
    """Ветви и границы по лестницам внутри лестницы 𝔪^k"""

    def __init__(self, model: SingularityModel, params: ApproxParams, node_budget: Optional[int]):
        self.model = model
        self.n = model.dim
        self.scale = math.factorial(self.n)
        self.min_length = params.c * params.k ** self.n
        self.power = ideal_power(model.maximal_ideal(), params.k)
        self.node_budget = node_budget
        self.nodes = 0
        self.budget_hit = False
        self.lct_cache: Dict[Tuple[Exponent, ...], Fraction] = {}
        length = colength(self.power)
        self.best = (self.scale * lct(self.power, model) ** self.n * length, self.power.generators, self.power, length)

    def _lct_lower_bound(self, excluded: List[Exponent]) -> Fraction:
        key = tuple(sorted(excluded))
        if key not in self.lct_cache:
            ideal = MonomialIdeal.from_generators(self.model.semigroup, list(self.power.generators) + list(key))
            self.lct_cache[key] = lct(ideal, self.model)
        return self.lct_cache[key]

    def prune(self, included, excluded, remaining) -> bool:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            self.budget_hit = True
            return True
        if len(included) + remaining < self.min_length:
            return True
        if not excluded:
            return False
        # Любое дополнение содержит 𝔪^k и все исключённые мономы
        bound = self.scale * self._lct_lower_bound(excluded) ** self.n * max(self.min_length, len(included))
        return bound > self.best[0]

    def consider(self, staircase: frozenset):
        length = len(staircase)
        if length < self.min_length:
            return
        ideal = MonomialIdeal.from_staircase(self.model.semigroup, set(staircase))
        value = self.scale * lct(ideal, self.model) ** self.n * length
        if (value, ideal.generators) < self.best[:2]:
            self.best = (value, ideal.generators, ideal, length)
            logger.debug("Новый рекорд ℓ̂: %s на %s", value, ideal)


def normalized_colength(
    model: SingularityModel,
    params: ApproxParams,
    node_budget: Optional[int] = None,
    lech_window: bool = False,
) -> NColengthResult:
    """
    ℓ̂_{c,k} = n!·min lct(𝔞)^n·ℓ(R/𝔞) по мономиальным 𝔪^k ⊆ 𝔞 ⊆ 𝔪 с ℓ(R/𝔞) ≥ c·k^n

    Raises:
        InfeasibleWindowError: даже ℓ(R/𝔪^k) < c·k^n
    """
    search = _ColengthSearch(model, params, node_budget)
    window = window_of(search.power)
    if len(window) < search.min_length:
        raise InfeasibleWindowError(
            f"ℓ(R/𝔪^{params.k}) = {len(window)} < c·k^n = {search.min_length}: окно пусто"
        )
    required = [(0,) * model.dim]
    if lech_window:
        required = window_of(ideal_power(model.maximal_ideal(), params.lech_power))
    for staircase in iter_staircases(model.semigroup, window, required, search.prune):
        search.consider(staircase)
    value, _, argmin, length = search.best
    logger.info(
        "ℓ̂_{%s,%d}(%s) = %s, узлов %d%s",
        params.c, params.k, model.describe(), value, search.nodes, ", бюджет исчерпан" if search.budget_hit else "",
    )
    return NColengthResult(value, argmin, search.nodes, not search.budget_hit, length)


def replay_constraints(argmin: MonomialIdeal, value: Fraction, model: SingularityModel, params: ApproxParams,
                       lech_window: bool = False) -> List[str]:
    """Список нарушенных ограничений окна для найденного минимизатора (пустой, если всё верно)"""
    failures = []
    power = ideal_power(model.maximal_ideal(), params.k)
    if not all(argmin.contains(g) for g in power.generators):
        failures.append("m^k ⊆ a")
    if not all(argmin.semigroup.contains(g) and any(g) for g in argmin.generators):
        failures.append("a ⊆ m")
    if colength(argmin) < params.c * params.k ** model.dim:
        failures.append("ℓ(R/a) ≥ c·k^n")
    if lech_window:
        lower = ideal_power(model.maximal_ideal(), params.lech_power)
        if not all(lower.contains(g) for g in argmin.generators):
            failures.append("a ⊆ m^⌈δk⌉")
    expected = math.factorial(model.dim) * lct(argmin, model) ** model.dim * colength(argmin)
    if expected != value:
        failures.append("value = n!·lct^n·ℓ")
    return failures


@dataclass(frozen=True)
class SweepRow:
    k: int
    value: Fraction
    lower: Fraction
    upper: Fraction
    argmin: MonomialIdeal
    exhaustive: bool

    @property
    def sandwiched(self) -> bool:
        return self.lower <= self.value <= self.upper


def _sweep_row(task) -> SweepRow:
    model, c, k, lower, node_budget = task
    params = ApproxParams(c, k)
    result = normalized_colength(model, params, node_budget)
    power = ideal_power(model.maximal_ideal(), k)
    upper = math.factorial(model.dim) * lct(power, model) ** model.dim * colength(power)
    return SweepRow(k, result.value, lower, upper, result.argmin, result.exhaustive)


def ncolength_sweep(
    model: SingularityModel,
    c,
    k_values: Sequence[int],
    workers: int = 1,
    node_budget: Optional[int] = None,
) -> List[SweepRow]:
    """
    Ряд (k, ℓ̂_{c,k}, нижняя граница, верхняя граница по 𝔪^k)

    Нижняя граница v̂ol/e(𝔪): на гладком объемлющем пространстве e(𝔪) = 1.
    Строки идут в порядке k_values при любом числе процессов.
    """
    lower = nvol_weights(model).value / multiplicity(model.maximal_ideal())
    tasks = [(model, to_rat(c), k, lower, node_budget) for k in k_values]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, tasks))
    return [_sweep_row(task) for task in tasks]


# ==============================
# КОНУС НАД P^{n−1}
# ==============================

@dataclass(frozen=True)
class ConeCheck:
    n: int
    d: int
    vertex_nvol: Fraction
    rhs: Fraction
    equal: bool
    fano_product: Fraction
    fano_bound: int


def _projective_rays(m: int) -> List[Tuple[int, ...]]:
    """Лучи веера P^m: e_1, …, e_m и −(e_1 + … + e_m)"""
    rays = [tuple(1 if j == i else 0 for j in range(m)) for i in range(m)]
    return rays + [tuple(-1 for _ in range(m))]


def anticanonical_degree(m: int) -> Fraction:
    """(−K_{P^m})^m = m!·vol{u : ⟨ρ, u⟩ ≥ −1 для всех лучей ρ}"""
    polytope = Polyhedron(m, tuple(Halfspace(ray, -1) for ray in _projective_rays(m)), bounded=True)
    return math.factorial(m) * polytope_volume(polytope)


def cone_check(n: int, d: int) -> ConeCheck:
    """
    Вершина конуса C(P^{n−1}, O(d)) = A^n/μ_d(1,…,1)

    rhs = r^{-1}·(−K)^{n−1} с рациональным r = d/n из L = −r·K.
    P^{n−1} K-полустабильно, поэтому обе части равны n^n/d.
    Произведение q·(−K)^{n−1} с индексом q = числу лучей веера сверяется с n^n.
    """
    if n < 2 or not 1 <= d <= n - 1:
        raise NvolInputError(f"Параметры (n={n}, d={d}) не задают klt-конус: нужно n ≥ 2, 1 ≤ d ≤ n−1")
    model = SingularityModel.affine(n) if d == 1 else SingularityModel.cyclic_quotient((1,) * n, d)
    vertex = nvol_weights(model).value
    degree = anticanonical_degree(n - 1)
    rhs = degree / Fraction(d, n)
    if vertex > rhs:
        raise PropertyViolationError(
            f"v̂ol вершины {vertex} больше r^(-1)(-K)^(n-1) = {rhs}",
            {"n": n, "d": d, "expected": rhs, "observed": vertex},
        )
    fano_product = len(_projective_rays(n - 1)) * degree
    if fano_product > n ** n:
        raise PropertyViolationError(
            f"q·(-K)^(n-1) = {fano_product} больше n^n = {n ** n}",
            {"n": n, "expected": n ** n, "observed": fano_product},
        )
    return ConeCheck(n, d, vertex, rhs, vertex == rhs, fano_product, n ** n)


# ==============================
# СЕМЕЙСТВА
# ==============================

@dataclass(frozen=True)
class FamilyMember:
    label: str
    model: SingularityModel


@dataclass(frozen=True)
class SingularityFamily:
    name: str
    members: Tuple[FamilyMember, ...]
    special: str

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise NvolInputError("Семейство должно содержать хотя бы одну модель")
        labels = [m.label for m in self.members]
        if len(set(labels)) != len(labels):
            raise NvolInputError("Метки членов семейства должны быть уникальными")
        if self.special not in labels:
            raise NvolInputError(f"Специальный член {self.special!r} отсутствует в семействе")


@dataclass(frozen=True)
class FamilyRow:
    label: str
    nvol: Fraction
    special: bool
    attains_min: bool


@dataclass(frozen=True)
class SemicontinuityReport:
    family: str
    rows: Tuple[FamilyRow, ...] = field(default=())

    @property
    def special_is_min(self) -> bool:
        return all(row.attains_min for row in self.rows if row.special)


def _member_nvol(model: SingularityModel) -> Fraction:
    return nvol_weights(model).value


def semicontinuity_sweep(family: SingularityFamily, workers: int = 1) -> SemicontinuityReport:
    """v̂ol каждого члена и отметка, достигает ли специальный член минимума"""
    models = [member.model for member in family.members]
    if workers > 1 and len(models) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            nvols = list(pool.map(_member_nvol, models))
    else:
        nvols = [_member_nvol(model) for model in models]
    values = list(zip(family.members, nvols))
    lowest = min(value for _, value in values)
    rows = tuple(
        FamilyRow(member.label, value, member.label == family.special, value == lowest)
        for member, value in values
    )
    report = SemicontinuityReport(family.name, rows)
    logger.info("Семейство %s: специальный член минимален: %s", family.name, report.special_is_min)
    return report
