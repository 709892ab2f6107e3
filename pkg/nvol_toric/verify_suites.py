"""
Наборы проверок неравенств и инвариантов

Каждый набор возвращает SuiteReport: число проверок, число нарушений и
первый контрпример целиком (входные данные, ожидаемая граница, наблюдаемое
значение). Случайные наборы используют numpy.random.Generator(PCG64(seed)),
задачи генерируются в главном процессе, поэтому результат не зависит от
числа рабочих процессов.
"""
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import (
    DEFAULT_C,
    DEFAULT_K_VALUES,
    DEFAULT_TRIALS,
    PRNG_NAME,
    WEIGHT_GRID_DENOMINATOR,
    WEIGHT_GRID_MAX,
)
from convex_core import Halfspace, Polyhedron, dot, polytope_volume
from errors import NvolInputError, PropertyViolationError
from lattice_approx import MonotoneTable, count_lattice_points, k0_schedule, riemann_gap
from monomial_algebra import (
    MonomialIdeal,
    Semigroup,
    ideal_power,
    integral_closure,
    iter_staircases,
    lech_check,
    multiplicity,
    order_hat,
    order_of,
    order_of_ideal,
    window_of,
)
from normalized_volume import (
    ApproxParams,
    cone_check,
    lct,
    ncolength_sweep,
    normalized_colength,
    nvol_ideal_bound,
    nvol_weights,
    replay_constraints,
)
from singularity import (
    MonomialValuation,
    SingularityModel,
    els_check,
    izumi_constant,
    log_discrepancy,
    normalized_volume_of_valuation,
    properness_constant,
)

logger = logging.getLogger(__name__)

LATTICE_EPSILONS = (Fraction(1, 2), Fraction(1, 5))
ORDER_DEGREE_LIMIT = 12
CLOSURE_POWER_LIMIT = 5
IZUMI_DEGREE_LIMIT = 10
ELS_PLANE_LEVELS = 20
ELS_SPACE_LEVELS = 6
ELS_SPACE_GRID = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))
LECH_BOX = 8
LECH_WINDOW_MAX_K = 8


@dataclass
class SuiteReport:
    suite: str
    seed: int
    prng: str = PRNG_NAME
    checks: int = 0
    violations: int = 0
    counterexample: Optional[Dict[str, Any]] = None
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, ok: bool, **details):
        self.checks += 1
        if not ok:
            self.violations += 1
            if self.counterexample is None:
                self.counterexample = details
                logger.warning("%s: нарушение %s", self.suite, details)

    def merge(self, outcomes: Sequence[Tuple[int, List[Dict[str, Any]]]]):
        """Добавляет итоги задач, вычисленных в рабочих процессах"""
        for checks, failures in outcomes:
            self.checks += checks
            self.violations += len(failures)
            if failures and self.counterexample is None:
                self.counterexample = failures[0]


def _map(function: Callable, tasks: List, workers: int) -> List:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(function, tasks))
    return [function(task) for task in tasks]


def weight_grid(max_value: int = WEIGHT_GRID_MAX, max_denominator: int = WEIGHT_GRID_DENOMINATOR) -> List[Fraction]:
    """Значения p/q ≤ max_value с q ≤ max_denominator"""
    return sorted({Fraction(p, q) for q in range(1, max_denominator + 1) for p in range(1, max_value * q + 1)})


def bundled_semigroups() -> List[Semigroup]:
    return [
        Semigroup.affine(2),
        Semigroup.affine(3),
        Semigroup.cyclic_quotient((1, 1), 2),
        Semigroup.cyclic_quotient((1, 2), 3),
    ]


def boundary_models(n: int) -> List[SingularityModel]:
    """(A^n, a·H_1) для a ∈ {0, 1/2}"""
    return [SingularityModel.affine(n, [a] + [0] * (n - 1)) for a in (Fraction(0), Fraction(1, 2))]


def points_up_to(n: int, degree: int) -> np.ndarray:
    """Ненулевые u ∈ N^n с |u| ≤ degree"""
    grid = np.indices((degree + 1,) * n).reshape(n, -1).T
    sizes = grid.sum(axis=1)
    return grid[(sizes > 0) & (sizes <= degree)]


# ==============================
# ПОДСЧЁТ ТОЧЕК И СУММЫ РИМАНА
# ==============================

def _random_polytope(rng: np.random.Generator, n: int) -> Polyhedron:
    """Рациональный ящик в [0,1]^n, срезанный не более чем двумя полупространствами рядом с центром"""
    den = int(rng.integers(2, 13))
    lower, upper = [], []
    for _ in range(n):
        a = int(rng.integers(0, den))
        b = int(rng.integers(a + 1, den + 1))
        lower.append(Fraction(a, den))
        upper.append(Fraction(b, den))
    center = tuple((lo + hi) / 2 for lo, hi in zip(lower, upper))
    cuts = []
    for _ in range(int(rng.integers(0, 3))):
        normal = tuple(Fraction(int(x)) for x in rng.integers(-3, 4, size=n))
        if not any(normal):
            continue
        slack = Fraction(int(rng.integers(0, den + 1)), 2 * den)
        cuts.append(Halfspace(normal, dot(normal, center) - slack))
    return Polyhedron.box(lower, upper).intersect(cuts, bounded=True)


def thin_slabs() -> List[Polyhedron]:
    """Тонкие и вырожденные тела, на которых счёт точек особенно груб"""
    return [
        Polyhedron.box([Fraction(1, 3)], [Fraction(1, 3) + Fraction(1, 1000)]),
        Polyhedron.box([0, Fraction(1, 3)], [1, Fraction(1, 3) + Fraction(1, 997)]),
        Polyhedron.box([0, Fraction(1, 2)], [1, Fraction(1, 2)]),
        Polyhedron.box([0, 0, Fraction(1, 2)], [1, 1, Fraction(1, 2) + Fraction(1, 1009)]),
    ]


def _lattice_task(task) -> Tuple[int, List[Dict[str, Any]]]:
    body, eps = task
    k = k0_schedule(eps, body.dim)
    count = count_lattice_points(body, k)
    volume = polytope_volume(body)
    error = abs(Fraction(count, k ** body.dim) - volume)
    if error <= eps:
        return 1, []
    return 1, [{
        "halfspaces": [str(h) for h in body.halfspaces],
        "eps": eps, "k": k, "count": count, "volume": volume,
        "expected": f"|count/k^n - vol| <= {eps}", "observed": error,
    }]


def suite_lattice_a1(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    report = SuiteReport("lattice-a1", seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    tasks = []
    for _ in range(trials or DEFAULT_TRIALS["lattice-a1"]):
        n = int(rng.integers(1, 4))
        eps = LATTICE_EPSILONS[int(rng.integers(0, len(LATTICE_EPSILONS)))]
        tasks.append((_random_polytope(rng, n), eps))
    tasks.extend((slab, eps) for slab in thin_slabs() for eps in LATTICE_EPSILONS)
    report.merge(_map(_lattice_task, tasks, workers))
    report.summary = {"bodies": len(tasks), "thin_slabs": len(thin_slabs()) * len(LATTICE_EPSILONS)}
    return report


def _random_step_function(rng: np.random.Generator) -> MonotoneTable:
    den = int(rng.integers(1, 25))
    ends = sorted(int(x) for x in rng.choice(den + 1, size=2, replace=False))
    start, end = Fraction(ends[0], den), Fraction(ends[1], den)
    inner = range(ends[0] * 7 + 1, ends[1] * 7)
    count = min(int(rng.integers(0, 6)), len(inner))
    breakpoints = sorted(Fraction(int(x), 7 * den) for x in rng.choice(inner, size=count, replace=False)) if count else []
    values = sorted(Fraction(int(x), 12) for x in rng.integers(0, 13, size=len(breakpoints) + 1))
    if rng.integers(0, 2):
        values.reverse()
    return MonotoneTable.from_steps(start, breakpoints, values, end)


def suite_riemann_a2(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    report = SuiteReport("riemann-a2", seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(trials or DEFAULT_TRIALS["riemann-a2"]):
        table = _random_step_function(rng)
        k = int(rng.integers(1, 51))
        gap = riemann_gap(table, k)
        report.record(
            gap.holds,
            start=table.start, end=table.end,
            pieces=[(p.left, p.right, p.left_value) for p in table.pieces],
            k=k, expected=gap.bound, observed=gap.gap,
        )
    return report


# ==============================
# ЛЕХ И ПОРЯДКИ
# ==============================

def suite_lech_33(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    """
    Неравенство Леха на всех лестницах в [0,8]^2 и на окнах
    𝔪^k ⊆ 𝔞 ⊆ 𝔪^⌈k/2⌉, k ≤ 8, с минимумом 2!·ℓ/e
    """
    report = SuiteReport("lech-33", seed)
    plane = SingularityModel.affine(2)
    semigroup = plane.semigroup
    zero = (0, 0)
    box = [tuple(int(x) for x in p) for p in semigroup.points_in_box([LECH_BOX, LECH_BOX])]
    for staircase in iter_staircases(semigroup, box, required=[zero]):
        result = lech_check(MonomialIdeal.from_staircase(semigroup, set(staircase)))
        report.record(result.holds, ideal=result.ideal.generators, expected=">= 1", observed=result.ratio)
    minimum: Optional[Fraction] = None
    maximal = semigroup.maximal_ideal()
    for k in range(1, LECH_WINDOW_MAX_K + 1):
        window = window_of(ideal_power(maximal, k))
        required = window_of(ideal_power(maximal, math.ceil(k / 2)))
        for staircase in iter_staircases(semigroup, window, required):
            ideal = MonomialIdeal.from_staircase(semigroup, set(staircase))
            ratio = 2 * len(staircase) / multiplicity(ideal)
            minimum = ratio if minimum is None else min(minimum, ratio)
            report.record(ratio >= 1, k=k, ideal=ideal.generators, expected=">= 1", observed=ratio)
    report.summary = {"min_ratio_window": minimum}
    return report


def suite_ord_sandwich_54(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    """ord ≤ ôrd ≤ (n+1)·ord и ôrd(u) ≥ m ⇔ u ∈ замыкание 𝔪^m"""
    report = SuiteReport("ord-sandwich-54", seed)
    for semigroup in bundled_semigroups():
        n = semigroup.dim
        points = points_up_to(n, ORDER_DEGREE_LIMIT)
        points = [tuple(int(x) for x in p) for p in points[semigroup.member_mask(points)]]
        memo: Dict[Tuple[int, ...], int] = {}
        closures = [integral_closure(ideal_power(semigroup.maximal_ideal(), m)) for m in range(1, CLOSURE_POWER_LIMIT + 1)]
        for u in points:
            low = order_of(u, semigroup, memo)
            hat = order_hat(u, semigroup)
            report.record(
                low <= hat <= (n + 1) * low,
                semigroup=semigroup.describe(), u=u, expected=f"{low} <= ord_hat <= {(n + 1) * low}", observed=hat,
            )
            for m, closure in enumerate(closures, 1):
                report.record(
                    (hat >= m) == closure.contains(u),
                    semigroup=semigroup.describe(), u=u, m=m,
                    expected=f"ord_hat >= {m} iff u in closure(m^{m})", observed=hat,
                )
    return report


# ==============================
# ИЗУМИ, СОБСТВЕННОСТЬ, ELS
# ==============================

def suite_izumi_51(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    """⟨w,u⟩ ≤ K₀·A(v_w)·|u| на сетке весов и |u| ≤ 10"""
    report = SuiteReport("izumi-51", seed)
    grid = weight_grid()
    for n in (1, 2, 3):
        points = points_up_to(n, IZUMI_DEGREE_LIMIT)
        sizes = points.sum(axis=1)
        for model in boundary_models(n):
            k0 = izumi_constant(model)
            for weights in itertools.product(grid, repeat=n):
                v = MonomialValuation(weights)
                ratio = k0 * log_discrepancy(v, model)
                scale = math.lcm(*(w.denominator for w in weights))
                integral = np.array([int(w * scale) for w in weights], dtype=np.int64)
                lhs = (points @ integral) * ratio.denominator
                rhs = sizes * (ratio.numerator * scale)
                bad = np.nonzero(lhs > rhs)[0]
                u = tuple(int(x) for x in points[bad[0]]) if len(bad) else None
                report.record(
                    u is None,
                    model=model.describe(), weights=weights, u=u,
                    expected=f"v(u) <= {ratio}*ord(u)", observed=v.value(u) if u else None,
                )
    return report


def suite_properness_52(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    """A^n·vol ≥ K₁·A/v(𝔪) на сетке весов"""
    report = SuiteReport("properness-52", seed)
    grid = weight_grid()
    for n in (1, 2, 3):
        for model in boundary_models(n):
            k1 = properness_constant(model)
            for weights in itertools.product(grid, repeat=n):
                v = MonomialValuation(weights)
                value = normalized_volume_of_valuation(v, model)
                bound = k1 * log_discrepancy(v, model) / min(weights)
                report.record(value >= bound, model=model.describe(), weights=weights, expected=bound, observed=value)
    return report


def _normalized_directions(grid: Sequence[Fraction], n: int) -> List[Tuple[Fraction, ...]]:
    directions = set()
    for weights in itertools.product(grid, repeat=n):
        smallest = min(weights)
        directions.add(tuple(w / smallest for w in weights))
    return sorted(directions)


def _els_task(task) -> Tuple[int, List[Dict[str, Any]]]:
    weights, levels = task
    model = SingularityModel.affine(len(weights))
    failures = []
    for m in range(1, levels + 1):
        result = els_check(MonomialValuation(weights), m, model)
        if not result.holds:
            failures.append({
                "weights": weights, "m": m, "expected": result.bound, "observed": result.multiplicity,
            })
    return levels, failures


def suite_els_42b(
    seed: int,
    trials: Optional[int],
    workers: int,
    *,
    plane_grid: Optional[Sequence[Fraction]] = None,
    plane_levels: int = ELS_PLANE_LEVELS,
    space_grid: Sequence[Fraction] = ELS_SPACE_GRID,
    space_levels: int = ELS_SPACE_LEVELS,
) -> SuiteReport:
    """
    e(𝔞_m(v)) ≤ (m·vol(v)^{1/n} + ⌈A(v)⌉)^n в гладкой точке

    По умолчанию на плоскости вся сетка весов и m ≤ 20; в размерности 3 крупная сетка и m ≤ 6.
    """
    report = SuiteReport("els-42b", seed)
    tasks = [((Fraction(1),), plane_levels)]
    tasks += [(w, plane_levels) for w in _normalized_directions(plane_grid or weight_grid(), 2)]
    tasks += [(w, space_levels) for w in _normalized_directions(space_grid, 3)]
    report.merge(_map(_els_task, tasks, workers))
    report.summary = {"directions": len(tasks)}
    return report


# ==============================
# lct, v̂ol, ℓ̂, КОНУСЫ
# ==============================

def fixture_ideals() -> List[Tuple[SingularityModel, MonomialIdeal]]:
    plane = SingularityModel.affine(2)
    space = SingularityModel.affine(3)
    half = SingularityModel.affine(2, [Fraction(1, 2), 0])
    even = SingularityModel.cyclic_quotient((1, 1), 2)
    mu3 = SingularityModel.cyclic_quotient((1, 2), 3)
    listing = [
        (plane, [(1, 0), (0, 1)]),
        (plane, [(2, 0), (0, 3)]),
        (plane, [(3, 0), (1, 1), (0, 2)]),
        (plane, [(2, 0), (0, 2)]),
        (plane, [(4, 0), (1, 3), (0, 4)]),
        (half, [(1, 0), (0, 2)]),
        (half, [(3, 0), (1, 1), (0, 2)]),
        (space, [(2, 0, 0), (0, 3, 0), (0, 0, 1)]),
        (space, [(2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 0, 3)]),
        (even, [(2, 0), (1, 1), (0, 2)]),
        (even, [(2, 0), (0, 4)]),
        (mu3, [(3, 0), (1, 1), (0, 3)]),
        (mu3, [(3, 0), (0, 3)]),
    ]
    return [(model, MonomialIdeal.from_generators(model.semigroup, gens)) for model, gens in listing]


def suite_lct_scaling(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    """lct(𝔞^m) = lct(𝔞)/m, lct(замыкания) = lct(𝔞), на гладких моделях lct(𝔞) ≥ 1/(K₀·ord(𝔞))"""
    report = SuiteReport("lct-scaling", seed)
    for model, ideal in fixture_ideals():
        base = lct(ideal, model)
        for m in range(2, 5):
            observed = lct(ideal_power(ideal, m), model)
            report.record(observed == base / m, model=model.describe(), ideal=ideal.generators, m=m,
                          expected=base / m, observed=observed)
        closed = lct(integral_closure(ideal), model)
        report.record(closed == base, model=model.describe(), ideal=ideal.generators,
                      expected=base, observed=closed)
        if model.is_smooth_ambient:
            skoda = 1 / (izumi_constant(model) * order_of_ideal(ideal))
            report.record(base >= skoda, model=model.describe(), ideal=ideal.generators,
                          expected=f">= {skoda}", observed=base)
    return report


def suite_nvol_thm22(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    """lct^n·e ≥ v̂ol на всех идеалах поиска; минимум равен v̂ol по весам"""
    report = SuiteReport("nvol-thm22", seed)
    cases = [
        (SingularityModel.affine(1), 8),
        (SingularityModel.affine(2), 6),
        (SingularityModel.affine(2, [Fraction(1, 2), 0]), 4),
        (SingularityModel.cyclic_quotient((1, 1), 2), 6),
    ]
    for model, box in cases:
        expected = nvol_weights(model).value
        try:
            result = nvol_ideal_bound(model, box)
        except PropertyViolationError as e:
            report.record(False, box=box, **e.counterexample)
            continue
        report.record(result.value == expected and result.exhaustive, model=model.describe(), box=box,
                      witness=result.witness.generators, expected=expected, observed=result.value)
        report.summary[model.describe()] = {"candidates": result.candidates, "value": result.value}
    return report


def suite_ncolength_sandwich(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    """v̂ol ≤ ℓ̂_{c,k} ≤ n!·lct(𝔪^k)^n·ℓ(R/𝔪^k), повтор ограничений, монотонность по c"""
    report = SuiteReport("ncolength-sandwich", seed)
    plane = SingularityModel.affine(2)
    for row in ncolength_sweep(plane, DEFAULT_C, DEFAULT_K_VALUES, workers):
        params = ApproxParams(DEFAULT_C, row.k)
        upper = Fraction(4 * (row.k + 1), row.k)
        report.record(row.sandwiched and row.upper == upper and row.exhaustive, k=row.k,
                      expected=f"[{row.lower}, {upper}]", observed=row.value)
        failures = replay_constraints(row.argmin, row.value, plane, params)
        report.record(not failures, k=row.k,
                      expected="argmin satisfies window", observed=failures)
    line = SingularityModel.affine(1)
    for row in ncolength_sweep(line, DEFAULT_C, range(1, 21), workers):
        report.record(row.value == 1, model="A^1", k=row.k, expected=1, observed=row.value)
    previous = None
    for c in (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)):
        value = normalized_colength(plane, ApproxParams(c, 4)).value
        report.record(previous is None or value >= previous, k=4, c=c,
                      expected=f">= {previous}", observed=value)
        previous = value
    params = ApproxParams(DEFAULT_C, 6)
    windowed = normalized_colength(plane, params, lech_window=True)
    failures = replay_constraints(windowed.argmin, windowed.value, plane, params, lech_window=True)
    report.record(not failures and windowed.value >= 4, k=6, window="lech",
                  expected="argmin in window and value >= 4", observed=[windowed.value, failures])
    return report


def suite_cone_23(seed: int, trials: Optional[int], workers: int) -> SuiteReport:
    report = SuiteReport("cone-23", seed)
    for n in (2, 3, 4):
        for d in range(1, n):
            check = cone_check(n, d)
            expected = Fraction(n ** n, d)
            report.record(
                check.equal and check.vertex_nvol == expected and check.fano_product == check.fano_bound,
                n=n, d=d, expected=expected, observed=[check.vertex_nvol, check.rhs, check.fano_product],
            )
    return report


SUITES: Dict[str, Callable[[int, Optional[int], int], SuiteReport]] = {
    "lattice-a1": suite_lattice_a1,
    "riemann-a2": suite_riemann_a2,
    "lech-33": suite_lech_33,
    "ord-sandwich-54": suite_ord_sandwich_54,
    "izumi-51": suite_izumi_51,
    "properness-52": suite_properness_52,
    "els-42b": suite_els_42b,
    "lct-scaling": suite_lct_scaling,
    "nvol-thm22": suite_nvol_thm22,
    "ncolength-sandwich": suite_ncolength_sandwich,
    "cone-23": suite_cone_23,
}


def run_suite(name: str, seed: int, trials: Optional[int] = None, workers: int = 1) -> SuiteReport:
    """
    Raises:
        NvolInputError: неизвестный набор
    """
    if name not in SUITES:
        raise NvolInputError(f"Неизвестный набор проверок {name!r}; доступны: {', '.join(SUITES)}")
    logger.info("Набор %s: %s(seed=%d)", name, PRNG_NAME, seed)
    report = SUITES[name](seed, trials, workers)
    logger.info("Набор %s: %d проверок, нарушений %d", name, report.checks, report.violations)
    return report
