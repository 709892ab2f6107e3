"""
Командная строка: все операции, наборы проверок и пакетные отчёты

Коды выхода: 0 успех, 1 ошибка входных данных, 2 нарушение свойства
или проваленный набор, 3 неполный (ограниченный бюджетом) результат.
"""
import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

from config import (
    DEFAULT_C,
    DEFAULT_DELTA,
    DEFAULT_K_VALUES,
    DEFAULT_SEED,
    EXIT_BUDGET,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_VIOLATION,
    VERSION,
    RunConfig,
    resolve_threads,
)
from convex_core import to_rat
from errors import NvolInputError, PropertyViolationError
from json_model_parser import JSONModelParser, parse_int_list, parse_weights
from lattice_approx import certified_volume, count_lattice_points, dilation_error_bound, riemann_gap
from monomial_algebra import colength, hilbert_samuel, integral_closure, lech_check, multiplicity, order_hat, order_of
from normalized_volume import (
    MONOMIAL_SUFFICIENCY_NOTE,
    ApproxParams,
    cone_check,
    lct,
    ncolength_sweep,
    normalized_colength,
    nvol_ideal_bound,
    nvol_weights,
    semicontinuity_sweep,
)
from report_writer import jsonable, open_output, write_csv, write_json
from singularity import log_discrepancy, normalized_volume_of_valuation, valuation_volume, value_on_ideal
from verify_suites import SUITES, run_suite

logger = logging.getLogger("nvol_toric")

FAMILY_HEADER = ("label", "nvol", "special", "attains_min")
SWEEP_HEADER = ("k", "value", "lower", "upper", "argmin")
HS_HEADER = ("m", "length")
CONE_HEADER = ("n", "d", "vertex_nvol", "rhs", "equal", "fano_product", "fano_bound")


@dataclass
class CommandOutput:
    """Результат подкоманды: JSON-полезная нагрузка, необязательная таблица CSV и код выхода"""
    payload: dict
    table: Optional[Tuple[Sequence[str], List[Sequence[Any]]]] = None
    status: int = EXIT_OK
    note: Optional[str] = MONOMIAL_SUFFICIENCY_NOTE


# ==============================
# ПОДКОМАНДЫ
# ==============================

def cmd_lattice_count(args, parser: JSONModelParser) -> CommandOutput:
    body = parser.parse_polytope_file(args.polytope)
    if args.certify is not None:
        estimate = certified_volume(body, args.certify, args.k)
        count, k, error_bound = estimate.raw_count, estimate.dilation, estimate.error_bound
    elif args.k is None:
        raise NvolInputError("Нужно указать -k или --certify")
    else:
        k = args.k
        count = count_lattice_points(body, k)
        error_bound = dilation_error_bound(k, body.dim)
    payload = {"count": count, "value": Fraction(count, k ** body.dim), "error_bound": error_bound, "k": k}
    return CommandOutput(payload, note=None)


def cmd_riemann(args, parser: JSONModelParser) -> CommandOutput:
    table = parser.parse_step_function_file(args.function)
    gap = riemann_gap(table, args.k)
    payload = {"k": args.k, "integral": table.integral(), "gap": gap.gap, "bound": gap.bound, "holds": gap.holds}
    return CommandOutput(payload, note=None)


def _model_and_ideal(args, parser: JSONModelParser):
    model = parser.parse_model_file(args.model)
    return model, parser.parse_ideal_file(args.ideal, model)


def cmd_colength(args, parser: JSONModelParser) -> CommandOutput:
    model, ideal = _model_and_ideal(args, parser)
    return CommandOutput({"model": model, "ideal": ideal, "colength": colength(ideal)})


def cmd_mult(args, parser: JSONModelParser) -> CommandOutput:
    model, ideal = _model_and_ideal(args, parser)
    return CommandOutput({"model": model, "ideal": ideal, "multiplicity": multiplicity(ideal)})


def cmd_hs(args, parser: JSONModelParser) -> CommandOutput:
    model, ideal = _model_and_ideal(args, parser)
    record = hilbert_samuel(ideal, args.max_power)
    payload = {"model": model, "ideal": ideal, "table": [list(row) for row in record.table],
               "normalized_terms": record.normalized_terms(), "multiplicity": multiplicity(ideal)}
    return CommandOutput(payload, (HS_HEADER, [list(row) for row in record.table]))


def cmd_valuation(args, parser: JSONModelParser) -> CommandOutput:
    model = parser.parse_model_file(args.model)
    v = parse_weights(args.weights)
    payload = {"model": model, "weights": v}
    everything = not (args.ideal or args.vol or args.log_discrepancy or args.nvol)
    if args.ideal:
        ideal = parser.parse_ideal_file(args.ideal, model)
        payload["ideal"] = ideal
        payload["value"] = value_on_ideal(v, ideal)
    if args.log_discrepancy or everything:
        payload["A"] = log_discrepancy(v, model)
    if args.vol or everything:
        payload["vol"] = valuation_volume(v, model)
    if args.nvol or everything:
        payload["nvol"] = normalized_volume_of_valuation(v, model)
    return CommandOutput(payload)


def cmd_lct(args, parser: JSONModelParser) -> CommandOutput:
    model, ideal = _model_and_ideal(args, parser)
    return CommandOutput({"model": model, "ideal": ideal, "lct": lct(ideal, model)})


def cmd_nvol(args, parser: JSONModelParser) -> CommandOutput:
    model = parser.parse_model_file(args.model)
    if args.method == "weights":
        result = nvol_weights(model)
        return CommandOutput({"model": model, "method": "weights", "nvol": result.value, "argmin": result.argmin})
    result = nvol_ideal_bound(model, args.box, args.budget)
    payload = {"model": model, "method": "ideal-search", "box": args.box, "nvol_upper": result.value,
               "witness": result.witness, "gap": result.gap, "candidates": result.candidates,
               "exhaustive": result.exhaustive}
    return CommandOutput(payload, status=EXIT_OK if result.exhaustive else EXIT_BUDGET)


def _parse_sweep(text: str) -> List[int]:
    """ "2..10" → [2, …, 10] """
    low, sep, high = text.partition("..")
    if not sep:
        raise NvolInputError(f"Диапазон --sweep должен иметь вид K1..K2, получено {text!r}")
    try:
        first, last = int(low), int(high)
    except ValueError as e:
        raise NvolInputError(f"Некорректный диапазон --sweep: {text!r}") from e
    if first < 1 or last < first:
        raise NvolInputError(f"Пустой или неположительный диапазон --sweep: {text!r}")
    return list(range(first, last + 1))


def _sweep_output(model, c, k_values: Sequence[int], threads: int, budget: Optional[int]) -> CommandOutput:
    rows = ncolength_sweep(model, c, k_values, threads, budget)
    table = [(row.k, row.value, row.lower, row.upper, row.argmin) for row in rows]
    exhaustive = all(row.exhaustive for row in rows)
    payload = {"model": model, "c": to_rat(c), "rows": rows}
    return CommandOutput(payload, (SWEEP_HEADER, table), EXIT_OK if exhaustive else EXIT_BUDGET)


def cmd_ncolength(args, parser: JSONModelParser, config: RunConfig) -> CommandOutput:
    model = parser.parse_model_file(args.model)
    if args.sweep:
        return _sweep_output(model, args.c, _parse_sweep(args.sweep), config.threads, args.budget)
    if args.k is None:
        raise NvolInputError("Нужно указать -k или --sweep")
    params = ApproxParams(args.c, args.k, args.delta)
    result = normalized_colength(model, params, args.budget, args.lech_window)
    payload = {"model": model, "c": params.c, "k": params.k, "lech_window": args.lech_window, "result": result}
    return CommandOutput(payload, status=EXIT_OK if result.exhaustive else EXIT_BUDGET)


def cmd_cone_check(args, parser: JSONModelParser) -> CommandOutput:
    check = cone_check(args.n, args.d)
    row = (check.n, check.d, check.vertex_nvol, check.rhs, check.equal, check.fano_product, check.fano_bound)
    return CommandOutput({"cone": check}, (CONE_HEADER, [row]))


def _family_output(family_path: str, parser: JSONModelParser, threads: int = 1) -> CommandOutput:
    report = semicontinuity_sweep(parser.parse_family_file(family_path), threads)
    table = [(row.label, row.nvol, row.special, row.attains_min) for row in report.rows]
    payload = {"family": report.family, "rows": report.rows, "special_is_min": report.special_is_min}
    return CommandOutput(payload, (FAMILY_HEADER, table))


def cmd_sweep(args, parser: JSONModelParser, config: RunConfig) -> CommandOutput:
    return _family_output(args.family, parser, config.threads)


def cmd_verify(args, parser: JSONModelParser, config: RunConfig) -> CommandOutput:
    report = run_suite(args.suite, config.seed, config.trials, config.threads)
    payload = {"suite": report.suite, "prng": report.prng, "seed": report.seed, "passed": report.passed,
               "checks": report.checks, "violations": report.violations,
               "counterexample": report.counterexample, "summary": report.summary}
    return CommandOutput(payload, status=EXIT_OK if report.passed else EXIT_VIOLATION)


def cmd_order(args, parser: JSONModelParser) -> CommandOutput:
    model = parser.parse_model_file(args.model)
    u = parse_int_list(args.exponent, "показатель")
    return CommandOutput({"model": model, "exponent": u, "ord": order_of(u, model.semigroup),
                          "ord_hat": order_hat(u, model.semigroup)})


def cmd_closure(args, parser: JSONModelParser) -> CommandOutput:
    model, ideal = _model_and_ideal(args, parser)
    return CommandOutput({"model": model, "ideal": ideal, "closure": integral_closure(ideal)})


def cmd_lech(args, parser: JSONModelParser) -> CommandOutput:
    model, ideal = _model_and_ideal(args, parser)
    report = lech_check(ideal)
    payload = {"model": model, "report": report, "holds": report.holds}
    return CommandOutput(payload, status=EXIT_OK if report.holds else EXIT_VIOLATION)


def cmd_report(args, parser: JSONModelParser, config: RunConfig) -> CommandOutput:
    """Пакет CSV-артефактов для графиков в каталоге --dir"""
    os.makedirs(args.dir, exist_ok=True)
    written = []
    status = EXIT_OK
    outputs = []
    for path in args.family or []:
        name = os.path.splitext(os.path.basename(path))[0]
        outputs.append((f"family_{name}.csv", _family_output(path, parser, config.threads)))
    if args.model:
        model = parser.parse_model_file(args.model)
        outputs.append(("ncolength_sweep.csv",
                        _sweep_output(model, args.c, _parse_sweep(args.sweep), config.threads, args.budget)))
        if args.ideal:
            outputs.append(("hs.csv", cmd_hs(args, parser)))
    for filename, output in outputs:
        target = os.path.join(args.dir, filename)
        header, rows = output.table
        with open_output(target) as stream:
            write_csv(header, rows, stream, MONOMIAL_SUFFICIENCY_NOTE, config.decimal_places)
        written.append(target)
        status = max(status, output.status)
    return CommandOutput({"written": written}, status=status)


# ==============================
# РАЗБОР АРГУМЕНТОВ
# ==============================

def _rational(text: str) -> Fraction:
    try:
        return to_rat(text)
    except NvolInputError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _add_model_ideal(sub: argparse.ArgumentParser, ideal: bool = True):
    sub.add_argument("--model", required=True, help="JSON-описание модели")
    if ideal:
        sub.add_argument("--ideal", required=True, help="JSON-описание идеала")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nvol_toric", description="Нормированные объёмы торических klt-особенностей")
    ap.add_argument("--version", action="store_true", help="Версия и отпечаток реестра операций")
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    ap.add_argument("--output", default=None, help="Файл вывода (по умолчанию stdout)")
    ap.add_argument("--decimal", type=int, default=None, metavar="P", help="Десятичный вывод с P знаками")
    ap.add_argument("--threads", type=int, default=None, help="Число процессов (иначе NVOL_THREADS)")
    ap.add_argument("-v", "--verbose", action="store_true")
    commands = ap.add_subparsers(dest="command")

    sub = commands.add_parser("lattice-count", help="#(kΔ ∩ Z^n) или сертифицированная оценка объёма")
    sub.add_argument("--polytope", required=True)
    sub.add_argument("-k", type=int, default=None)
    sub.add_argument("--certify", type=_rational, default=None, metavar="EPS",
                     help="Сертифицировать погрешность EPS: k поднимается до k0(EPS, n)")

    sub = commands.add_parser("riemann", help="Разрыв между интегралом монотонной функции и суммой Римана")
    sub.add_argument("--function", required=True, help="JSON-описание ступенчатой функции")
    sub.add_argument("-k", type=int, required=True)

    for name in ("colength", "mult", "lct", "closure", "lech"):
        _add_model_ideal(commands.add_parser(name))

    sub = commands.add_parser("hs", help="Функция Гильберта–Самюэля")
    _add_model_ideal(sub)
    sub.add_argument("--max-power", type=int, default=10)

    sub = commands.add_parser("valuation", help="A, vol, v̂ol мономиального нормирования")
    _add_model_ideal(sub, ideal=False)
    sub.add_argument("--weights", required=True)
    sub.add_argument("--ideal", default=None)
    sub.add_argument("--vol", action="store_true")
    sub.add_argument("--A", dest="log_discrepancy", action="store_true")
    sub.add_argument("--nvol", action="store_true")

    sub = commands.add_parser("nvol")
    _add_model_ideal(sub, ideal=False)
    sub.add_argument("--method", choices=["weights", "ideal-search"], default="weights")
    sub.add_argument("--box", type=int, default=4)
    sub.add_argument("--budget", type=int, default=None)

    sub = commands.add_parser("ncolength", help="Нормированная коразмерность ℓ̂_{c,k}")
    _add_model_ideal(sub, ideal=False)
    sub.add_argument("-c", type=_rational, default=DEFAULT_C)
    sub.add_argument("-k", type=int, default=None)
    sub.add_argument("--sweep", default=None, metavar="K1..K2")
    sub.add_argument("--delta", type=_rational, default=DEFAULT_DELTA)
    sub.add_argument("--lech-window", action="store_true")
    sub.add_argument("--budget", type=int, default=None)

    sub = commands.add_parser("cone-check")
    sub.add_argument("-n", type=int, required=True)
    sub.add_argument("-d", type=int, required=True)

    sub = commands.add_parser("sweep", help="v̂ol по семейству моделей")
    sub.add_argument("--family", required=True)

    sub = commands.add_parser("verify")
    sub.add_argument("suite")
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sub = commands.add_parser("order", help="ord и ôrd монома")
    _add_model_ideal(sub, ideal=False)
    sub.add_argument("--exponent", required=True)

    sub = commands.add_parser("report", help="CSV-артефакты для графиков")
    sub.add_argument("--dir", required=True)
    sub.add_argument("--family", action="append")
    sub.add_argument("--model", default=None)
    sub.add_argument("--ideal", default=None)
    sub.add_argument("--max-power", type=int, default=10)
    sub.add_argument("-c", type=_rational, default=DEFAULT_C)
    sub.add_argument("--sweep", default=f"{DEFAULT_K_VALUES[0]}..{DEFAULT_K_VALUES[-1]}")
    sub.add_argument("--budget", type=int, default=None)
    return ap


HANDLERS = {
    "lattice-count": cmd_lattice_count,
    "riemann": cmd_riemann,
    "colength": cmd_colength,
    "mult": cmd_mult,
    "hs": cmd_hs,
    "valuation": cmd_valuation,
    "lct": cmd_lct,
    "nvol": cmd_nvol,
    "ncolength": cmd_ncolength,
    "cone-check": cmd_cone_check,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "order": cmd_order,
    "closure": cmd_closure,
    "lech": cmd_lech,
    "report": cmd_report,
}
NEEDS_CONFIG = {"ncolength", "sweep", "verify", "report"}


def registry_fingerprint() -> str:
    """sha256 по версии, подкомандам и наборам проверок"""
    text = "\n".join([VERSION, *sorted(HANDLERS), *sorted(SUITES)])
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def emit(output: CommandOutput, config: RunConfig):
    with open_output(config.output) as stream:
        if config.format == "csv" and output.table is not None:
            header, rows = output.table
            write_csv(header, rows, stream, output.note, config.decimal_places)
        else:
            write_json(output.payload, stream, output.note, config.decimal_places)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.version:
        print(f"nvol_toric {VERSION} (registry {registry_fingerprint()})")
        return EXIT_OK
    if args.command is None:
        ap.print_help(sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        config = RunConfig(
            command=args.command,
            seed=getattr(args, "seed", DEFAULT_SEED),
            trials=getattr(args, "trials", None),
            output=args.output,
            format=args.format,
            decimal_places=args.decimal,
            threads=resolve_threads(args.threads),
        )
        parser = JSONModelParser()
        handler = HANDLERS[args.command]
        output = handler(args, parser, config) if args.command in NEEDS_CONFIG else handler(args, parser)
        emit(output, config)
        return output.status
    except NvolInputError as e:
        logger.error("Ошибка входных данных: %s", e)
        return EXIT_INPUT_ERROR
    except PropertyViolationError as e:
        logger.error("Нарушено свойство: %s", e)
        sys.stdout.write(json.dumps({"violation": str(e), "counterexample": jsonable(e.counterexample)},
                                    indent=2, ensure_ascii=False) + "\n")
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
