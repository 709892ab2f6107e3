"""
Единый парсер JSON-описаний: модели, идеалы, многогранники, функции, семейства
"""
import json
import logging
from typing import Any, Dict, List, Optional

from convex_core import Halfspace, Polyhedron, to_rat, to_vector
from errors import NvolInputError
from lattice_approx import MonotoneTable
from monomial_algebra import MonomialIdeal, Semigroup
from normalized_volume import FamilyMember, SingularityFamily
from singularity import MonomialValuation, SingularityModel

logger = logging.getLogger(__name__)


def parse_int_list(text: str, what: str = "список") -> List[int]:
    """ "1,2,3" → [1, 2, 3] """
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as e:
        raise NvolInputError(f"Некорректный {what}: {text!r}") from e


def parse_weights(text: str) -> MonomialValuation:
    """ "1,2" или "1/2,3" → MonomialValuation """
    return MonomialValuation(to_vector(part for part in text.split(",")))


class JSONModelParser:
    """Парсер файлов описаний с сообщениями об ошибках в терминах файла"""

    def __init__(self):
        self.source: Optional[str] = None

    # ==============================
    # ЧТЕНИЕ ФАЙЛА
    # ==============================

    def load(self, file_path: str) -> Dict[str, Any]:
        """
        Считывает JSON-объект из файла

        Raises:
            NvolInputError: файл не найден, синтаксическая ошибка (со строкой и столбцом)
                или корень не является объектом
        """
        self.source = file_path
        try:
            with open(file_path, encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            raise NvolInputError(f"Не удалось открыть {file_path}: {e.strerror}") from e
        except json.JSONDecodeError as e:
            raise NvolInputError(
                f"{file_path}: ошибка JSON в строке {e.lineno}, столбце {e.colno}: {e.msg}"
            ) from e
        if not isinstance(data, dict):
            raise NvolInputError(f"{file_path}: ожидался JSON-объект на верхнем уровне")
        return data

    def _require(self, data: Dict[str, Any], key: str, kind: str) -> Any:
        if key not in data:
            raise NvolInputError(f"{self._where()}в описании {kind} нет поля '{key}'")
        return data[key]

    def _where(self) -> str:
        return f"{self.source}: " if self.source else ""

    def _integer(self, value: Any, field: str) -> int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise NvolInputError(f"{self._where()}{field} должно быть целым числом, получено {value!r}")
        return value

    # ==============================
    # МОДЕЛИ И ИДЕАЛЫ
    # ==============================

    def parse_model(self, data: Dict[str, Any]) -> SingularityModel:
        """{"dim": 2, "congruence": {"weights": [1,1], "modulus": 2} | null, "boundary": ["1/2","0"]}"""
        if "model" in data:
            data = data["model"]
        if not isinstance(data, dict):
            raise NvolInputError(f"{self._where()}описание модели должно быть объектом")
        dim = self._integer(self._require(data, "dim", "модели"), "dim")
        congruence = data.get("congruence")
        if congruence is None:
            semigroup = Semigroup.affine(dim)
        else:
            if not isinstance(congruence, dict):
                raise NvolInputError(f"{self._where()}congruence должно быть объектом")
            weights = self._require(congruence, "weights", "сравнения")
            if not isinstance(weights, list):
                raise NvolInputError(f"{self._where()}congruence.weights должно быть списком целых")
            weights = [self._integer(b, "congruence.weights") for b in weights]
            modulus = self._integer(self._require(congruence, "modulus", "сравнения"), "congruence.modulus")
            semigroup = Semigroup.cyclic_quotient(weights, modulus)
            if semigroup.dim != dim:
                raise NvolInputError(f"{self._where()}число весов сравнения не совпадает с dim = {dim}")
        boundary = data.get("boundary") or []
        if not isinstance(boundary, list):
            raise NvolInputError(f"{self._where()}boundary должно быть списком коэффициентов")
        model = SingularityModel(semigroup, tuple(to_rat(a) for a in boundary))
        logger.debug("Загружена модель %s", model.describe())
        return model

    def parse_model_file(self, file_path: str) -> SingularityModel:
        return self.parse_model(self.load(file_path))

    def parse_ideal(self, data: Dict[str, Any], model: SingularityModel) -> MonomialIdeal:
        """{"generators": [[2,0],[1,1],[0,3]]}; система образующих минимализуется"""
        generators = self._require(data, "generators", "идеала")
        if not isinstance(generators, list) or not generators:
            raise NvolInputError(f"{self._where()}generators должен быть непустым списком")
        for g in generators:
            if not isinstance(g, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in g):
                raise NvolInputError(f"{self._where()}образующая {g!r} должна быть списком целых")
        return MonomialIdeal.from_generators(model.semigroup, generators)

    def parse_ideal_file(self, file_path: str, model: SingularityModel) -> MonomialIdeal:
        return self.parse_ideal(self.load(file_path), model)

    # ==============================
    # МНОГОГРАННИКИ И ФУНКЦИИ
    # ==============================

    def parse_polytope(self, data: Dict[str, Any]) -> Polyhedron:
        """{"dim": 2, "halfspaces": [{"normal": ["1","0"], "offset": "0"}, ...]}"""
        dim = self._require(data, "dim", "многогранника")
        halfspaces = []
        for h in self._require(data, "halfspaces", "многогранника"):
            normal = to_vector(self._require(h, "normal", "полупространства"))
            halfspaces.append(Halfspace(normal, to_rat(self._require(h, "offset", "полупространства"))))
        polyhedron = Polyhedron(dim, tuple(halfspaces), bounded=True)
        if not polyhedron.certify_bounded():
            raise NvolInputError(f"{self._where()}многогранник не ограничен")
        return polyhedron

    def parse_polytope_file(self, file_path: str) -> Polyhedron:
        return self.parse_polytope(self.load(file_path))

    def parse_step_function(self, data: Dict[str, Any]) -> MonotoneTable:
        """{"start": "0", "end": "1", "breakpoints": ["1/2"], "values": ["0", "1"]}"""
        breakpoints = data.get("breakpoints", [])
        values = self._require(data, "values", "функции")
        if not isinstance(breakpoints, list) or not isinstance(values, list):
            raise NvolInputError(f"{self._where()}breakpoints и values должны быть списками")
        return MonotoneTable.from_steps(
            self._require(data, "start", "функции"), breakpoints, values, self._require(data, "end", "функции")
        )

    def parse_step_function_file(self, file_path: str) -> MonotoneTable:
        return self.parse_step_function(self.load(file_path))

    # ==============================
    # СЕМЕЙСТВА
    # ==============================

    def parse_family(self, data: Dict[str, Any]) -> SingularityFamily:
        """{"name": ..., "special": label, "members": [{"label": ..., "model": {...}}]}"""
        members = []
        for entry in self._require(data, "members", "семейства"):
            label = str(self._require(entry, "label", "члена семейства"))
            members.append(FamilyMember(label, self.parse_model(self._require(entry, "model", "члена семейства"))))
        family = SingularityFamily(
            str(data.get("name", "family")), tuple(members), str(self._require(data, "special", "семейства"))
        )
        logger.info("Загружено семейство %s из %d моделей", family.name, len(family.members))
        return family

    def parse_family_file(self, file_path: str) -> SingularityFamily:
        return self.parse_family(self.load(file_path))
