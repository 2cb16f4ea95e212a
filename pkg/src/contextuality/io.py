"""JSON file formats for models, realizations, vector configurations and PBAs.

Output goes through :func:`dumps`, a small deterministic emitter: two-space
indentation, lists of scalars on one line, and floats written with 17
significant digits so that every double survives a round trip unchanged.
Parsing then serializing a canonical document reproduces it byte for byte.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import ModelError
from .pba import FinitePartialBooleanAlgebra
from .quantum import Party, ProjectionOp, QuantumRealization, StateVector
from .scenario import (
    EmpiricalModel,
    MeasurementScenario,
    context_key,
    format_fraction,
    result_key,
)
from .stone import pair
from .vectors import VectorConfiguration


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize {value!r}")
        return "%.16e" % value
    if isinstance(value, Fraction):
        return json.dumps(format_fraction(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit(value: Any, indent: int) -> str:
    pad = "  " * (indent + 1)
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_emit(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (Mapping, list, tuple)) for v in value):
            return "[" + ", ".join(_scalar(v) for v in value) + "]"
        if all(isinstance(v, (list, tuple)) and all(not isinstance(x, (Mapping, list, tuple)) for x in v) for v in value):
            if sum(len(v) for v in value) <= 8:
                return "[" + ", ".join(_emit(v, indent + 1) for v in value) + "]"
        items = [pad + _emit(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return _scalar(value)


def dumps(document: Any) -> str:
    return _emit(document, 0) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"not valid JSON: {exc}") from exc


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return loads(text)


def _require(doc: Any, key: str, kind: type, where: str = "document") -> Any:
    if not isinstance(doc, Mapping):
        raise ModelError(f"{where} must be a JSON object")
    if key not in doc:
        raise ModelError(f"{where} is missing {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ModelError(f"{where}: {key!r} has the wrong type")
    return value


# scenarios and models


def scenario_from_json(doc: Any) -> MeasurementScenario:
    measurements = _require(doc, "measurements", list)
    outcomes = _require(doc, "outcomes", dict)
    contexts = _require(doc, "contexts", list)
    if not all(isinstance(c, list) for c in contexts):
        raise ModelError("contexts must be arrays of measurement identifiers")
    for m, outs in outcomes.items():
        if not isinstance(outs, list):
            raise ModelError(f"outcomes of {m!r} must be an array")
    return MeasurementScenario(measurements, outcomes, contexts)


def scenario_to_json(sc: MeasurementScenario) -> dict:
    return {
        "measurements": list(sc.measurements),
        "outcomes": {m: list(sc.outcomes[m]) for m in sc.measurements},
        "contexts": [list(c) for c in sc.contexts],
    }


def model_from_json(doc: Any) -> EmpiricalModel:
    """Parse a model document; keys other than the four model keys are ignored."""
    sc = scenario_from_json(doc)
    raw_tables = _require(doc, "tables", dict)
    tables = {}
    for ckey, row in raw_tables.items():
        if not isinstance(row, dict):
            raise ModelError(f"table {ckey!r} must be an object of result keys")
        tables[tuple(ckey.split(","))] = {tuple(rkey.split(",")): v for rkey, v in row.items()}
    return EmpiricalModel(sc, tables)


def model_to_json(model: EmpiricalModel) -> dict:
    doc = scenario_to_json(model.scenario)
    doc["tables"] = {
        context_key(ctx): {result_key(r): format_fraction(p) for r, p in row.items()}
        for ctx, row in model.tables.items()
    }
    return doc


def load_model(path: str | Path) -> EmpiricalModel:
    return model_from_json(read_json(path))


# realizations


def _complex(entry: Any, where: str) -> complex:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if (
        isinstance(entry, list)
        and len(entry) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        return complex(entry[0], entry[1])
    raise ModelError(f"{where}: expected a number or a [re, im] pair, got {entry!r}")


def _complex_vector(raw: Any, where: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise ModelError(f"{where} must be an array")
    return np.array([_complex(x, where) for x in raw], dtype=complex)


def _complex_matrix(raw: Any, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ModelError(f"{where} must be a non-empty array of rows")
    rows = [_complex_vector(r, where) for r in raw]
    if any(r.size != len(rows) for r in rows):
        raise ModelError(f"{where} is not square")
    return np.array(rows)


def _pairs(values: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in values]


def realization_from_json(doc: Any) -> QuantumRealization:
    state = StateVector(_complex_vector(_require(doc, "state", list), "state"))
    parties = []
    for i, raw in enumerate(_require(doc, "parties", list)):
        where = f"party {i}"
        dim = _require(raw, "dimension", int, where)
        measurements = {}
        for mid, projs in _require(raw, "measurements", dict, where).items():
            if not isinstance(projs, list):
                raise ModelError(f"{where}: measurement {mid!r} must list its projectors")
            measurements[mid] = tuple(
                ProjectionOp(_complex_matrix(p, f"{where}/{mid}/{k}")) for k, p in enumerate(projs)
            )
        parties.append(Party(dim, measurements))
    scenario = scenario_from_json(_require(doc, "scenario", dict))
    return QuantumRealization(tuple(parties), state, scenario)


def realization_to_json(qr: QuantumRealization) -> dict:
    return {
        "state": _pairs(qr.state.amplitudes),
        "parties": [
            {
                "dimension": p.dimension,
                "measurements": {
                    mid: [[_pairs(row) for row in proj.matrix] for proj in projs]
                    for mid, projs in p.measurements.items()
                },
            }
            for p in qr.parties
        ],
        "scenario": scenario_to_json(qr.scenario),
    }


# vector configurations


def configuration_from_json(doc: Any) -> VectorConfiguration:
    dimension = doc.get("dimension", 3) if isinstance(doc, Mapping) else None
    if not isinstance(dimension, int) or isinstance(dimension, bool):
        raise ModelError("'dimension' must be an integer")
    vectors = _require(doc, "vectors", list)
    return VectorConfiguration([_complex_vector(v, f"vector {i}") for i, v in enumerate(vectors)], dimension)


def configuration_to_json(vc: VectorConfiguration) -> dict:
    return {"dimension": vc.dimension, "vectors": [_pairs(v) for v in vc.vectors]}


# partial Boolean algebras


def pba_from_json(doc: Any) -> FinitePartialBooleanAlgebra:
    """Explicit tables: ``commensurable`` pairs, ``meet``/``join`` triples, ``neg`` object."""
    elements = _require(doc, "elements", list)
    if not all(isinstance(e, str) for e in elements):
        raise ModelError("elements must be strings")
    top = _require(doc, "top", str)
    bottom = _require(doc, "bottom", str)
    commensurable = set()
    for p in _require(doc, "commensurable", list):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
            raise ModelError(f"commensurable entries must be [a, b] pairs, got {p!r}")
        commensurable.add(pair(*p))
    tables = {}
    for name in ("meet", "join"):
        table = {}
        for t in _require(doc, name, list):
            if not (isinstance(t, list) and len(t) == 3 and all(isinstance(x, str) for x in t)):
                raise ModelError(f"{name} entries must be [a, b, result] triples, got {t!r}")
            key = pair(t[0], t[1])
            if table.setdefault(key, t[2]) != t[2]:
                raise ModelError(f"{name} of {t[0]!r}, {t[1]!r} is given twice with different results")
            table[key] = t[2]
        tables[name] = table
    neg = _require(doc, "neg", dict)
    return FinitePartialBooleanAlgebra(
        tuple(elements), frozenset(commensurable), tables["meet"], tables["join"], dict(neg), top, bottom
    )


def pba_to_json(p: FinitePartialBooleanAlgebra) -> dict:
    def ordered(key: frozenset) -> list:
        items = sorted(key, key=lambda x: (x not in p.elements, p.elements.index(x) if x in p.elements else 0, str(x)))
        return items * 2 if len(items) == 1 else items

    position = {x: i for i, x in enumerate(p.elements)}
    keys = set(p.commensurable) | set(p.meet_table) | set(p.join_table)
    keys = sorted(keys, key=lambda k: [position.get(x, len(position)) for x in ordered(k)])
    return {
        "elements": list(p.elements),
        "top": p.top,
        "bottom": p.bottom,
        "commensurable": [ordered(k) for k in keys if k in p.commensurable],
        "meet": [ordered(k) + [p.meet_table[k]] for k in keys if k in p.meet_table],
        "join": [ordered(k) + [p.join_table[k]] for k in keys if k in p.join_table],
        "neg": {x: p.neg_table[x] for x in p.elements if x in p.neg_table},
    }
