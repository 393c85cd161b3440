"""File formats: JSON instance/corpus/collection files and JSONL run reports.

All files carry a ``schema`` version and a ``kind`` tag and serialize with
a fixed field order (canonical form), so serialize(parse(x)) is
byte-stable and fixtures diff cleanly. Element sets are stored as sorted
index arrays.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .clustering import Corpus
from .errors import InstanceParseError, PolymatroidValidationError
from .functions import PolymatroidFunction, function_from_record
from .instance import Constraint, ShInstance
from .sets import ElementSet

SCHEMA_VERSION = 1


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _check_header(payload: Any, kind: str) -> dict:
    if not isinstance(payload, dict):
        raise InstanceParseError(f"expected a JSON object for a {kind} file")
    version = payload.get("schema")
    if version != SCHEMA_VERSION:
        raise InstanceParseError(
            f"unsupported schema version {version!r} (this build reads {SCHEMA_VERSION})"
        )
    if payload.get("kind") != kind:
        raise InstanceParseError(
            f"expected kind {kind!r}, found {payload.get('kind')!r}"
        )
    return payload


def _parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(
            f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
            line=exc.lineno,
            column=exc.colno,
        ) from exc


def _set_record(s: ElementSet) -> list[int]:
    return [int(j) for j in s]


def _set_from_record(n: int, rec, what: str) -> ElementSet:
    if not isinstance(rec, list):
        raise InstanceParseError(f"{what} must be an array of element indices")
    try:
        return ElementSet.from_indices(n, rec)
    except ValueError as exc:
        raise InstanceParseError(f"bad {what}: {exc}") from exc


def constraint_record(c: Constraint) -> dict:
    if c.is_unconstrained:
        return {"kind": "unconstrained"}
    return {"kind": c.kind, "k": c.k}


def constraint_from_record(rec) -> Constraint:
    if not isinstance(rec, dict) or "kind" not in rec:
        raise InstanceParseError("constraint record needs a 'kind' field")
    kind = rec["kind"]
    try:
        if kind == "unconstrained":
            return Constraint.unconstrained()
        return Constraint(kind, int(rec["k"]))
    except (KeyError, ValueError) as exc:
        raise InstanceParseError(f"bad constraint record: {exc}") from exc


def dump_instance(instance: ShInstance) -> str:
    payload: dict = {"schema": SCHEMA_VERSION, "kind": "instance", "n": instance.n}
    if instance.homogeneous:
        payload["shared_function"] = instance.functions[0].record()
    else:
        payload["functions"] = [f.record() for f in instance.functions]
    payload["b_sets"] = [_set_record(b) for b in instance.b_sets]
    payload["constraint"] = constraint_record(instance.constraint)
    return _dump(payload)


def parse_instance(text: str) -> ShInstance:
    payload = _check_header(_parse_json(text), "instance")
    try:
        n = int(payload["n"])
        b_recs = payload["b_sets"]
    except KeyError as exc:
        raise InstanceParseError(f"instance file is missing field {exc}") from exc
    if not isinstance(b_recs, list) or not b_recs:
        raise InstanceParseError("b_sets must be a nonempty array")
    b_sets = [_set_from_record(n, rec, "b_set") for rec in b_recs]
    try:
        if "shared_function" in payload:
            f = function_from_record(payload["shared_function"])
            functions = [f] * len(b_sets)
        else:
            functions = [function_from_record(r) for r in payload["functions"]]
    except KeyError as exc:
        raise InstanceParseError(f"instance file is missing field {exc}") from exc
    except PolymatroidValidationError as exc:
        raise InstanceParseError(f"bad function record: {exc}") from exc
    constraint = constraint_from_record(payload.get("constraint", {"kind": "unconstrained"}))
    try:
        return ShInstance(functions, b_sets, constraint)
    except ValueError as exc:
        raise InstanceParseError(str(exc)) from exc


def dump_function(f: PolymatroidFunction) -> str:
    return _dump({"schema": SCHEMA_VERSION, "kind": "function", "function": f.record()})


def parse_function(text: str) -> PolymatroidFunction:
    payload = _check_header(_parse_json(text), "function")
    try:
        return function_from_record(payload["function"])
    except KeyError as exc:
        raise InstanceParseError(f"function file is missing field {exc}") from exc
    except PolymatroidValidationError as exc:
        raise InstanceParseError(f"bad function record: {exc}") from exc


def dump_corpus(corpus: Corpus) -> str:
    payload: dict = {
        "schema": SCHEMA_VERSION,
        "kind": "corpus",
        "n": corpus.n,
        "docs": [_set_record(d) for d in corpus.docs],
    }
    if corpus.labels is not None:
        payload["labels"] = [int(x) for x in corpus.labels]
    if corpus.classes is not None:
        payload["classes"] = [list(map(int, c)) for c in corpus.classes]
    return _dump(payload)


def parse_corpus(text: str) -> Corpus:
    payload = _check_header(_parse_json(text), "corpus")
    try:
        n = int(payload["n"])
        docs = [_set_from_record(n, rec, "doc") for rec in payload["docs"]]
    except KeyError as exc:
        raise InstanceParseError(f"corpus file is missing field {exc}") from exc
    labels = payload.get("labels")
    classes = payload.get("classes")
    try:
        return Corpus(
            n=n,
            docs=docs,
            labels=None if labels is None else [int(x) for x in labels],
            classes=None if classes is None else [tuple(map(int, c)) for c in classes],
        )
    except ValueError as exc:
        raise InstanceParseError(str(exc)) from exc


def dump_collection(similarity: np.ndarray) -> str:
    s = np.asarray(similarity, dtype=float)
    return _dump(
        {
            "schema": SCHEMA_VERSION,
            "kind": "collection",
            "n": int(s.shape[0]),
            "similarity": [[float(x) for x in row] for row in s],
        }
    )


def parse_collection(text: str) -> np.ndarray:
    payload = _check_header(_parse_json(text), "collection")
    try:
        sim = np.asarray(payload["similarity"], dtype=float)
    except (KeyError, ValueError) as exc:
        raise InstanceParseError(f"bad collection file: {exc}") from exc
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
        raise InstanceParseError("similarity must be a square matrix")
    if sim.shape[0] != payload.get("n"):
        raise InstanceParseError("collection n does not match the similarity size")
    return sim


def load_path(path: Union[str, Path]) -> str:
    return Path(path).read_text()


def load_instance(path: Union[str, Path]) -> ShInstance:
    return parse_instance(load_path(path))


def load_function(path: Union[str, Path]) -> PolymatroidFunction:
    return parse_function(load_path(path))


def load_corpus(path: Union[str, Path]) -> Corpus:
    return parse_corpus(load_path(path))


def load_collection(path: Union[str, Path]) -> np.ndarray:
    return parse_collection(load_path(path))


def write_reports(path: Union[str, Path], records: list[dict]) -> None:
    """Line-delimited JSON, one record per line."""
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
