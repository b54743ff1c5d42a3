"""
Document loading and atomic report writing
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from src.config import get_fixtures_dir
from src.models.algebra import Algebra
from src.models.bimodule import DgBimodule
from src.models.exceptions import DocumentParseError
from src.models.field import Field
from src.models.schemas import AlgebraDocument, BimoduleDocument
from src.services.algebra_service import algebra_from_document
from src.services.bimodule_service import bimodule_from_document

logger = logging.getLogger(__name__)

ALGEBRAS = "algebras"
BIMODULES = "bimodules"

DocT = TypeVar("DocT", bound=BaseModel)


def resolve(ref: str, kind: str) -> Path:
    """A path to an existing file, or the name of a bundled fixture of the given kind"""
    path = Path(ref)
    if path.is_file():
        return path
    name = ref if ref.endswith(".json") else f"{ref}.json"
    candidate = get_fixtures_dir() / kind / name
    if candidate.is_file():
        return candidate
    raise DocumentParseError(f"No file '{ref}' and no bundled {kind[:-1]} fixture named '{ref}'")


def read_json(path: Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DocumentParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    except OSError as e:
        raise DocumentParseError(f"{path}: cannot read file: {e}") from e


def parse_document(data: Any, model: Type[DocT], origin: str) -> DocT:
    """Validate raw JSON against a schema, naming the offending field on failure"""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ())) or "<document>"
        raise DocumentParseError(f"{origin}: field '{where}': {first.get('msg')}",
                                 witness=f"{e.error_count()} error(s)") from e


def load_algebra(ref: str, field: Optional[Field] = None) -> Algebra:
    path = resolve(ref, ALGEBRAS)
    doc = parse_document(read_json(path), AlgebraDocument, str(path))
    algebra = algebra_from_document(doc, field)
    logger.info(f"Loaded algebra {algebra.name} from {path}")
    return algebra


def _algebra_ref(ref: str | AlgebraDocument, field: Optional[Field]) -> Algebra:
    if isinstance(ref, AlgebraDocument):
        return algebra_from_document(ref, field)
    return load_algebra(ref, field)


def load_bimodule(ref: str, field: Optional[Field] = None) -> DgBimodule:
    """Load a bimodule document; its algebras are inline documents or fixture names"""
    path = resolve(ref, BIMODULES)
    doc = parse_document(read_json(path), BimoduleDocument, str(path))
    source = _algebra_ref(doc.source, field)
    target = _algebra_ref(doc.target, field)
    x = bimodule_from_document(doc, source, target)
    logger.info(f"Loaded bimodule {x.name} ({source.name} -> {target.name}) from {path}")
    return x


def detect_kind(ref: str) -> str:
    """Whether a path or fixture name refers to an algebra or a bimodule document"""
    path = Path(ref)
    if path.is_file():
        data = read_json(path)
        if isinstance(data, dict) and "modules" in data:
            return BIMODULES
        return ALGEBRAS
    for kind in (ALGEBRAS, BIMODULES):
        try:
            resolve(ref, kind)
            return kind
        except DocumentParseError:
            continue
    raise DocumentParseError(f"No file and no bundled fixture named '{ref}'")


def list_fixtures() -> dict[str, list[str]]:
    root = get_fixtures_dir()
    return {kind: sorted(p.stem for p in (root / kind).glob("*.json")) if (root / kind).is_dir() else []
            for kind in (ALGEBRAS, BIMODULES)}


def write_json_atomic(path: Path | str, data: Any) -> None:
    """Write JSON through a temporary file in the same directory and rename it into place"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(mode="w", delete=False, dir=path.parent,
                                     suffix=".tmp", prefix=f"{path.name}.", encoding="utf-8") as tmp:
        json.dump(data, tmp, indent=2, sort_keys=True)
        tmp.write("\n")
        tmp.flush()
        os.fsync(tmp.fileno())
        tmp_path = tmp.name
    try:
        os.replace(tmp_path, path)
    except OSError:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
