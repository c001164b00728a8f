"""
Document storage layer for the LogSpace toolkit.
Loads JSON input documents into domain objects and writes JSON reports.
"""

import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import ValidationError

from src.core.config import REPORT_SIGNIFICANT_DIGITS
from src.core.errors import ParseError
from src.services.band_maps import MeasurePreservingIso, describe
from src.services.isometry import LinearMapTable, LogIsometry, signs_of
from src.spaces.logspace import LogFunction, from_pieces
from src.spaces.measure_algebra import (
    Atom,
    Density,
    Event,
    HomogeneousComponent,
    MeasureAlgebra,
    WeightLabel,
    measure,
)
from src.storage.schemas import (
    Document,
    FunctionDoc,
    IsometryDoc,
    MatrixDoc,
    SpaceDoc,
    SpaceRef,
)

DocT = TypeVar("DocT", bound=Document)


class IsometryInput(NamedTuple):
    iso: MeasurePreservingIso
    signs: Optional[Tuple[float, ...]]
    segment_signs: Optional[Tuple[float, ...]]


def _line_of(text: str, loc: Sequence[Any]) -> Optional[int]:
    """Best-effort line of the field addressed by a validation error location."""
    cursor, line = 0, None
    for part in loc:
        if not isinstance(part, str):
            continue
        found = text.find(f'"{part}"', cursor)
        if found >= 0:
            cursor = found
            line = text.count("\n", 0, found) + 1
    return line


class DocumentStorage:
    """Reads input documents and writes reports, relative to a base directory."""

    def __init__(self, base_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

    def _resolve(self, path: Union[str, Path], relative_to: Optional[Path] = None) -> Path:
        path = Path(path)
        if path.is_absolute():
            return path
        return (relative_to.parent if relative_to is not None else self.base_dir) / path

    def _read(self, path: Path) -> Tuple[Any, str]:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot read file ({e.strerror})", path=str(path))
        try:
            return json.loads(text), text
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, path=str(path), line=e.lineno)

    def _load(self, model: Type[DocT], path: Path) -> DocT:
        data, text = self._read(path)
        try:
            doc = model.model_validate(data)
        except ValidationError as e:
            error = e.errors()[0]
            loc = error.get("loc", ())
            raise ParseError(error.get("msg", "invalid document"), path=str(path),
                             line=_line_of(text, loc),
                             field=".".join(str(part) for part in loc) or None)
        logging.info(f"DocumentStorage: loaded {model.__name__} from {path}")
        return doc

    # ---------- spaces ----------

    @staticmethod
    def space_from_doc(doc: SpaceDoc) -> MeasureAlgebra:
        return MeasureAlgebra(
            tuple(Atom(a.weight) for a in doc.atoms),
            tuple(HomogeneousComponent(WeightLabel.parse(c.weight_label), c.measure)
                  for c in doc.components),
        )

    def _space_ref(self, ref: SpaceRef, origin: Path) -> MeasureAlgebra:
        if isinstance(ref, str):
            return self.load_space(self._resolve(ref, origin))
        return self.space_from_doc(ref)

    def load_space(self, path: Union[str, Path]) -> MeasureAlgebra:
        path = self._resolve(path)
        return self.space_from_doc(self._load(SpaceDoc, path))

    # ---------- functions ----------

    def load_function(self, path: Union[str, Path]) -> LogFunction:
        path = self._resolve(path)
        doc = self._load(FunctionDoc, path)
        space = self._space_ref(doc.space, path)
        pieces = [[(p.length, p.value) for p in part] for part in doc.step_parts]
        return from_pieces(space, doc.atom_values, pieces)

    # ---------- maps ----------

    def load_isometry(self, path: Union[str, Path]) -> IsometryInput:
        path = self._resolve(path)
        doc = self._load(IsometryDoc, path)
        source = self._space_ref(doc.source, path)
        target = self._space_ref(doc.target, path)
        rearrangements = [[(s.from_, s.to, s.length) for s in part] for part in doc.rearrangements]
        iso = MeasurePreservingIso.from_component_map(
            source, target, doc.atom_map, doc.component_map, rearrangements or None)
        return IsometryInput(
            iso,
            tuple(doc.signs) if doc.signs is not None else None,
            tuple(doc.segment_signs) if doc.segment_signs is not None else None,
        )

    def load_matrix(self, path: Union[str, Path]) -> LinearMapTable:
        path = self._resolve(path)
        doc = self._load(MatrixDoc, path)
        source = self._space_ref(doc.source, path)
        target = self._space_ref(doc.target, path)
        return LinearMapTable(source, target, tuple(tuple(row) for row in doc.matrix))

    # ---------- reports ----------

    def write_report(self, report: dict, out: Union[str, Path]) -> Path:
        """Write atomically: the destination is either untouched or complete."""
        out = self._resolve(out)
        text = render_report(report)
        out.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=out.parent, prefix=f".{out.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp, out)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logging.info(f"DocumentStorage: wrote report to {out}")
        return out


# ==================== DOMAIN -> DOCUMENT ====================

def space_to_doc(space: MeasureAlgebra) -> dict:
    return {
        "atoms": [{"weight": a.weight} for a in space.atoms],
        "components": [{"weight_label": c.weight_label.name, "measure": c.measure,
                        "realized": c.realized} for c in space.components],
    }


def function_to_doc(f: LogFunction) -> dict:
    return {
        "space": space_to_doc(f.space),
        "atom_values": list(f.atom_values),
        "step_parts": [[{"length": length, "value": value}
                        for length, value in zip(step.lengths, step.values)]
                       for step in f.step_parts],
    }


def event_to_dict(e: Event) -> dict:
    return {"atoms": sorted(e.atoms), "parts": [[list(p) for p in part.pieces] for part in e.parts]}


def density_to_dict(density: Density) -> dict:
    return {
        "atom_ratios": list(density.atom_ratios),
        "piece_ratios": [[{"length": length, "value": value}
                          for length, value in zip(step.lengths, step.values)]
                         for step in density.piece_ratios],
        "band": event_to_dict(density.band) if density.band is not None else None,
        "sup": density.sup(),
        "inf": density.inf(),
    }


def isometry_to_dict(U: LogIsometry) -> dict:
    return {
        "phi": describe(U.phi),
        "signs": list(signs_of(U)),
        "multiplier": function_to_doc(U.multiplier),
        "lambda_density": density_to_dict(U.lambda_density),
        "range_event": event_to_dict(U.range_event),
        "range_measure": measure(U.target, U.range_event),
    }


# ==================== RENDERING ====================

def _format_float(value: float) -> str:
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    return format(value, f".{REPORT_SIGNIFICANT_DIGITS}g")


def _encode(value: Any, depth: int) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    pad, closing = "  " * (depth + 1), "  " * depth
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, depth + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + closing + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items: List[str] = [f"{pad}{_encode(v, depth + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + closing + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def render_report(report: dict) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(report, 0) + "\n"
