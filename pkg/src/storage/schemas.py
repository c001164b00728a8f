"""
Pydantic schemas for the JSON documents read by the toolkit.

Reals may be written as JSON numbers or as exact rationals ("1/3"); NaN and
infinities are rejected. Spaces referenced by other documents may be inlined
or given as a path relative to the referencing file.
"""

from fractions import Fraction
from typing import Annotated, List, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator


def _parse_real(value):
    if isinstance(value, bool):
        raise ValueError("booleans are not real numbers")
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{value!r} is neither a number nor a rational 'p/q'")
    return value


Real = Annotated[float, BeforeValidator(_parse_real)]


class Document(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False, frozen=True,
                              populate_by_name=True)


class AtomDoc(Document):
    weight: Real


class ComponentDoc(Document):
    weight_label: str = Field(pattern=r"^aleph_\d+$")
    measure: Real
    realized: Optional[bool] = None

    @model_validator(mode="after")
    def _only_aleph_0_is_realized(self):
        if self.realized and self.weight_label != "aleph_0":
            raise ValueError(f"{self.weight_label} components cannot be realized")
        return self


class SpaceDoc(Document):
    atoms: List[AtomDoc] = []
    components: List[ComponentDoc] = []


SpaceRef = Union[SpaceDoc, str]


class PieceDoc(Document):
    length: Real
    value: Real


class FunctionDoc(Document):
    space: SpaceRef
    atom_values: List[Real] = []
    step_parts: List[List[PieceDoc]] = []


class SegmentDoc(Document):
    from_: Real = Field(alias="from")
    to: Real
    length: Real


class IsometryDoc(Document):
    source: SpaceRef
    target: SpaceRef
    atom_map: List[int] = []
    signs: Optional[List[Real]] = None
    component_map: List[int] = []
    rearrangements: List[List[SegmentDoc]] = []
    segment_signs: Optional[List[Real]] = None


class MatrixDoc(Document):
    source: SpaceRef
    target: SpaceRef
    matrix: List[List[Real]]
