"""
JSON input documents.

Each document validates the raw file shape with pydantic and converts it
into the numerical value object the services work with. Complex matrix
entries are written as [re, im] pairs; plain numbers are accepted as real.
"""

from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from stratafold.errors import DomainError, InvalidSpecError
from stratafold.services.clifford import MetricSpec
from stratafold.services.exterior_core import LieAlgebraSpec
from stratafold.services.lindblad import LindbladSpec
from stratafold.services.qgeom import DensityState, ObservableBasis
from stratafold.services.statgeom import ProbabilityVector

ComplexEntry = Union[float, List[float]]
ComplexMatrix = List[List[ComplexEntry]]


def complex_matrix(rows: ComplexMatrix, dim: int, label: str) -> np.ndarray:
    """Convert nested [re, im] rows into a dim x dim complex array."""
    if len(rows) != dim or any(len(row) != dim for row in rows):
        raise InvalidSpecError(f"{label} must be a {dim}x{dim} matrix")
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if isinstance(entry, list):
                if len(entry) != 2:
                    raise InvalidSpecError(f"{label}[{i}][{j}] must be a [re, im] pair")
                out[i, j] = complex(entry[0], entry[1])
            else:
                out[i, j] = float(entry)
    return out


class LieAlgebraDocument(BaseModel):
    """{"dim": n, "c": [[i, j, k, value], ...]} with 0-indexed i, j, k."""

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=1, description="Dimension of the Lie algebra")
    c: List[List[float]] = Field(default_factory=list, description="Nonzero structure constants [i, j, k, value]")
    name: Optional[str] = Field(None, description="Label used in check reports")

    @field_validator("c")
    @classmethod
    def _entry_shape(cls, value: List[List[float]]) -> List[List[float]]:
        for entry in value:
            if len(entry) != 4:
                raise ValueError(f"structure-constant entry {entry} must be [i, j, k, value]")
            if any(float(x) != int(x) for x in entry[:3]):
                raise ValueError(f"structure-constant indices in {entry} must be integers")
        return value

    def to_spec(self) -> LieAlgebraSpec:
        return LieAlgebraSpec.from_entries(self.dim, self.c, name=self.name)


class MetricDocument(BaseModel):
    """{"dim": n, "g": [[...], ...]}."""

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=1)
    g: List[List[float]]

    def to_metric(self) -> MetricSpec:
        g = np.array(self.g, dtype=float)
        if g.shape != (self.dim, self.dim):
            raise InvalidSpecError(f"g must be a {self.dim}x{self.dim} matrix, got shape {g.shape}")
        try:
            return MetricSpec(g)
        except DomainError as e:
            raise InvalidSpecError(f"metric: {e.detail}") from e


class StateDocument(BaseModel):
    """Initial state as {"coords": [x_1, ...]} or {"rho": matrix}."""

    model_config = ConfigDict(extra="forbid")

    coords: Optional[List[float]] = Field(None, description="Coordinates x_1 .. x_{n^2-1}; x_0 = 1 is implied")
    rho: Optional[ComplexMatrix] = Field(None, description="Density matrix with [re, im] entries")

    @model_validator(mode="after")
    def _exactly_one(self) -> "StateDocument":
        if (self.coords is None) == (self.rho is None):
            raise ValueError("state needs exactly one of 'coords' or 'rho'")
        return self

    def to_state(self, dim: int) -> DensityState:
        basis = ObservableBasis.for_dimension(dim)
        try:
            if self.coords is not None:
                if len(self.coords) != dim * dim - 1:
                    raise InvalidSpecError(f"state needs {dim * dim - 1} coordinates, got {len(self.coords)}")
                return DensityState(np.concatenate([[1.0], self.coords]), basis)
            return DensityState.from_matrix(complex_matrix(self.rho, dim, "rho"), basis)
        except DomainError as e:
            raise InvalidSpecError(f"initial state: {e.detail}") from e


class LindbladDocument(BaseModel):
    """{"dim": n, "H": matrix, "V": [matrix, ...], "state": {...}}."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    dim: int = Field(..., ge=1, le=8)
    H: ComplexMatrix
    V: List[ComplexMatrix] = Field(default_factory=list)
    state: Optional[StateDocument] = None

    def to_spec(self) -> LindbladSpec:
        H = complex_matrix(self.H, self.dim, "H")
        ops = [complex_matrix(V, self.dim, f"V[{j}]") for j, V in enumerate(self.V)]
        return LindbladSpec(H, ops)

    def to_state(self) -> DensityState:
        if self.state is None:
            raise InvalidSpecError("Lindblad document has no initial 'state'")
        return self.state.to_state(self.dim)


class ProbabilityDocument(BaseModel):
    """{"p": [p_1, ..., p_N]}."""

    model_config = ConfigDict(extra="forbid")

    p: List[float] = Field(..., min_length=1)

    def to_vector(self) -> ProbabilityVector:
        return ProbabilityVector(self.p)
