import math
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Vector3 = Tuple[float, float, float]

MIN_BETA = 1.0
MAX_BETA = 3.0


def _check_beta(value: float) -> float:
    if not (MIN_BETA < value <= MAX_BETA):
        raise ValueError(f"beta must lie in ({MIN_BETA:g}, {MAX_BETA:g}], got {value}")
    return value


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class ClaimStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOTED = "noted"


class ClaimKind(str, Enum):
    GD = "gd"
    ENERGY_PER_OP = "energy_per_op"
    RATIO = "ratio"
    NOTE = "note"


class DivisionMode(str, Enum):
    ENDPOINT = "endpoint"
    CONSERVATIVE = "conservative"


class KernelStatus(str, Enum):
    PLACED = "placed"
    UNPLACED = "unplaced"


class PlacementMode(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class TechProfile(FrozenModel):
    """A technology point. alpha is in J/(bit * m^beta), so it is only
    meaningful together with the beta stored beside it."""

    label: str
    e_compute: float = Field(gt=0)
    alpha: float = Field(gt=0)
    beta: float
    d_ref: float = Field(default=1.0, gt=0)
    bits_per_access: int = Field(default=64, gt=0)

    @field_validator("beta")
    @classmethod
    def _beta_in_range(cls, value: float) -> float:
        return _check_beta(value)


class WorkloadSpec(FrozenModel):
    entropy_per_op: float = Field(ge=0)
    op_rate: float = Field(ge=0)
    duration: float = Field(ge=0)

    @model_validator(mode="after")
    def _finite_total(self) -> "WorkloadSpec":
        if not math.isfinite(self.entropy_per_op * self.op_rate * self.duration):
            raise ValueError("total bits S*f*T overflows")
        return self


class EnergyBreakdown(FrozenModel):
    e_compute_total: float = Field(ge=0)
    e_move_total: float = Field(ge=0)
    e_total: float = Field(ge=0)

    @model_validator(mode="after")
    def _additive(self) -> "EnergyBreakdown":
        if self.e_total != self.e_compute_total + self.e_move_total:
            raise ValueError("e_total must equal e_compute_total + e_move_total")
        return self

    @classmethod
    def of(cls, e_compute_total: float, e_move_total: float) -> "EnergyBreakdown":
        return cls(
            e_compute_total=e_compute_total,
            e_move_total=e_move_total,
            e_total=e_compute_total + e_move_total,
        )


class DataObject(FrozenModel):
    id: str = Field(min_length=1)
    position: Vector3
    entropy_per_access: float = Field(ge=0)
    access_frequency: float = Field(ge=0)

    @model_validator(mode="after")
    def _finite_mass(self) -> "DataObject":
        if not math.isfinite(self.entropy_per_access * self.access_frequency):
            raise ValueError(f"information mass of '{self.id}' overflows")
        return self

    @property
    def mass(self) -> float:
        return self.entropy_per_access * self.access_frequency


class FieldSample(FrozenModel):
    point: Vector3
    field: Optional[Vector3] = None
    magnitude: Optional[float] = Field(default=None, ge=0)
    singular: bool = False
    singular_object: Optional[str] = None

    @model_validator(mode="after")
    def _consistent(self) -> "FieldSample":
        if self.singular:
            if self.field is not None or self.magnitude is not None:
                raise ValueError("singular samples carry no field value")
            return self
        if self.field is None or self.magnitude is None:
            raise ValueError("regular samples need both field and magnitude")
        norm = math.hypot(*self.field)
        if abs(norm - self.magnitude) > 1e-12 * max(norm, self.magnitude, 1e-300):
            raise ValueError("magnitude must equal the Euclidean norm of field")
        return self


class Region(FrozenModel):
    lo: Vector3
    hi: Vector3

    @model_validator(mode="after")
    def _nondegenerate(self) -> "Region":
        for axis, (a, b) in zip("xyz", zip(self.lo, self.hi)):
            if not b > a:
                raise ValueError(f"region is degenerate along {axis}: lo={a}, hi={b}")
        return self

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.lo) + np.asarray(self.hi)) / 2.0

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(np.asarray(self.hi) - np.asarray(self.lo)))

    def contains(self, point: Vector3, tol: float = 0.0) -> bool:
        return all(a - tol <= p <= b + tol for p, a, b in zip(point, self.lo, self.hi))

    def clip(self, points: np.ndarray) -> np.ndarray:
        return np.clip(points, self.lo, self.hi)

    def translated(self, offset: Vector3) -> "Region":
        return Region(
            lo=tuple(a + t for a, t in zip(self.lo, offset)),
            hi=tuple(b + t for b, t in zip(self.hi, offset)),
        )


class AdvantageInputs(FrozenModel):
    g_d: float = Field(ge=1)
    d: float = Field(gt=0)
    d_min: float = Field(gt=0)
    beta: float

    @field_validator("beta")
    @classmethod
    def _beta_in_range(cls, value: float) -> float:
        return _check_beta(value)

    @model_validator(mode="after")
    def _ordered(self) -> "AdvantageInputs":
        if self.d_min > self.d:
            raise ValueError(f"d_min ({self.d_min}) must not exceed d ({self.d})")
        return self

    @property
    def ratio(self) -> float:
        return self.d_min / self.d

    @classmethod
    def from_ratio(cls, g_d: float, r: float, beta: float, d: float = 1.0) -> "AdvantageInputs":
        return cls(g_d=g_d, d=d, d_min=r * d, beta=beta)


class AdvantageReport(FrozenModel):
    g_d: float
    beta: float
    ratio: float = Field(gt=0, le=1)
    gamma: float = Field(ge=1)
    lower_bound: float
    condition_holds: bool
    bound_satisfied: bool


class ArchitectureComparison(FrozenModel):
    traditional: EnergyBreakdown
    gravitational: EnergyBreakdown
    g_d: float
    ratio: float
    gamma_measured: float
    gamma_formula: float


class VerificationResult(FrozenModel):
    asserted: int
    excluded: int
    violations: List[AdvantageReport]
    reports: List[AdvantageReport] = Field(default_factory=list)
    worst_margin: Optional[float] = None

    @property
    def passed(self) -> bool:
        return not self.violations


class SweepRange(FrozenModel):
    start: float
    stop: float
    steps: int = Field(ge=1)
    log: bool = False

    @model_validator(mode="after")
    def _well_formed(self) -> "SweepRange":
        if self.start > self.stop:
            raise ValueError(f"range start {self.start} exceeds stop {self.stop}")
        if self.log and self.start <= 0:
            raise ValueError("logarithmic ranges need a positive start")
        return self

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.start])
        if self.log:
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.steps)
        return np.linspace(self.start, self.stop, self.steps)


class ComputeKernel(FrozenModel):
    id: str = Field(min_length=1)
    traffic: Dict[str, float]
    position: Optional[Vector3] = None

    @field_validator("traffic")
    @classmethod
    def _nonnegative(cls, value: Dict[str, float]) -> Dict[str, float]:
        for object_id, bits in value.items():
            if bits < 0:
                raise ValueError(f"traffic to '{object_id}' is negative ({bits})")
        return value

    @property
    def total_traffic(self) -> float:
        return math.fsum(self.traffic.values())


class PlacementProblem(FrozenModel):
    objects: List[DataObject]
    kernels: List[ComputeKernel]
    profile: TechProfile
    region: Region
    slots: Optional[List[Vector3]] = None

    @model_validator(mode="after")
    def _integrity(self) -> "PlacementProblem":
        object_ids = [obj.id for obj in self.objects]
        if len(set(object_ids)) != len(object_ids):
            raise ValueError("data object ids must be unique")
        kernel_ids = [kernel.id for kernel in self.kernels]
        if len(set(kernel_ids)) != len(kernel_ids):
            raise ValueError("kernel ids must be unique")
        known = set(object_ids)
        for kernel in self.kernels:
            for object_id in kernel.traffic:
                if object_id not in known:
                    raise ValueError(
                        f"kernel '{kernel.id}' references unknown data object '{object_id}'"
                    )
            if kernel.position is not None and not self.region.contains(kernel.position):
                raise ValueError(f"initial position of kernel '{kernel.id}' lies outside the region")
        for index, slot in enumerate(self.slots or []):
            if not self.region.contains(slot):
                raise ValueError(f"slot {index} at {slot} lies outside the region")
        return self

    def object_positions(self) -> np.ndarray:
        return np.array([obj.position for obj in self.objects], dtype=float).reshape(-1, 3)

    def slot_positions(self) -> np.ndarray:
        return np.array(self.slots or [], dtype=float).reshape(-1, 3)

    def traffic_matrix(self) -> np.ndarray:
        index = {obj.id: i for i, obj in enumerate(self.objects)}
        matrix = np.zeros((len(self.kernels), len(self.objects)))
        for k, kernel in enumerate(self.kernels):
            for object_id, bits in kernel.traffic.items():
                matrix[k, index[object_id]] = bits
        return matrix

    def translated(self, offset: Vector3) -> "PlacementProblem":
        def shift(point):
            return None if point is None else tuple(p + t for p, t in zip(point, offset))

        return PlacementProblem(
            objects=[obj.model_copy(update={"position": shift(obj.position)}) for obj in self.objects],
            kernels=[k.model_copy(update={"position": shift(k.position)}) for k in self.kernels],
            profile=self.profile,
            region=self.region.translated(offset),
            slots=None if self.slots is None else [shift(s) for s in self.slots],
        )


class PlacementSolution(FrozenModel):
    mode: PlacementMode
    positions: Dict[str, Optional[Vector3]]
    statuses: Dict[str, KernelStatus]
    slot_assignment: Optional[Dict[str, int]] = None
    objective: float = Field(ge=0)
    iterations: int = Field(ge=0)
    converged: bool
    seed: Optional[int] = None
    history: List[float] = Field(default_factory=list)


class Interval(FrozenModel):
    low: float = Field(gt=0)
    high: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "Interval":
        if self.low > self.high:
            raise ValueError(f"range minimum {self.low} exceeds maximum {self.high}")
        return self

    @classmethod
    def point(cls, value: float) -> "Interval":
        return cls(low=value, high=value)

    @property
    def is_point(self) -> bool:
        return self.low == self.high

    def scaled(self, factor: float) -> "Interval":
        return Interval(low=self.low * factor, high=self.high * factor)


class MeasurementRecord(FrozenModel):
    key: str = Field(min_length=1)
    source: str
    node: str
    e_move: Optional[Interval] = None
    e_compute: Optional[Interval] = None
    access_width: int = Field(default=64, gt=0)
    power_w: Optional[float] = Field(default=None, gt=0)
    op_rate: Optional[float] = Field(default=None, gt=0)
    qualitative: bool = False
    source_asserted: bool = False
    notes: str = ""

    @model_validator(mode="after")
    def _has_energy(self) -> "MeasurementRecord":
        if self.e_compute is None and (self.power_w is None or self.op_rate is None):
            raise ValueError(f"record '{self.key}' needs e_compute or power_w with op_rate")
        return self


class GdClaim(FrozenModel):
    label: str
    kind: ClaimKind
    record_keys: List[str] = Field(default_factory=list)
    # which energy the ratio claims compare
    quantity: Literal["move", "compute", "total"] = "total"
    expected: Optional[Interval] = None
    tolerance: float = Field(default=0.01, ge=0)
    informative: bool = False
    quote: str = ""
    notes: str = ""


class ClaimCheck(FrozenModel):
    label: str
    kind: ClaimKind
    expected: Optional[Interval] = None
    derived: Optional[Interval] = None
    status: ClaimStatus
    relative_error: Optional[float] = None
    notes: str = ""


class ClaimReport(FrozenModel):
    checks: List[ClaimCheck]

    @property
    def passed(self) -> bool:
        return all(check.status != ClaimStatus.FAIL for check in self.checks)

    @property
    def failures(self) -> List[ClaimCheck]:
        return [check for check in self.checks if check.status == ClaimStatus.FAIL]
