import logging
from typing import Any, Dict, Iterable, List, Optional

from datagravity.config import PJ
from datagravity.engines.energy_model import EnergyModel
from datagravity.utils.errors import DomainError
from datagravity.utils.measurements_db import CLAIMS, MEASUREMENTS
from datagravity.utils.types import (
    ClaimCheck,
    ClaimKind,
    ClaimReport,
    ClaimStatus,
    DivisionMode,
    GdClaim,
    Interval,
    MeasurementRecord,
)

logger = logging.getLogger(__name__)

RECORD_HEADER = [
    "key",
    "source",
    "node",
    "e_move_min[pJ]",
    "e_move_max[pJ]",
    "e_compute_min[pJ]",
    "e_compute_max[pJ]",
    "access_width[bits]",
    "g_d_min[dimensionless]",
    "g_d_max[dimensionless]",
    "flags",
    "notes",
]

CLAIM_HEADER = [
    "label",
    "kind",
    "status",
    "unit",
    "expected_min",
    "expected_max",
    "derived_min",
    "derived_max",
    "relative_error[dimensionless]",
    "notes",
]


def _interval_pj(value) -> Optional[Interval]:
    if value is None:
        return None
    if isinstance(value, (tuple, list)):
        return Interval(low=value[0] * PJ, high=value[1] * PJ)
    return Interval.point(value * PJ)


def _interval(value) -> Optional[Interval]:
    if value is None:
        return None
    if isinstance(value, (tuple, list)):
        return Interval(low=value[0], high=value[1])
    return Interval.point(value)


def builtin_measurements() -> List[MeasurementRecord]:
    records = []
    for key, entry in MEASUREMENTS.items():
        records.append(
            MeasurementRecord(
                key=key,
                source=entry["source"],
                node=entry["node"],
                e_move=_interval_pj(entry.get("e_move_pj")),
                e_compute=_interval_pj(entry.get("e_compute_pj")),
                access_width=entry.get("access_width", 64),
                power_w=entry.get("power_w"),
                op_rate=entry.get("op_rate"),
                qualitative=entry.get("qualitative", False),
                source_asserted=entry.get("source_asserted", False),
                notes=entry.get("notes", ""),
            )
        )
    return records


def builtin_claims() -> List[GdClaim]:
    # Claims carry expectations only; derived values always come from record energies.
    return [
        GdClaim(
            label=entry["label"],
            kind=ClaimKind(entry["kind"]),
            record_keys=entry.get("record_keys", []),
            quantity=entry.get("quantity", "total"),
            expected=_interval(entry.get("expected")),
            tolerance=entry.get("tolerance", 0.01),
            informative=entry.get("informative", False),
            quote=entry.get("quote", ""),
            notes=entry.get("notes", ""),
        )
        for entry in CLAIMS
    ]


def divide(numerator: Interval, denominator: Interval, mode: DivisionMode = DivisionMode.ENDPOINT) -> Interval:
    """endpoint: min/min and max/max (the cache arithmetic 10/4, 100/4);
    conservative: min/max and max/min."""
    if DivisionMode(mode) == DivisionMode.CONSERVATIVE:
        return Interval(low=numerator.low / denominator.high, high=numerator.high / denominator.low)
    a = EnergyModel.disjunction_constant(numerator.low, denominator.low)
    b = EnergyModel.disjunction_constant(numerator.high, denominator.high)
    return Interval(low=min(a, b), high=max(a, b))


def envelope(intervals: Iterable[Interval]) -> Interval:
    intervals = list(intervals)
    return Interval(low=min(i.low for i in intervals), high=max(i.high for i in intervals))


class MeasurementCatalog:
    def __init__(
        self,
        records: Optional[List[MeasurementRecord]] = None,
        claims: Optional[List[GdClaim]] = None,
    ):
        self.records = list(records) if records is not None else builtin_measurements()
        self.claims = list(claims) if claims is not None else builtin_claims()
        self._by_key: Dict[str, MeasurementRecord] = {r.key: r for r in self.records}

    def get_record(self, key: str) -> Optional[MeasurementRecord]:
        return self._by_key.get(key)

    def has_record(self, key: str) -> bool:
        return key in self._by_key

    @staticmethod
    def compute_energy(record: MeasurementRecord) -> Interval:
        if record.e_compute is not None:
            return record.e_compute
        return Interval.point(record.power_w / record.op_rate)

    @staticmethod
    def derive_gd(record: MeasurementRecord, mode: DivisionMode = DivisionMode.ENDPOINT) -> Interval:
        if record.e_move is None:
            raise DomainError(f"record '{record.key}' has no movement energy to derive G_d from")
        if record.qualitative:
            raise DomainError(f"record '{record.key}' is qualitative; no G_d is derived for it")
        return divide(record.e_move, MeasurementCatalog.compute_energy(record), mode)

    def _quantity(self, record: MeasurementRecord, quantity: str) -> Interval:
        compute = self.compute_energy(record)
        if quantity == "compute":
            return compute
        if record.e_move is None:
            raise DomainError(f"record '{record.key}' has no movement energy")
        if quantity == "move":
            return record.e_move
        return Interval(low=record.e_move.low + compute.low, high=record.e_move.high + compute.high)

    def check_claim(self, claim: GdClaim, mode: DivisionMode = DivisionMode.ENDPOINT) -> ClaimCheck:
        missing = [key for key in claim.record_keys if key not in self._by_key]
        if missing:
            logger.warning(f"❌ Claim '{claim.label}' references unknown records {missing}")
            return ClaimCheck(
                label=claim.label,
                kind=claim.kind,
                expected=claim.expected,
                status=ClaimStatus.FAIL,
                notes=f"unknown records: {', '.join(missing)}",
            )
        records = [self._by_key[key] for key in claim.record_keys]

        derived: Optional[Interval] = None
        if claim.kind == ClaimKind.GD:
            derived = envelope(self.derive_gd(r, mode) for r in records)
        elif claim.kind == ClaimKind.ENERGY_PER_OP:
            derived = envelope(self.compute_energy(r) for r in records)
        elif claim.kind == ClaimKind.RATIO:
            if len(records) != 2:
                raise DomainError(f"ratio claim '{claim.label}' needs exactly two records")
            derived = divide(
                self._quantity(records[0], claim.quantity),
                self._quantity(records[1], claim.quantity),
                mode,
            )

        relative_error = None
        if derived is not None and claim.expected is not None:
            relative_error = max(
                abs(derived.low - claim.expected.low) / claim.expected.low,
                abs(derived.high - claim.expected.high) / claim.expected.high,
            )

        if claim.informative or claim.kind == ClaimKind.NOTE:
            status = ClaimStatus.NOTED
        elif relative_error is not None and relative_error <= claim.tolerance:
            status = ClaimStatus.PASS
        else:
            status = ClaimStatus.FAIL

        icon = {"pass": "✅", "fail": "❌", "noted": "📝"}[status.value]
        logger.info(f"{icon} {claim.label}: derived={_describe(derived)} expected={_describe(claim.expected)}")

        return ClaimCheck(
            label=claim.label,
            kind=claim.kind,
            expected=claim.expected,
            derived=derived,
            status=status,
            relative_error=relative_error,
            notes=claim.notes or claim.quote,
        )

    def check_claims(self, mode: DivisionMode = DivisionMode.ENDPOINT) -> ClaimReport:
        logger.info(f"🔍 Checking {len(self.claims)} published claims against {len(self.records)} records")
        report = ClaimReport(checks=[self.check_claim(claim, mode) for claim in self.claims])
        if report.passed:
            logger.info("✅ Every numeric claim reproduces from stored energies")
        else:
            logger.warning(f"❌ {len(report.failures)} claims failed to reproduce")
        return report

    def record_rows(self, mode: DivisionMode = DivisionMode.ENDPOINT) -> List[List[Any]]:
        rows = []
        for record in self.records:
            gd = None
            if record.e_move is not None and not record.qualitative:
                gd = self.derive_gd(record, mode)
            flags = []
            if record.qualitative:
                flags.append("qualitative")
            if record.source_asserted:
                flags.append("asserted")
            rows.append(
                [
                    record.key,
                    record.source,
                    record.node,
                    None if record.e_move is None else record.e_move.low / PJ,
                    None if record.e_move is None else record.e_move.high / PJ,
                    self.compute_energy(record).low / PJ,
                    self.compute_energy(record).high / PJ,
                    record.access_width,
                    None if gd is None else gd.low,
                    None if gd is None else gd.high,
                    ";".join(flags),
                    record.notes,
                ]
            )
        return rows

    @staticmethod
    def claim_rows(report: ClaimReport) -> List[List[Any]]:
        rows = []
        for check in report.checks:
            unit = "J" if check.kind == ClaimKind.ENERGY_PER_OP else "dimensionless"
            rows.append(
                [
                    check.label,
                    check.kind.value,
                    check.status.value,
                    unit,
                    None if check.expected is None else check.expected.low,
                    None if check.expected is None else check.expected.high,
                    None if check.derived is None else check.derived.low,
                    None if check.derived is None else check.derived.high,
                    check.relative_error,
                    check.notes,
                ]
            )
        return rows


def _describe(interval: Optional[Interval]) -> str:
    if interval is None:
        return "n/a"
    if interval.is_point:
        return f"{interval.low:.4g}"
    return f"{interval.low:.4g}-{interval.high:.4g}"
