import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from datagravity import config
from datagravity.engines.energy_model import EnergyModel
from datagravity.utils.errors import DomainError
from datagravity.utils.export import write_csv
from datagravity.utils.types import (
    AdvantageInputs,
    AdvantageReport,
    ArchitectureComparison,
    SweepRange,
    TechProfile,
    VerificationResult,
    WorkloadSpec,
    _check_beta,
)

logger = logging.getLogger(__name__)

SweepRow = Tuple[float, float, float, float, float, bool]

SWEEP_HEADER = [
    "g_d[dimensionless]",
    "beta[dimensionless]",
    "r[dimensionless]",
    "gamma[dimensionless]",
    "bound[dimensionless]",
    "condition",
]


class AdvantageAnalyzer:
    """Energy advantage of colocating computation with its data.

    Gamma = (1 + G_d) / (1 + G_d * r^beta) with r = d_min / d, bounded below
    by G_d^((beta - 1) / 2) whenever G_d * r < 1.
    """

    RELATIVE_SLACK = 1e-12
    BOUNDARY_SHRINK = 1e-9
    DEFAULT_R_MIN = 1e-6

    def __init__(self, workers: Optional[int] = None):
        self.workers = config.WORKERS if workers is None else max(1, workers)

    @staticmethod
    def colocation_condition(inputs: AdvantageInputs) -> bool:
        return inputs.g_d * inputs.ratio < 1.0

    @staticmethod
    def advantage_factor(inputs: AdvantageInputs) -> float:
        return _gamma(inputs.g_d, inputs.ratio, inputs.beta)

    @staticmethod
    def advantage_lower_bound(g_d: float, beta: float) -> float:
        if g_d < 1:
            raise DomainError(f"G_d must be at least 1, got {g_d}")
        try:
            _check_beta(beta)
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
        return g_d ** ((beta - 1.0) / 2.0)

    def report(self, inputs: AdvantageInputs) -> AdvantageReport:
        gamma = self.advantage_factor(inputs)
        bound = self.advantage_lower_bound(inputs.g_d, inputs.beta)
        report = AdvantageReport(
            g_d=inputs.g_d,
            beta=inputs.beta,
            ratio=inputs.ratio,
            gamma=gamma,
            lower_bound=bound,
            condition_holds=self.colocation_condition(inputs),
            bound_satisfied=gamma >= bound * (1.0 - self.RELATIVE_SLACK),
        )
        logger.info(
            f"⚖️ G_d={inputs.g_d:g} r={inputs.ratio:g} beta={inputs.beta:g}: "
            f"gamma={gamma:.6g}, bound={bound:.6g}, condition={report.condition_holds}"
        )
        return report

    def proposition_grid(
        self,
        g_d_values: Sequence[float],
        n_r: int,
        r_min: float = DEFAULT_R_MIN,
    ) -> List[np.ndarray]:
        """Per-G_d logarithmic r grids from r_min up to just below 1/G_d."""
        grids = []
        for g_d in g_d_values:
            r_max = (1.0 / g_d) * (1.0 - self.BOUNDARY_SHRINK)
            low = min(r_min, r_max)
            grids.append(np.logspace(math.log10(low), math.log10(r_max), n_r))
        return grids

    def verify_proposition(
        self,
        g_d_values: Sequence[float],
        beta_values: Sequence[float],
        r_values: Optional[Sequence[float]] = None,
        n_r: int = 50,
        r_min: float = DEFAULT_R_MIN,
        keep_reports: bool = False,
    ) -> VerificationResult:
        """Checks gamma >= G_d^((beta-1)/2) on every grid point where
        G_d * r < 1. Points outside the condition are counted, not asserted.
        Violations are returned, never raised."""
        for beta in beta_values:
            try:
                _check_beta(beta)
            except ValueError as exc:
                raise DomainError(str(exc)) from exc
        if any(g < 1 for g in g_d_values):
            raise DomainError("every G_d in the grid must be at least 1")

        if r_values is None:
            r_grids = self.proposition_grid(g_d_values, n_r, r_min)
        else:
            shared = np.asarray(r_values, dtype=float)
            if np.any(shared <= 0) or np.any(shared > 1):
                raise DomainError("r values must lie in (0, 1]")
            r_grids = [shared] * len(g_d_values)

        logger.info(
            f"🔬 Verifying the colocation bound over "
            f"{sum(len(r) for r in r_grids) * len(beta_values)} grid points"
        )

        asserted = 0
        excluded = 0
        worst_margin = math.inf
        violations: List[AdvantageReport] = []
        reports: List[AdvantageReport] = []

        for g_d, r in zip(g_d_values, r_grids):
            for beta in beta_values:
                gamma = (1.0 + g_d) / (1.0 + g_d * r ** beta)
                bound = g_d ** ((beta - 1.0) / 2.0)
                condition = g_d * r < 1.0
                satisfied = gamma >= bound * (1.0 - self.RELATIVE_SLACK)
                asserted += int(np.count_nonzero(condition))
                excluded += int(np.count_nonzero(~condition))
                if np.any(condition):
                    worst_margin = min(worst_margin, float(np.min(gamma[condition] / bound)))
                bad = condition & ~satisfied
                selected = np.arange(len(r)) if keep_reports else np.flatnonzero(bad)
                for i in selected:
                    row = AdvantageReport(
                        g_d=float(g_d),
                        beta=float(beta),
                        ratio=float(r[i]),
                        gamma=float(gamma[i]),
                        lower_bound=float(bound),
                        condition_holds=bool(condition[i]),
                        bound_satisfied=bool(satisfied[i]),
                    )
                    if bad[i]:
                        violations.append(row)
                    if keep_reports:
                        reports.append(row)

        if violations:
            logger.warning(f"❌ {len(violations)} grid points violate the colocation bound")
        else:
            logger.info(f"✅ No violations over {asserted} asserted points ({excluded} excluded)")

        return VerificationResult(
            asserted=asserted,
            excluded=excluded,
            violations=violations,
            reports=reports,
            worst_margin=None if math.isinf(worst_margin) else worst_margin,
        )

    def sweep_rows(self, g_d: SweepRange, beta: SweepRange, r: SweepRange) -> List[SweepRow]:
        """Rows ordered G_d outer, beta middle, r inner."""
        g_values = g_d.values()
        beta_values = beta.values()
        r_values = r.values()
        if g_values[0] < 1:
            raise DomainError(f"G_d range must start at 1 or above, got {g_values[0]}")
        for value in beta_values:
            try:
                _check_beta(float(value))
            except ValueError as exc:
                raise DomainError(str(exc)) from exc
        if r_values[0] <= 0 or r_values[-1] > 1:
            raise DomainError("r range must lie in (0, 1]")

        def stripe(g: float) -> List[SweepRow]:
            rows = []
            for b in beta_values:
                bound = g ** ((b - 1.0) / 2.0)
                for ratio in r_values:
                    gamma = float(_gamma(g, ratio, b))
                    rows.append((float(g), float(b), float(ratio), gamma, float(bound), bool(g * ratio < 1.0)))
            return rows

        if self.workers == 1:
            stripes = [stripe(g) for g in g_values]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                stripes = list(pool.map(stripe, g_values))
        return [row for rows in stripes for row in rows]

    def sweep(self, g_d: SweepRange, beta: SweepRange, r: SweepRange, sink: TextIO) -> int:
        rows = self.sweep_rows(g_d, beta, r)
        write_csv(sink, SWEEP_HEADER, _sweep_cells(rows))
        logger.info(f"📈 Sweep wrote {len(rows)} rows")
        return len(rows)

    @staticmethod
    def compare_architectures(
        profile: TechProfile,
        workload: WorkloadSpec,
        d: float,
        d_min: float,
    ) -> ArchitectureComparison:
        if not 0 < d_min <= d:
            raise DomainError(f"need 0 < d_min <= d, got d_min={d_min}, d={d}")
        traditional = EnergyModel.total_energy(profile, workload, d)
        gravitational = EnergyModel.total_energy(profile, workload, d_min)
        if traditional.e_compute_total <= 0 or gravitational.e_total <= 0:
            raise DomainError("workload performs no operations; the advantage is undefined")
        g_d = traditional.e_move_total / traditional.e_compute_total
        ratio = d_min / d
        logger.info(
            f"🏗️ Traditional {EnergyModel.format_energy(traditional.e_total)} vs colocated "
            f"{EnergyModel.format_energy(gravitational.e_total)} (G_d={g_d:.4g})"
        )
        return ArchitectureComparison(
            traditional=traditional,
            gravitational=gravitational,
            g_d=g_d,
            ratio=ratio,
            gamma_measured=traditional.e_total / gravitational.e_total,
            gamma_formula=_gamma(g_d, ratio, profile.beta),
        )


def _gamma(g_d, r, beta):
    return (1.0 + g_d) / (1.0 + g_d * r ** beta)


def _sweep_cells(rows: List[SweepRow]) -> Iterator[list]:
    for g, b, r, gamma, bound, condition in rows:
        yield [g, b, r, gamma, bound, "true" if condition else "false"]
