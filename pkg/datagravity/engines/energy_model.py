import logging
import math

from datagravity.utils.errors import DomainError
from datagravity.utils.types import EnergyBreakdown, TechProfile, WorkloadSpec

logger = logging.getLogger(__name__)


class EnergyModel:
    """Power-law data-movement energy E = alpha * N * d^beta, the
    operation-operand disjunction constant G_d and total-energy accounting.

    All energies are joules, all distances meters.
    """

    @staticmethod
    def movement_energy(profile: TechProfile, n_bits: float, d: float) -> float:
        if n_bits < 0:
            raise DomainError(f"bit count must be nonnegative, got {n_bits}")
        if d < 0:
            raise DomainError(f"distance must be nonnegative, got {d}")
        return profile.alpha * n_bits * d ** profile.beta

    @staticmethod
    def workload_bits(workload: WorkloadSpec) -> float:
        return workload.entropy_per_op * workload.op_rate * workload.duration

    @staticmethod
    def disjunction_constant(e_move_per_access: float, e_compute_per_op: float) -> float:
        if e_move_per_access <= 0 or e_compute_per_op <= 0:
            raise DomainError(
                f"energies must be positive, got move={e_move_per_access}, compute={e_compute_per_op}"
            )
        return e_move_per_access / e_compute_per_op

    @staticmethod
    def profile_disjunction(profile: TechProfile, per_bit: bool = False) -> float:
        bits = 1 if per_bit else profile.bits_per_access
        e_move = EnergyModel.movement_energy(profile, bits, profile.d_ref)
        return EnergyModel.disjunction_constant(e_move, profile.e_compute)

    @staticmethod
    def total_energy(profile: TechProfile, workload: WorkloadSpec, d: float) -> EnergyBreakdown:
        # One operation per access event.
        e_compute_total = profile.e_compute * workload.op_rate * workload.duration
        e_move_total = EnergyModel.movement_energy(profile, EnergyModel.workload_bits(workload), d)
        return EnergyBreakdown.of(e_compute_total, e_move_total)

    @staticmethod
    def balanced_separation(profile: TechProfile) -> float:
        return (profile.e_compute / (profile.alpha * profile.bits_per_access)) ** (1.0 / profile.beta)

    @staticmethod
    def balanced_separation_for_gd(g_d: float, beta: float, d_ref: float = 1.0) -> float:
        if g_d <= 0 or d_ref <= 0:
            raise DomainError(f"g_d and d_ref must be positive, got g_d={g_d}, d_ref={d_ref}")
        return d_ref * g_d ** (-1.0 / beta)

    @staticmethod
    def calibrated_profile(
        label: str,
        e_compute: float,
        e_move_per_access: float,
        d: float,
        beta: float,
        bits_per_access: int = 64,
        d_ref: float = 1.0,
    ) -> TechProfile:
        if e_move_per_access <= 0 or d <= 0:
            raise DomainError("calibration needs a positive access energy and distance")
        alpha = e_move_per_access / (bits_per_access * d ** beta)
        return TechProfile(
            label=label,
            e_compute=e_compute,
            alpha=alpha,
            beta=beta,
            d_ref=d_ref,
            bits_per_access=bits_per_access,
        )

    @staticmethod
    def profile_from_disjunction(
        label: str,
        g_d: float,
        e_compute: float,
        beta: float,
        d_ref: float = 1.0,
        bits_per_access: int = 64,
    ) -> TechProfile:
        return EnergyModel.calibrated_profile(
            label, e_compute, g_d * e_compute, d_ref, beta, bits_per_access, d_ref
        )

    @staticmethod
    def effective_disjunction(hit_rate: float, e_hit: float, e_miss: float, e_compute: float) -> float:
        if not 0.0 <= hit_rate <= 1.0:
            raise DomainError(f"hit rate must lie in [0, 1], got {hit_rate}")
        e_access = hit_rate * e_hit + (1.0 - hit_rate) * e_miss
        return EnergyModel.disjunction_constant(e_access, e_compute)

    @staticmethod
    def movement_ratio(profile_a: TechProfile, profile_b: TechProfile) -> float:
        if profile_a.beta != profile_b.beta:
            logger.warning(
                f"❌ Refusing to compare alpha of '{profile_a.label}' (beta={profile_a.beta}) "
                f"with '{profile_b.label}' (beta={profile_b.beta})"
            )
            raise DomainError(
                "alpha carries units of J/(bit*m^beta); profiles with different beta cannot be combined"
            )
        return profile_a.alpha / profile_b.alpha

    @staticmethod
    def format_energy(joules: float) -> str:
        if joules == 0 or not math.isfinite(joules):
            return f"{joules:g} J"
        if abs(joules) >= 1e-3:
            return f"{joules:.4g} J"
        if abs(joules) >= 1e-9:
            return f"{joules / 1e-9:.4g} nJ"
        if abs(joules) >= 1e-12:
            return f"{joules / 1e-12:.4g} pJ"
        return f"{joules / 1e-15:.4g} fJ"
