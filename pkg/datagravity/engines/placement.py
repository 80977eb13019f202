"""Compute placement under the movement-energy law.

Kernels trade bits with fixed data objects and are positioned to minimize

    E = sum_k sum_o alpha * N_ko * |x_k - p_o|^beta

There are no kernel-kernel terms, so every kernel is an independent convex
problem (beta >= 1) and is solved on its own. Distances below epsilon_d are
clamped to epsilon_d in both the objective and the gradient.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import Field
from scipy.spatial.distance import cdist

from datagravity import config
from datagravity.utils.errors import DomainError
from datagravity.utils.types import (
    ComputeKernel,
    DataObject,
    FrozenModel,
    KernelStatus,
    PlacementMode,
    PlacementProblem,
    PlacementSolution,
    Region,
    TechProfile,
    Vector3,
)

logger = logging.getLogger(__name__)

Positions = Union[np.ndarray, Sequence[Vector3], Mapping[str, Optional[Vector3]]]

MAX_SEED = 2 ** 64


class OptimizerConfig(FrozenModel):
    max_iters: int = Field(default=10000, ge=1)
    # None selects 1e-9 * alpha * beta * sum(N) * diag^(beta - 1) per kernel
    tol: Optional[float] = Field(default=None, gt=0)
    step_rule: Literal["backtracking", "gradient"] = "backtracking"


class PlacementOptimizer:
    EXHAUSTIVE_MAX_KERNELS = 8
    EXHAUSTIVE_MAX_SLOTS = 12
    POSITION_TOL = 1e-12
    GRADIENT_TOL_SCALE = 1e-9

    def __init__(self, epsilon_d: Optional[float] = None, workers: Optional[int] = None):
        self.epsilon_d = config.EPSILON_D if epsilon_d is None else epsilon_d
        self.workers = config.WORKERS if workers is None else max(1, workers)
        if self.epsilon_d <= 0:
            raise DomainError(f"epsilon_d must be positive, got {self.epsilon_d}")

    def objective_energy(self, problem: PlacementProblem, positions: Positions) -> float:
        pos = self._positions_array(problem, positions)
        traffic = problem.traffic_matrix()
        if traffic.size == 0:
            return 0.0
        distance = np.maximum(cdist(pos, problem.object_positions()), self.epsilon_d)
        return float(problem.profile.alpha * np.sum(traffic * distance ** problem.profile.beta))

    def objective_gradient(self, problem: PlacementProblem, positions: Positions) -> np.ndarray:
        pos = self._positions_array(problem, positions)
        traffic = problem.traffic_matrix()
        if traffic.size == 0:
            return np.zeros_like(pos)
        alpha, beta = problem.profile.alpha, problem.profile.beta
        diff = pos[:, None, :] - problem.object_positions()[None, :, :]
        distance = np.maximum(np.linalg.norm(diff, axis=2), self.epsilon_d)
        coef = alpha * beta * traffic * distance ** (beta - 2.0)
        return np.einsum("ko,koc->kc", coef, diff)

    def cost_matrix(self, problem: PlacementProblem) -> np.ndarray:
        """Energy of each kernel at each slot, shape (kernels, slots)."""
        slots = problem.slot_positions()
        traffic = problem.traffic_matrix()
        if traffic.size == 0 or len(slots) == 0:
            return np.zeros((len(problem.kernels), len(slots)))
        distance = np.maximum(cdist(slots, problem.object_positions()), self.epsilon_d)
        return problem.profile.alpha * traffic @ (distance ** problem.profile.beta).T

    def optimize_continuous(
        self,
        problem: PlacementProblem,
        settings: Optional[OptimizerConfig] = None,
        seed: Optional[int] = None,
    ) -> PlacementSolution:
        settings = settings or OptimizerConfig()
        objects = problem.object_positions()
        traffic = problem.traffic_matrix()
        logger.info(
            f"🧭 Continuous placement of {len(problem.kernels)} kernels "
            f"against {len(problem.objects)} data objects (beta={problem.profile.beta:g})"
        )

        def solve(k: int):
            kernel = problem.kernels[k]
            if not np.any(traffic[k] > 0):
                logger.warning(f"⚠️ Kernel '{kernel.id}' moves no data; leaving it unplaced")
                return None
            start = np.asarray(kernel.position if kernel.position is not None else problem.region.center, dtype=float)
            return self._descend(problem.profile, traffic[k], objects, start, problem.region, settings)

        if self.workers == 1:
            results = [solve(k) for k in range(len(problem.kernels))]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(solve, range(len(problem.kernels))))

        positions: Dict[str, Optional[Vector3]] = {}
        statuses: Dict[str, KernelStatus] = {}
        histories: List[List[float]] = []
        iterations = 0
        converged = True
        for kernel, result in zip(problem.kernels, results):
            if result is None:
                positions[kernel.id] = None
                statuses[kernel.id] = KernelStatus.UNPLACED
                continue
            x, history, kernel_iterations, kernel_converged = result
            positions[kernel.id] = tuple(float(c) for c in x)
            statuses[kernel.id] = KernelStatus.PLACED
            histories.append(history)
            iterations += kernel_iterations
            converged = converged and kernel_converged

        solution = PlacementSolution(
            mode=PlacementMode.CONTINUOUS,
            positions=positions,
            statuses=statuses,
            objective=self.objective_energy(problem, positions),
            iterations=iterations,
            converged=converged,
            seed=_check_seed(seed),
            history=_merge_histories(histories),
        )
        logger.info(
            f"✅ Continuous placement finished: objective={solution.objective:.6g} J, "
            f"iterations={iterations}, converged={converged}"
        )
        return solution

    def _descend(
        self,
        profile: TechProfile,
        weights: np.ndarray,
        objects: np.ndarray,
        start: np.ndarray,
        region: Region,
        settings: OptimizerConfig,
    ) -> Tuple[np.ndarray, List[float], int, bool]:
        alpha, beta = profile.alpha, profile.beta
        diagonal = region.diagonal
        max_step = diagonal / 10.0
        tol = settings.tol
        if tol is None:
            tol = self.GRADIENT_TOL_SCALE * alpha * beta * math.fsum(weights) * diagonal ** (beta - 1.0)

        def energy(x: np.ndarray) -> float:
            distance = np.maximum(np.linalg.norm(objects - x, axis=1), self.epsilon_d)
            return float(alpha * np.dot(weights, distance ** beta))

        x = region.clip(start)
        f = energy(x)
        history = [f]
        converged = False
        iterations = 0
        while iterations < settings.max_iters:
            iterations += 1
            diff = x - objects
            distance = np.maximum(np.linalg.norm(diff, axis=1), self.epsilon_d)
            coef = alpha * beta * weights * distance ** (beta - 2.0)
            gradient = coef @ diff
            if np.linalg.norm(gradient) < tol:
                converged = True
                break

            if settings.step_rule == "backtracking":
                # curvature-weighted step: the generalized Weiszfeld point
                direction = (coef @ objects) / coef.sum() - x
                step = min(max_step, float(np.linalg.norm(direction)))
            else:
                direction = -gradient
                step = max_step
            length = float(np.linalg.norm(direction))
            if length == 0.0:
                converged = True
                break
            unit = direction / length

            accepted = False
            while step >= self.POSITION_TOL:
                candidate = region.clip(x + step * unit)
                f_candidate = energy(candidate)
                if f_candidate < f:
                    accepted = True
                    break
                step /= 2.0
            if not accepted:
                converged = True
                break

            moved = float(np.linalg.norm(candidate - x))
            x, f = candidate, f_candidate
            history.append(f)
            if moved < self.POSITION_TOL:
                converged = True
                break
        return x, history, iterations, converged

    def optimize_discrete(
        self,
        problem: PlacementProblem,
        settings: Optional[OptimizerConfig] = None,
        seed: Optional[int] = None,
    ) -> PlacementSolution:
        slots = problem.slot_positions()
        if len(slots) < len(problem.kernels):
            raise DomainError(
                f"infeasible placement: {len(problem.kernels)} kernels but only {len(slots)} slots"
            )
        traffic = problem.traffic_matrix()
        active = [k for k in range(len(problem.kernels)) if np.any(traffic[k] > 0)]
        costs = self.cost_matrix(problem)[active] if active else np.zeros((0, len(slots)))

        if len(active) <= self.EXHAUSTIVE_MAX_KERNELS and len(slots) <= self.EXHAUSTIVE_MAX_SLOTS:
            logger.info(f"🔎 Exhaustive slot search: {len(active)} kernels x {len(slots)} slots")
            assignment, iterations = exhaustive_assignment(costs)
        else:
            logger.info(f"🪜 Greedy slot insertion with swap search: {len(active)} kernels x {len(slots)} slots")
            totals = [math.fsum(traffic[k]) for k in active]
            assignment, iterations = greedy_swap_assignment(costs, totals)

        positions: Dict[str, Optional[Vector3]] = {}
        statuses: Dict[str, KernelStatus] = {}
        slot_assignment: Dict[str, int] = {}
        slot_of = dict(zip(active, assignment))
        for k, kernel in enumerate(problem.kernels):
            if k in slot_of:
                slot = slot_of[k]
                positions[kernel.id] = tuple(float(c) for c in slots[slot])
                statuses[kernel.id] = KernelStatus.PLACED
                slot_assignment[kernel.id] = int(slot)
            else:
                logger.warning(f"⚠️ Kernel '{kernel.id}' moves no data; leaving it unplaced")
                positions[kernel.id] = None
                statuses[kernel.id] = KernelStatus.UNPLACED

        return PlacementSolution(
            mode=PlacementMode.DISCRETE,
            positions=positions,
            statuses=statuses,
            slot_assignment=slot_assignment,
            objective=self.objective_energy(problem, positions),
            iterations=iterations,
            converged=True,
            seed=_check_seed(seed),
            history=[assignment_cost(costs, assignment)],
        )

    def optimize(
        self,
        problem: PlacementProblem,
        mode: PlacementMode = PlacementMode.CONTINUOUS,
        settings: Optional[OptimizerConfig] = None,
        seed: Optional[int] = None,
    ) -> PlacementSolution:
        if PlacementMode(mode) == PlacementMode.DISCRETE:
            return self.optimize_discrete(problem, settings, seed)
        return self.optimize_continuous(problem, settings, seed)

    def _positions_array(self, problem: PlacementProblem, positions: Positions) -> np.ndarray:
        if isinstance(positions, Mapping):
            center = tuple(problem.region.center)
            rows = []
            for kernel in problem.kernels:
                if kernel.id not in positions:
                    raise DomainError(f"no candidate position for kernel '{kernel.id}'")
                point = positions[kernel.id]
                if point is None:
                    if kernel.total_traffic > 0:
                        raise DomainError(f"kernel '{kernel.id}' has traffic but no position")
                    point = center
                rows.append(point)
            pos = np.array(rows, dtype=float).reshape(-1, 3)
        else:
            pos = np.asarray(positions, dtype=float).reshape(-1, 3)
        if len(pos) != len(problem.kernels):
            raise DomainError(f"expected {len(problem.kernels)} kernel positions, got {len(pos)}")
        if not np.all(np.isfinite(pos)):
            raise DomainError("candidate positions must be finite")
        return pos

    @staticmethod
    def random_problem(
        seed: int,
        n_objects: int = 4,
        n_kernels: int = 3,
        n_slots: int = 0,
        beta: float = 2.0,
        alpha: float = 1e-12,
        e_compute: float = 1e-12,
    ) -> PlacementProblem:
        """Seeded random instance inside the unit cube."""
        _check_seed(seed)
        if n_objects < 1:
            raise DomainError("a random instance needs at least one data object")
        rng = np.random.default_rng(seed)
        objects = [
            DataObject(
                id=f"d{i}",
                position=tuple(float(c) for c in rng.uniform(0.0, 1.0, 3)),
                entropy_per_access=64.0,
                access_frequency=float(rng.uniform(1e5, 1e7)),
            )
            for i in range(n_objects)
        ]
        kernels = []
        for k in range(n_kernels):
            bits = rng.integers(1, 1000, n_objects).astype(float)
            mask = rng.random(n_objects) < 0.7
            mask[rng.integers(0, n_objects)] = True
            traffic = {obj.id: float(b) for obj, b, keep in zip(objects, bits, mask) if keep}
            kernels.append(ComputeKernel(id=f"k{k}", traffic=traffic))
        slots = [tuple(float(c) for c in rng.uniform(0.0, 1.0, 3)) for _ in range(n_slots)]
        return PlacementProblem(
            objects=objects,
            kernels=kernels,
            profile=TechProfile(label=f"random-{seed}", e_compute=e_compute, alpha=alpha, beta=beta),
            region=Region(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0)),
            slots=slots or None,
        )


def assignment_cost(costs: np.ndarray, assignment: Sequence[int]) -> float:
    return math.fsum(float(costs[k, s]) for k, s in enumerate(assignment))


def exhaustive_assignment(costs: np.ndarray) -> Tuple[Tuple[int, ...], int]:
    """Global optimum by depth-first branch and bound in lexicographic
    (kernel, slot) order; among exact ties the lowest-index assignment wins."""
    n_kernels, n_slots = costs.shape
    if n_kernels == 0:
        return (), 0
    row_min = costs.min(axis=1)
    remaining = np.concatenate([np.cumsum(row_min[::-1])[::-1], [0.0]])
    best_cost = math.inf
    best: Tuple[int, ...] = ()
    current = [0] * n_kernels
    used = [False] * n_slots
    visited = 0

    def search(k: int, partial: float) -> None:
        nonlocal best_cost, best, visited
        visited += 1
        if k == n_kernels:
            cost = assignment_cost(costs, current)
            if cost < best_cost:
                best_cost = cost
                best = tuple(current)
            return
        for s in range(n_slots):
            if used[s]:
                continue
            bound = partial + costs[k, s] + remaining[k + 1]
            if bound > best_cost * (1.0 + 1e-9):
                continue
            used[s] = True
            current[k] = s
            search(k + 1, partial + costs[k, s])
            used[s] = False

    search(0, 0.0)
    return best, visited


def brute_force_assignment(costs: np.ndarray) -> Tuple[int, ...]:
    """Reference enumeration of every injective assignment."""
    n_kernels, n_slots = costs.shape
    best_cost = math.inf
    best: Tuple[int, ...] = ()
    for candidate in itertools.permutations(range(n_slots), n_kernels):
        cost = assignment_cost(costs, candidate)
        if cost < best_cost:
            best_cost = cost
            best = candidate
    return best


def greedy_swap_assignment(costs: np.ndarray, totals: Sequence[float]) -> Tuple[Tuple[int, ...], int]:
    """Greedy best-slot insertion by descending traffic, then pairwise swaps,
    moves into free slots and two-kernel shift chains; once those stall, the best
    re-seating of any three kernels. Stops when nothing lowers the energy."""
    n_kernels, n_slots = costs.shape
    order = sorted(range(n_kernels), key=lambda k: (-totals[k], k))
    assignment = [-1] * n_kernels
    free = set(range(n_slots))
    for k in order:
        slot = min(free, key=lambda s: (costs[k, s], s))
        assignment[k] = slot
        free.remove(slot)

    scale = float(np.max(np.abs(costs))) if costs.size else 0.0
    threshold = 1e-12 * scale
    passes = 0
    improved = True
    while improved:
        improved = False
        passes += 1
        for i in range(n_kernels):
            for j in range(i + 1, n_kernels):
                a, b = assignment[i], assignment[j]
                delta = (costs[i, b] + costs[j, a]) - (costs[i, a] + costs[j, b])
                if delta < -threshold:
                    assignment[i], assignment[j] = b, a
                    improved = True
            for s in sorted(free):
                a = assignment[i]
                if costs[i, s] - costs[i, a] < -threshold:
                    free.remove(s)
                    free.add(a)
                    assignment[i] = s
                    improved = True
            # chain: i moves to a free slot and another kernel takes i's old one
            for s in sorted(free):
                a = assignment[i]
                for j in range(n_kernels):
                    if j == i:
                        continue
                    b = assignment[j]
                    delta = (costs[i, s] - costs[i, a]) + (costs[j, a] - costs[j, b])
                    if delta < -threshold:
                        free.remove(s)
                        free.add(b)
                        assignment[i], assignment[j] = s, a
                        improved = True
                        break
        if not improved:
            improved = _reseat_triples(costs, assignment, free, threshold)
    return tuple(assignment), passes


def _reseat_triples(costs: np.ndarray, assignment: List[int], free: set, threshold: float) -> bool:
    """Best re-seating of any three kernels over their own slots and each one's
    two cheapest free slots. Covers three-kernel rotations and ejection chains.
    Applies the first improving group and reports whether one was found."""
    spare_count = 2
    for group in itertools.combinations(range(len(assignment)), 3):
        own = [assignment[k] for k in group]
        candidates = set(own)
        for k in group:
            candidates.update(sorted(free, key=lambda s: (costs[k, s], s))[:spare_count])
        current = math.fsum(costs[k, s] for k, s in zip(group, own))
        best, best_seats = current - threshold, None
        for seats in itertools.permutations(sorted(candidates), 3):
            cost = math.fsum(costs[k, s] for k, s in zip(group, seats))
            if cost < best:
                best, best_seats = cost, seats
        if best_seats is not None:
            free.update(own)
            free.difference_update(best_seats)
            for k, s in zip(group, best_seats):
                assignment[k] = s
            return True
    return False


def _merge_histories(histories: List[List[float]]) -> List[float]:
    if not histories:
        return [0.0]
    length = max(len(h) for h in histories)
    padded = [h + [h[-1]] * (length - len(h)) for h in histories]
    return [math.fsum(values) for values in zip(*padded)]


def _check_seed(seed: Optional[int]) -> Optional[int]:
    if seed is not None and not 0 <= seed < MAX_SEED:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed
