import numpy as np
import pytest

from datagravity.engines.placement import (
    OptimizerConfig,
    PlacementOptimizer,
    assignment_cost,
    brute_force_assignment,
    exhaustive_assignment,
    greedy_swap_assignment,
)
from datagravity.utils.errors import DomainError
from datagravity.utils.types import (
    ComputeKernel,
    DataObject,
    KernelStatus,
    PlacementMode,
    PlacementProblem,
    Region,
    TechProfile,
)

WIDE = Region(lo=(-5.0, -5.0, -5.0), hi=(5.0, 5.0, 5.0))


def make_problem(objects, kernels, beta=2.0, alpha=1.0, region=WIDE, slots=None):
    return PlacementProblem(
        objects=[
            DataObject(id=oid, position=pos, entropy_per_access=1.0, access_frequency=1.0)
            for oid, pos in objects.items()
        ],
        kernels=[ComputeKernel(id=kid, traffic=traffic) for kid, traffic in kernels.items()],
        profile=TechProfile(label="test", e_compute=1.0, alpha=alpha, beta=beta),
        region=region,
        slots=slots,
    )


def centroids(problem):
    traffic = problem.traffic_matrix()
    return (traffic @ problem.object_positions()) / traffic.sum(axis=1, keepdims=True)


# objective and gradient


def test_objective_examples(optimizer):
    problem = make_problem({"o": (0.0, 0.0, 0.0)}, {"k": {"o": 1.0}})
    assert optimizer.objective_energy(problem, [(3.0, 0.0, 0.0)]) == pytest.approx(9.0, rel=1e-12)
    assert optimizer.objective_energy(problem, [(0.0, 0.0, 0.0)]) == pytest.approx(1e-18, rel=1e-12)


def test_objective_without_traffic_is_zero(optimizer):
    problem = make_problem({"o": (0.0, 0.0, 0.0)}, {"idle": {}})
    assert optimizer.objective_energy(problem, [(1.0, 2.0, 3.0)]) == 0.0


def test_objective_rejects_wrong_position_count(optimizer):
    problem = make_problem({"o": (0.0, 0.0, 0.0)}, {"k": {"o": 1.0}})
    with pytest.raises(DomainError):
        optimizer.objective_energy(problem, [(1.0, 0.0, 0.0), (2.0, 0.0, 0.0)])


def test_gradient_single_object_quadratic(optimizer):
    problem = make_problem({"o": (0.0, 0.0, 0.0)}, {"k": {"o": 5.0}})
    gradient = optimizer.objective_gradient(problem, [(1.0, 2.0, 3.0)])
    assert gradient[0] == pytest.approx([10.0, 20.0, 30.0], rel=1e-12)


def test_gradient_vanishes_at_symmetric_midpoint(optimizer):
    problem = make_problem(
        {"a": (-1.0, 0.0, 0.0), "b": (1.0, 0.0, 0.0)},
        {"k": {"a": 2.0, "b": 2.0}},
        beta=2.5,
    )
    gradient = optimizer.objective_gradient(problem, [(0.0, 0.0, 0.0)])
    assert np.linalg.norm(gradient) < 1e-10


def test_gradient_points_away_from_single_object(optimizer):
    problem = make_problem({"o": (0.5, -0.5, 1.0)}, {"k": {"o": 3.0}}, beta=1.7)
    offset = np.array([0.3, 0.4, -1.2])
    gradient = optimizer.objective_gradient(problem, [tuple(np.array((0.5, -0.5, 1.0)) + offset)])[0]
    assert np.linalg.norm(np.cross(gradient, offset)) < 1e-12 * np.linalg.norm(gradient)
    assert np.dot(gradient, offset) > 0


@pytest.mark.parametrize("seed", range(100))
def test_gradient_matches_central_differences(optimizer, seed):
    rng = np.random.default_rng(seed + 1000)
    problem = PlacementOptimizer.random_problem(seed, n_objects=5, n_kernels=3, beta=float(rng.uniform(1.5, 3.0)))
    positions = rng.uniform(0.0, 1.0, (3, 3))
    analytic = optimizer.objective_gradient(problem, positions)

    h = 1e-6 * problem.region.diagonal
    numeric = np.zeros_like(positions)
    for k in range(3):
        for c in range(3):
            up = positions.copy()
            down = positions.copy()
            up[k, c] += h
            down[k, c] -= h
            numeric[k, c] = (
                optimizer.objective_energy(problem, up) - optimizer.objective_energy(problem, down)
            ) / (2 * h)
    assert np.max(np.abs(numeric - analytic)) <= 1e-4 * np.max(np.abs(analytic))


# continuous placement


@pytest.mark.parametrize("seed", range(100))
def test_quadratic_law_places_kernels_at_traffic_centroid(optimizer, seed):
    problem = PlacementOptimizer.random_problem(seed, beta=2.0)
    solution = optimizer.optimize_continuous(problem)
    expected = centroids(problem)
    for kernel, target in zip(problem.kernels, expected):
        assert np.linalg.norm(np.array(solution.positions[kernel.id]) - target) < 1e-6


def test_two_objects_quadratic_optimum(optimizer):
    problem = make_problem(
        {"left": (0.0, 0.0, 0.0), "right": (4.0, 0.0, 0.0)},
        {"join": {"left": 1.0, "right": 3.0}},
    )
    solution = optimizer.optimize_continuous(problem)
    assert solution.positions["join"] == pytest.approx((3.0, 0.0, 0.0), abs=1e-6)
    assert solution.converged

    line = np.arange(0.0, 4.0005, 1e-3)
    energies = [optimizer.objective_energy(problem, [(x, 0.0, 0.0)]) for x in line]
    assert line[int(np.argmin(energies))] == pytest.approx(3.0, abs=1e-3)


def test_near_linear_law_pulls_to_heavier_object(optimizer):
    problem = make_problem(
        {"left": (0.0, 0.0, 0.0), "right": (4.0, 0.0, 0.0)},
        {"join": {"left": 1.0, "right": 3.0}},
        beta=1.01,
    )
    solution = optimizer.optimize_continuous(problem)
    assert abs(solution.positions["join"][0] - 4.0) < 0.05


def test_single_object_attracts_kernel(optimizer):
    problem = make_problem({"o": (1.0, -2.0, 0.5)}, {"k": {"o": 7.0}}, beta=2.5)
    solution = optimizer.optimize_continuous(problem)
    assert np.linalg.norm(np.array(solution.positions["k"]) - np.array((1.0, -2.0, 0.5))) < 1e-6


def test_kernel_without_traffic_is_unplaced(optimizer):
    problem = make_problem({"o": (0.0, 0.0, 0.0)}, {"busy": {"o": 1.0}, "idle": {"o": 0.0}})
    solution = optimizer.optimize_continuous(problem)
    assert solution.statuses["idle"] == KernelStatus.UNPLACED
    assert solution.positions["idle"] is None
    assert solution.statuses["busy"] == KernelStatus.PLACED


def test_initial_position_is_honoured(optimizer):
    problem = PlacementProblem(
        objects=[DataObject(id="o", position=(1.0, 1.0, 1.0), entropy_per_access=1, access_frequency=1)],
        kernels=[ComputeKernel(id="k", traffic={"o": 1.0}, position=(-4.0, -4.0, -4.0))],
        profile=TechProfile(label="test", e_compute=1.0, alpha=1.0, beta=2.0),
        region=WIDE,
    )
    solution = optimizer.optimize_continuous(problem)
    assert solution.history[0] == pytest.approx(75.0, rel=1e-12)
    assert solution.positions["k"] == pytest.approx((1.0, 1.0, 1.0), abs=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_objective_history_is_nonincreasing(optimizer, seed):
    problem = PlacementOptimizer.random_problem(seed, n_objects=6, n_kernels=4, beta=2.7)
    solution = optimizer.optimize_continuous(problem)
    assert all(b <= a for a, b in zip(solution.history, solution.history[1:]))
    assert solution.objective == pytest.approx(
        optimizer.objective_energy(problem, solution.positions), rel=1e-9
    )


def test_gradient_step_rule_also_descends(optimizer):
    problem = PlacementOptimizer.random_problem(5, beta=2.0)
    solution = optimizer.optimize_continuous(problem, OptimizerConfig(step_rule="gradient", max_iters=200))
    assert all(b <= a for a, b in zip(solution.history, solution.history[1:]))
    assert solution.history[-1] < solution.history[0]


@pytest.mark.parametrize("seed", range(10))
def test_translation_moves_optimum_with_data(optimizer, seed):
    offset = (0.25, -1.5, 3.0)
    problem = PlacementOptimizer.random_problem(seed, beta=2.0)
    base = optimizer.optimize_continuous(problem)
    moved = optimizer.optimize_continuous(problem.translated(offset))
    for kernel in problem.kernels:
        expected = np.array(base.positions[kernel.id]) + np.array(offset)
        assert np.linalg.norm(np.array(moved.positions[kernel.id]) - expected) < 1e-9


def test_continuous_result_is_independent_of_workers():
    problem = PlacementOptimizer.random_problem(3, n_objects=8, n_kernels=6, beta=2.4)
    sequential = PlacementOptimizer(epsilon_d=1e-9, workers=1).optimize_continuous(problem)
    parallel = PlacementOptimizer(epsilon_d=1e-9, workers=4).optimize_continuous(problem)
    assert sequential.positions == parallel.positions
    assert sequential.history == parallel.history


def test_seed_is_recorded_and_validated(optimizer):
    problem = PlacementOptimizer.random_problem(42)
    assert optimizer.optimize(problem, seed=42).seed == 42
    with pytest.raises(DomainError):
        optimizer.optimize(problem, seed=-1)


def test_random_problem_is_reproducible():
    assert PlacementOptimizer.random_problem(9, n_slots=4) == PlacementOptimizer.random_problem(9, n_slots=4)
    assert PlacementOptimizer.random_problem(9) != PlacementOptimizer.random_problem(10)


# discrete placement


def test_discrete_prefers_nearer_slot(optimizer):
    problem = make_problem(
        {"o": (0.0, 0.0, 0.0)},
        {"k": {"o": 1.0}},
        slots=[(2.0, 0.0, 0.0), (1.0, 0.0, 0.0)],
    )
    costs = optimizer.cost_matrix(problem)
    assert costs[0, 0] / costs[0, 1] == pytest.approx(4.0, rel=1e-12)

    solution = optimizer.optimize(problem, PlacementMode.DISCRETE)
    assert solution.slot_assignment == {"k": 1}
    assert solution.positions["k"] == (1.0, 0.0, 0.0)
    assert solution.objective == pytest.approx(1.0, rel=1e-12)


def test_discrete_ties_go_to_lowest_index(optimizer):
    problem = make_problem(
        {"o": (0.0, 0.0, 0.0)},
        {"k0": {"o": 1.0}, "k1": {"o": 1.0}},
        slots=[(-1.0, 0.0, 0.0), (1.0, 0.0, 0.0)],
    )
    first = optimizer.optimize_discrete(problem)
    second = optimizer.optimize_discrete(problem)
    assert first.slot_assignment == {"k0": 0, "k1": 1}
    assert second == first


def test_discrete_infeasible(optimizer):
    problem = make_problem(
        {"o": (0.0, 0.0, 0.0)},
        {"k0": {"o": 1.0}, "k1": {"o": 1.0}},
        slots=[(1.0, 0.0, 0.0)],
    )
    with pytest.raises(DomainError):
        optimizer.optimize_discrete(problem)


def test_discrete_leaves_idle_kernel_unplaced(optimizer):
    problem = make_problem(
        {"o": (0.0, 0.0, 0.0)},
        {"busy": {"o": 1.0}, "idle": {}},
        slots=[(1.0, 0.0, 0.0), (2.0, 0.0, 0.0)],
    )
    solution = optimizer.optimize_discrete(problem)
    assert solution.slot_assignment == {"busy": 0}
    assert solution.statuses["idle"] == KernelStatus.UNPLACED


@pytest.mark.parametrize("shape", [(1, 1), (2, 3), (3, 5), (4, 6), (5, 7), (6, 7), (3, 12), (8, 9)])
def test_exhaustive_matches_brute_force(shape):
    rng = np.random.default_rng(sum(shape))
    for _ in range(3):
        costs = rng.uniform(0.0, 1.0, shape)
        exact, _ = exhaustive_assignment(costs)
        assert exact == brute_force_assignment(costs)


@pytest.mark.parametrize("seed", range(5))
def test_exhaustive_matches_brute_force_on_placement_costs(optimizer, seed):
    problem = PlacementOptimizer.random_problem(seed, n_objects=5, n_kernels=4, n_slots=7, beta=2.3)
    costs = optimizer.cost_matrix(problem)
    exact, _ = exhaustive_assignment(costs)
    assert assignment_cost(costs, exact) == assignment_cost(costs, brute_force_assignment(costs))


def test_greedy_swap_close_to_exhaustive(optimizer):
    matches = 0
    worst = 1.0
    for seed in range(1000):
        problem = PlacementOptimizer.random_problem(seed, n_objects=4, n_kernels=3, n_slots=5)
        costs = optimizer.cost_matrix(problem)
        totals = problem.traffic_matrix().sum(axis=1)
        exact = assignment_cost(costs, exhaustive_assignment(costs)[0])
        greedy = assignment_cost(costs, greedy_swap_assignment(costs, totals)[0])
        assert greedy >= exact * (1 - 1e-12)
        if greedy <= exact * (1 + 1e-12):
            matches += 1
        worst = max(worst, greedy / exact)
    assert matches >= 950
    assert worst <= 1.10


def test_greedy_swap_finds_three_kernel_rotation():
    # greedy lands on (0, 1, 2) and no pairwise swap helps; the optimum rotates all three
    costs = np.array([[1.0, 1.5, 20.0], [9.0, 1.0, 1.2], [0.0, 20.0, 10.0]])
    assignment, _ = greedy_swap_assignment(costs, [1.0, 1.0, 1.0])
    assert assignment == (1, 2, 0)
    assert assignment == brute_force_assignment(costs)


def test_greedy_swap_follows_ejection_chain_through_free_slot(optimizer):
    problem = PlacementOptimizer.random_problem(811, n_objects=4, n_kernels=3, n_slots=5)
    costs = optimizer.cost_matrix(problem)
    totals = problem.traffic_matrix().sum(axis=1)
    greedy, _ = greedy_swap_assignment(costs, totals)
    exact, _ = exhaustive_assignment(costs)
    assert assignment_cost(costs, greedy) == pytest.approx(assignment_cost(costs, exact), rel=1e-12)


def test_large_instances_use_local_search(optimizer):
    problem = PlacementOptimizer.random_problem(1, n_objects=5, n_kernels=10, n_slots=14)
    solution = optimizer.optimize_discrete(problem)
    assigned = list(solution.slot_assignment.values())
    assert len(assigned) == 10
    assert len(set(assigned)) == 10
    assert all(status == KernelStatus.PLACED for status in solution.statuses.values())
    assert solution.objective == pytest.approx(
        optimizer.objective_energy(problem, solution.positions), rel=1e-12
    )
