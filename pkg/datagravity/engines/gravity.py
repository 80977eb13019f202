"""Information mass and the data-gravity field.

The field of one object of mass M at r0, sampled at r, is

    G(r) = G_d * M * (r0 - r) / |r0 - r|^(beta + 1)

so its magnitude is G_d * M / |r - r0|^beta. The vector points from the sample
point toward the data object: resources are drawn toward high information
mass. The printed form with (r - r0) in the numerator points away from the
data; this module keeps the attractive sign. Field values are a relative
placement-preference strength, not a physical force.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from datagravity import config
from datagravity.utils.errors import DomainError, SingularityError
from datagravity.utils.types import DataObject, FieldSample, Region, Vector3, _check_beta

logger = logging.getLogger(__name__)


class GravityField:
    def __init__(self, epsilon_d: Optional[float] = None, workers: Optional[int] = None):
        self.epsilon_d = config.EPSILON_D if epsilon_d is None else epsilon_d
        self.workers = config.WORKERS if workers is None else max(1, workers)
        if self.epsilon_d <= 0:
            raise DomainError(f"epsilon_d must be positive, got {self.epsilon_d}")

    @staticmethod
    def information_mass(obj: DataObject) -> float:
        return obj.mass

    def field_at(
        self,
        objects: Sequence[DataObject],
        point: Vector3,
        g_d: float,
        beta: float,
    ) -> FieldSample:
        _check_domain(beta)
        positions, masses = _arrays(objects)
        points = np.asarray(point, dtype=float).reshape(1, 3)
        vectors, nearest, too_close = self._evaluate(points, positions, masses, g_d, beta)
        if too_close[0]:
            obj = objects[nearest[0]]
            distance = float(np.linalg.norm(np.asarray(obj.position) - points[0]))
            raise SingularityError(obj.id, distance, self.epsilon_d)
        return _sample(points[0], vectors[0])

    def sample_grid(
        self,
        objects: Sequence[DataObject],
        region: Region,
        resolution: Tuple[int, int, int],
        g_d: float,
        beta: float,
    ) -> List[FieldSample]:
        _check_domain(beta)
        points = grid_points(region, resolution)
        positions, masses = _arrays(objects)
        logger.info(f"🧲 Sampling field on {len(points)} points from {len(objects)} data objects")

        chunks = np.array_split(np.arange(len(points)), self.workers)
        if self.workers == 1:
            parts = [self._evaluate(points[idx], positions, masses, g_d, beta) for idx in chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                parts = list(
                    pool.map(lambda idx: self._evaluate(points[idx], positions, masses, g_d, beta), chunks)
                )

        samples: List[FieldSample] = []
        for idx, (vectors, nearest, too_close) in zip(chunks, parts):
            for row, point_index in enumerate(idx):
                point = points[point_index]
                if too_close[row]:
                    samples.append(
                        FieldSample(
                            point=tuple(point.tolist()),
                            singular=True,
                            singular_object=objects[nearest[row]].id,
                        )
                    )
                else:
                    samples.append(_sample(point, vectors[row]))
        singular = sum(1 for s in samples if s.singular)
        if singular:
            logger.warning(f"⚠️ {singular} grid points fall within epsilon_d of a data object")
        return samples

    def _evaluate(
        self,
        points: np.ndarray,
        positions: np.ndarray,
        masses: np.ndarray,
        g_d: float,
        beta: float,
    ):
        if len(positions) == 0:
            empty = np.zeros(len(points), dtype=bool)
            return np.zeros((len(points), 3)), np.zeros(len(points), dtype=int), empty
        # toward[p, o] points from sample p to object o
        toward = positions[None, :, :] - points[:, None, :]
        distance = np.linalg.norm(toward, axis=2)
        nearest = np.argmin(distance, axis=1)
        too_close = distance[np.arange(len(points)), nearest] < self.epsilon_d
        safe = np.where(distance < self.epsilon_d, 1.0, distance)
        weight = g_d * masses[None, :] / safe ** (beta + 1.0)
        weight = np.where(distance < self.epsilon_d, 0.0, weight)
        vectors = np.einsum("po,poc->pc", weight, toward)
        return vectors, nearest, too_close


def grid_points(region: Region, resolution: Tuple[int, int, int]) -> np.ndarray:
    """Row-major (x outermost, z innermost) sample points. An axis with
    resolution 1 is sampled at its mid-plane."""
    if len(resolution) != 3 or any(int(n) < 1 for n in resolution):
        raise DomainError(f"resolution needs three positive counts, got {tuple(resolution)}")
    if max(resolution) < 2:
        raise DomainError("at least one axis needs a resolution of 2 or more")
    axes = []
    for lo, hi, n in zip(region.lo, region.hi, resolution):
        axes.append(np.array([(lo + hi) / 2.0]) if n == 1 else np.linspace(lo, hi, int(n)))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _check_domain(beta: float) -> None:
    try:
        _check_beta(beta)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def _arrays(objects: Sequence[DataObject]):
    positions = np.array([obj.position for obj in objects], dtype=float).reshape(-1, 3)
    masses = np.array([obj.mass for obj in objects], dtype=float)
    return positions, masses


def _sample(point: np.ndarray, vector: np.ndarray) -> FieldSample:
    field = tuple(float(c) for c in vector)
    return FieldSample(
        point=tuple(float(c) for c in point),
        field=field,
        magnitude=math.hypot(*field),
    )
