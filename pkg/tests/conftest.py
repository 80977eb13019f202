import textwrap

import pytest

from datagravity.engines.advantage import AdvantageAnalyzer
from datagravity.engines.catalog import MeasurementCatalog
from datagravity.engines.energy_model import EnergyModel
from datagravity.engines.gravity import GravityField
from datagravity.engines.placement import PlacementOptimizer
from datagravity.utils.types import Region, TechProfile

EPSILON_D = 1e-9


@pytest.fixture
def unit_profile():
    return TechProfile(label="unit", e_compute=1.0, alpha=1.0, beta=2.0)


@pytest.fixture
def ddr5_profile():
    # a 64-bit access at 1 cm costs 1300 pJ, one FP32 operation 1.31 pJ
    return EnergyModel.calibrated_profile("ddr5", 1.31e-12, 1300e-12, 0.01, 2.0)


@pytest.fixture
def cube():
    return Region(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0))


@pytest.fixture
def field():
    return GravityField(epsilon_d=EPSILON_D, workers=1)


@pytest.fixture
def optimizer():
    return PlacementOptimizer(epsilon_d=EPSILON_D, workers=1)


@pytest.fixture
def analyzer():
    return AdvantageAnalyzer(workers=1)


@pytest.fixture
def catalog():
    return MeasurementCatalog()


@pytest.fixture
def write_scenario(tmp_path):
    def write(text: str, name: str = "scenario.yaml"):
        path = tmp_path / name
        path.write_text(textwrap.dedent(text).lstrip(), encoding="utf-8")
        return path

    return write


TWO_OBJECT_SCENARIO = """
version: 1
profile:
  label: line
  e_compute_pj: 1.0
  alpha: 1.0
  beta: 2.0
objects:
  - id: left
    position: [0.0, 0.0, 0.0]
    entropy_per_access: 1
    access_frequency: 1
  - id: right
    position: [4.0, 0.0, 0.0]
    entropy_per_access: 1
    access_frequency: 3
kernels:
  - id: join
    traffic: {left: 1.0, right: 3.0}
region:
  lo: [-1.0, -1.0, -1.0]
  hi: [5.0, 1.0, 1.0]
slots:
  - [1.0, 0.0, 0.0]
  - [3.0, 0.0, 0.0]
"""


@pytest.fixture
def two_object_scenario(write_scenario):
    return write_scenario(TWO_OBJECT_SCENARIO)
