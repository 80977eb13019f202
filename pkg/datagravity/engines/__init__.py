from .energy_model import EnergyModel
from .gravity import GravityField
from .advantage import AdvantageAnalyzer
from .placement import PlacementOptimizer
from .catalog import MeasurementCatalog

__all__ = [
    "EnergyModel",
    "GravityField",
    "AdvantageAnalyzer",
    "PlacementOptimizer",
    "MeasurementCatalog"
]
