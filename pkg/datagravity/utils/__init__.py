from .errors import DataGravityError, DomainError, ScenarioError, SingularityError, UsageError
from .scenario import Scenario, parse_scenario, dump_scenario
from .run_record import RunRecord
from .report_generator import ReportGenerator

__all__ = [
    "DataGravityError",
    "DomainError",
    "ScenarioError",
    "SingularityError",
    "UsageError",
    "Scenario",
    "parse_scenario",
    "dump_scenario",
    "RunRecord",
    "ReportGenerator"
]
