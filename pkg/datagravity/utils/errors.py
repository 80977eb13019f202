from typing import Optional


class DataGravityError(Exception):
    pass


class DomainError(DataGravityError, ValueError):
    pass


class SingularityError(DomainError):
    def __init__(self, object_id: str, distance: float, epsilon_d: float):
        self.object_id = object_id
        self.distance = distance
        self.epsilon_d = epsilon_d
        super().__init__(
            f"Point lies {distance:.3e} m from data object '{object_id}', "
            f"inside the singularity guard of {epsilon_d:.3e} m"
        )


class ScenarioError(DomainError):
    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = ""
        if key is not None:
            location += f" [key '{key}'"
            location += f", line {line}]" if line is not None else "]"
        super().__init__(f"{message}{location}")


class UsageError(DataGravityError):
    pass
