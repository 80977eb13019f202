"""Scenario files: one technology profile, the data objects it serves and,
optionally, the kernels, region and slots of a placement problem.

    version: 1
    profile:
      label: ddr5-7nm
      e_compute_pj: 1.31
      alpha: 2.03e-11       # J / (bit * m^beta)
      beta: 2.0
      d_ref_m: 1.0
      bits_per_access: 64
    objects:
      - {id: table, position: [0.0, 0.0, 0.0], entropy_per_access: 64, access_frequency: 1.0e6}
    kernels:
      - {id: scan, traffic: {table: 1.0e6}, position: [0.5, 0.5, 0.5]}
    region: {lo: [0, 0, 0], hi: [1, 1, 1]}
    slots:
      - [0.1, 0.1, 0.1]

Keys are strict: an unknown key is reported with its line, and all missing
required keys of a mapping are reported together.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml
from pydantic import Field, ValidationError, model_validator

from datagravity.config import PJ
from datagravity.utils.errors import ScenarioError
from datagravity.utils.types import (
    ComputeKernel,
    DataObject,
    FrozenModel,
    PlacementProblem,
    Region,
    TechProfile,
    Vector3,
)

logger = logging.getLogger(__name__)

SCENARIO_VERSION = 1

TOP_KEYS = (("version", "profile"), ("objects", "kernels", "region", "slots"))
PROFILE_KEYS = (("label", "e_compute_pj", "alpha", "beta"), ("d_ref_m", "bits_per_access"))
OBJECT_KEYS = (("id", "position", "entropy_per_access", "access_frequency"), ())
KERNEL_KEYS = (("id", "traffic"), ("position",))
REGION_KEYS = (("lo", "hi"), ())


class Scenario(FrozenModel):
    profile: TechProfile
    objects: List[DataObject] = Field(default_factory=list)
    kernels: List[ComputeKernel] = Field(default_factory=list)
    region: Optional[Region] = None
    slots: Optional[List[Vector3]] = None

    @model_validator(mode="after")
    def _referential_integrity(self) -> "Scenario":
        object_ids = [obj.id for obj in self.objects]
        if len(set(object_ids)) != len(object_ids):
            raise ValueError("data object ids must be unique")
        known = set(object_ids)
        for kernel in self.kernels:
            for object_id in kernel.traffic:
                if object_id not in known:
                    raise ValueError(f"kernel '{kernel.id}' references unknown data object '{object_id}'")
        if self.slots is not None and self.region is None:
            raise ValueError("slots need a region")
        return self

    def placement_problem(self) -> PlacementProblem:
        if self.region is None:
            raise ScenarioError("placement needs a region", key="region")
        if not self.kernels:
            raise ScenarioError("placement needs at least one kernel", key="kernels")
        try:
            return PlacementProblem(
                objects=self.objects,
                kernels=self.kernels,
                profile=self.profile,
                region=self.region,
                slots=self.slots,
            )
        except ValidationError as e:
            raise ScenarioError(_first_message(e)) from e

    @classmethod
    def from_problem(cls, problem: PlacementProblem) -> "Scenario":
        return cls(
            profile=problem.profile,
            objects=problem.objects,
            kernels=problem.kernels,
            region=problem.region,
            slots=problem.slots,
        )


def parse_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e.strerror}") from e
    logger.info(f"📂 Loading scenario {path}")
    return parse_scenario_text(text)


def load_profile(path: Union[str, Path]) -> TechProfile:
    return parse_scenario(path).profile


def parse_scenario_text(text: str) -> Scenario:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ScenarioError(
            f"malformed scenario file: {getattr(e, 'problem', None) or e}",
            key="<document>",
            line=None if mark is None else mark.line + 1,
        ) from e
    if root is None:
        raise ScenarioError("empty scenario file", key="version", line=1)

    top = _entries(root, "scenario")
    _check_keys(top, root, "scenario", TOP_KEYS)
    version_node = top["version"][1]
    if data["version"] != SCENARIO_VERSION:
        raise ScenarioError(
            f"unsupported scenario version {data['version']!r}, expected {SCENARIO_VERSION}",
            key="version",
            line=_line(version_node),
        )

    profile = _parse_profile(top["profile"][1], data["profile"])
    objects = [
        _build(DataObject, node, "objects", item)
        for node, item in _items(top, data, "objects", OBJECT_KEYS)
    ]
    kernels = []
    known = {obj.id for obj in objects}
    for node, item in _items(top, data, "kernels", KERNEL_KEYS):
        traffic_node = _entries(node, "kernels")["traffic"][1]
        for object_id, (key_node, _) in _entries(traffic_node, "traffic").items():
            if object_id not in known:
                raise ScenarioError(
                    f"kernel '{item['id']}' references unknown data object '{object_id}'",
                    key=object_id,
                    line=_line(key_node),
                )
        kernels.append(_build(ComputeKernel, node, "kernels", item))

    region = None
    if "region" in top:
        region_node = top["region"][1]
        _check_keys(_entries(region_node, "region"), region_node, "region", REGION_KEYS)
        region = _build(Region, region_node, "region", data["region"])

    slots = None
    if "slots" in top:
        slots_node = top["slots"][1]
        if not isinstance(slots_node, yaml.SequenceNode):
            raise ScenarioError("slots must be a list of points", key="slots", line=_line(slots_node))
        slots = data["slots"] or []

    try:
        scenario = Scenario(profile=profile, objects=objects, kernels=kernels, region=region, slots=slots)
    except ValidationError as e:
        raise ScenarioError(_first_message(e), key="scenario", line=_line(root)) from e
    logger.info(
        f"✅ Scenario loaded: {len(scenario.objects)} objects, {len(scenario.kernels)} kernels, "
        f"profile '{scenario.profile.label}'"
    )
    return scenario


def _parse_profile(node: yaml.Node, data: Any) -> TechProfile:
    entries = _entries(node, "profile")
    _check_keys(entries, node, "profile", PROFILE_KEYS)
    e_compute_pj = _number(data["e_compute_pj"], "e_compute_pj", entries["e_compute_pj"][1])
    fields = {
        "label": str(data["label"]),
        "e_compute": e_compute_pj * PJ,
        "alpha": _number(data["alpha"], "alpha", entries["alpha"][1]),
        "beta": _number(data["beta"], "beta", entries["beta"][1]),
    }
    if "d_ref_m" in data:
        fields["d_ref"] = _number(data["d_ref_m"], "d_ref_m", entries["d_ref_m"][1])
    if "bits_per_access" in data:
        fields["bits_per_access"] = data["bits_per_access"]
    return _build(TechProfile, node, "profile", fields)


def _items(top, data, name: str, keys) -> List[Tuple[yaml.Node, Dict[str, Any]]]:
    if name not in top:
        return []
    node = top[name][1]
    if isinstance(node, yaml.ScalarNode) and data[name] is None:
        return []
    if not isinstance(node, yaml.SequenceNode):
        raise ScenarioError(f"{name} must be a list", key=name, line=_line(node))
    items = []
    for item_node, item in zip(node.value, data[name]):
        _check_keys(_entries(item_node, name), item_node, name, keys)
        items.append((item_node, item))
    return items


def _entries(node: yaml.Node, where: str) -> Dict[str, Tuple[yaml.Node, yaml.Node]]:
    if not isinstance(node, yaml.MappingNode):
        raise ScenarioError(f"{where} must be a mapping", key=where, line=_line(node))
    entries: Dict[str, Tuple[yaml.Node, yaml.Node]] = {}
    for key_node, value_node in node.value:
        key = str(key_node.value)
        if key in entries:
            raise ScenarioError(f"duplicate key in {where}", key=key, line=_line(key_node))
        entries[key] = (key_node, value_node)
    return entries


def _check_keys(entries, node: yaml.Node, where: str, keys) -> None:
    required, optional = keys
    for key, (key_node, _) in entries.items():
        if key not in required and key not in optional:
            raise ScenarioError(f"unknown key in {where}", key=key, line=_line(key_node))
    missing = [key for key in required if key not in entries]
    if missing:
        raise ScenarioError(
            f"missing required keys in {where}: {', '.join(missing)}",
            key=missing[0],
            line=_line(node),
        )


def _build(model, node: yaml.Node, where: str, fields: Dict[str, Any]):
    try:
        return model(**fields)
    except (ValidationError, TypeError) as e:
        message = _first_message(e) if isinstance(e, ValidationError) else str(e)
        raise ScenarioError(f"invalid {where}: {message}", key=where, line=_line(node)) from e


def _number(value: Any, key: str, node: yaml.Node) -> float:
    # YAML 1.1 reads exponent literals without a dot ("1e6") as strings
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"expected a number, got {value!r}", key=key, line=_line(node))
    if not math.isfinite(number):
        raise ScenarioError(f"expected a finite number, got {value!r}", key=key, line=_line(node))
    return number


def _line(node: yaml.Node) -> int:
    return node.start_mark.line + 1


def _first_message(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    message = first.get("msg", str(error))
    return f"{location}: {message}" if location else message


def to_pj(joules: float) -> float:
    """Picojoule value whose conversion back to joules reproduces `joules` exactly."""
    candidate = joules / PJ
    for _ in range(8):
        if candidate * PJ == joules:
            return candidate
        candidate = math.nextafter(candidate, math.inf if candidate * PJ < joules else -math.inf)
    return joules / PJ


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    profile = scenario.profile
    document: Dict[str, Any] = {
        "version": SCENARIO_VERSION,
        "profile": {
            "label": profile.label,
            "e_compute_pj": to_pj(profile.e_compute),
            "alpha": profile.alpha,
            "beta": profile.beta,
            "d_ref_m": profile.d_ref,
            "bits_per_access": profile.bits_per_access,
        },
        "objects": [
            {
                "id": obj.id,
                "position": list(obj.position),
                "entropy_per_access": obj.entropy_per_access,
                "access_frequency": obj.access_frequency,
            }
            for obj in scenario.objects
        ],
    }
    if scenario.kernels:
        kernels = []
        for kernel in scenario.kernels:
            entry: Dict[str, Any] = {"id": kernel.id, "traffic": dict(kernel.traffic)}
            if kernel.position is not None:
                entry["position"] = list(kernel.position)
            kernels.append(entry)
        document["kernels"] = kernels
    if scenario.region is not None:
        document["region"] = {"lo": list(scenario.region.lo), "hi": list(scenario.region.hi)}
    if scenario.slots is not None:
        document["slots"] = [list(slot) for slot in scenario.slots]
    return document


def dump_scenario(scenario: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(scenario), sort_keys=False, default_flow_style=None)
