"""Problem files: named spaces, named operators, task parameters."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .operators import OperatorSpec
from .spaces import SpaceSpec

_PARAM_KEYS = {"tol", "seed", "samples", "delta_grid", "method", "count", "atoms", "kind"}


@dataclass
class ProblemFile:
    spaces: dict
    operators: dict
    params: dict = field(default_factory=dict)

    def operator(self, name: str) -> OperatorSpec:
        if name not in self.operators:
            raise ValidationError(
                f"operators.{name}: not defined (have {sorted(self.operators)})"
            )
        return self.operators[name]

    def to_dict(self) -> dict:
        ops = {}
        for name, T in self.operators.items():
            entry = {"matrix": T.to_dict()["matrix"]}
            entry["domain"] = self._space_name(T.domain)
            entry["codomain"] = self._space_name(T.codomain)
            ops[name] = entry
        return {
            "spaces": {n: s.to_dict() for n, s in self.spaces.items()},
            "operators": ops,
            "params": dict(self.params),
        }

    def _space_name(self, space: SpaceSpec):
        for name, s in self.spaces.items():
            if s == space:
                return name
        return space.to_dict()

    def __eq__(self, other):
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return (
            self.spaces == other.spaces
            and self.operators == other.operators
            and self.params == other.params
        )


def problem_from_dict(data: dict) -> ProblemFile:
    if not isinstance(data, dict):
        raise ValidationError("root: expected a JSON object")
    raw_spaces = data.get("spaces", {})
    if not isinstance(raw_spaces, dict):
        raise ValidationError("spaces: expected an object of named spaces")
    spaces = {}
    for name, entry in raw_spaces.items():
        try:
            spaces[name] = SpaceSpec.from_dict(entry)
        except (ValueError, KeyError, TypeError) as exc:
            raise ValidationError(f"spaces.{name}: {exc}") from exc
    raw_ops = data.get("operators", {})
    if not isinstance(raw_ops, dict):
        raise ValidationError("operators: expected an object of named operators")
    operators = {}
    for name, entry in raw_ops.items():
        if not isinstance(entry, dict):
            raise ValidationError(f"operators.{name}: expected an object")
        for key in ("matrix", "domain", "codomain"):
            if key not in entry:
                raise ValidationError(f"operators.{name}.{key}: missing")
        for key in ("domain", "codomain"):
            ref = entry[key]
            if isinstance(ref, str) and ref not in spaces:
                raise ValidationError(
                    f"operators.{name}.{key}: unknown space {ref!r} "
                    f"(have {sorted(spaces)})"
                )
        try:
            operators[name] = OperatorSpec.from_dict(entry, spaces=spaces)
        except Exception as exc:
            raise ValidationError(f"operators.{name}: {exc}") from exc
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params: expected an object")
    unknown = set(params) - _PARAM_KEYS
    if unknown:
        raise ValidationError(f"params: unknown keys {sorted(unknown)}")
    return ProblemFile(spaces=spaces, operators=operators, params=dict(params))


def load_problem(path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    return problem_from_dict(data)
