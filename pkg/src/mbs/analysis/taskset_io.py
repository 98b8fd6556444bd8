"""Task-set files: JSON with a fixed, strictly validated schema.

Top level::

    {
      "tasks": [
        {"id": "T1", "period": 10, "wcet": 3, "priority": 2, "processor": 0,
         "segments": [
            {"type": "exec", "duration": 1},
            {"type": "cs", "resource": "R", "duration": 1,
             "nested": [ ... cs entries ... ]},
            {"type": "exec", "duration": 1}
         ]}
      ],
      "resources": [{"id": "R", "sync_core": 2, "group": "g"}],
      "params": {"delta": 0}
    }

``segments`` defaults to a single exec of the full WCET; ``params`` and
``resources`` may be omitted.  Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import json
from typing import Any

from ..errors import ValidationError
from .model import Cs, Exec, ResourceSpec, TaskSet, TaskSpec, validate_taskset

_TOP_KEYS = {"tasks", "resources", "params"}
_TASK_KEYS = {"id", "period", "wcet", "priority", "processor", "segments"}
_SEG_KEYS = {"type", "resource", "duration", "nested"}
_RES_KEYS = {"id", "sync_core", "group"}
_PARAM_KEYS = {"delta"}


def _reject_unknown(obj: dict, allowed: set, where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown key(s) {sorted(unknown)}")


def _need(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ValidationError(f"{where}: missing required key {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ValidationError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _parse_cs(entry: dict, where: str) -> Cs:
    _reject_unknown(entry, _SEG_KEYS, where)
    resource = _need(entry, "resource", str, where)
    duration = _need(entry, "duration", int, where)
    nested = []
    for i, sub in enumerate(entry.get("nested", [])):
        sub_where = f"{where}.nested[{i}]"
        if not isinstance(sub, dict) or sub.get("type") != "cs":
            raise ValidationError(f"{sub_where}: nested entries must be cs segments")
        nested.append(_parse_cs(sub, sub_where))
    return Cs(resource=resource, duration=duration, nested=tuple(nested))


def _parse_segment(entry: Any, where: str):
    if not isinstance(entry, dict):
        raise ValidationError(f"{where}: expected an object")
    kind = _need(entry, "type", str, where)
    if kind == "exec":
        _reject_unknown(entry, {"type", "duration"}, where)
        return Exec(duration=_need(entry, "duration", int, where))
    if kind == "cs":
        return _parse_cs(entry, where)
    raise ValidationError(f"{where}.type: expected 'exec' or 'cs', got {kind!r}")


def parse_taskset(data: Any) -> TaskSet:
    if not isinstance(data, dict):
        raise ValidationError("task-set file: top level must be an object")
    _reject_unknown(data, _TOP_KEYS, "task-set file")

    tasks = []
    raw_tasks = data.get("tasks", [])
    if not isinstance(raw_tasks, list):
        raise ValidationError("tasks: expected a list")
    for i, entry in enumerate(raw_tasks):
        where = f"tasks[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected an object")
        _reject_unknown(entry, _TASK_KEYS, where)
        segments = tuple(
            _parse_segment(seg, f"{where}.segments[{j}]")
            for j, seg in enumerate(entry.get("segments", []))
        )
        tasks.append(TaskSpec(
            id=_need(entry, "id", str, where),
            period=_need(entry, "period", int, where),
            wcet=_need(entry, "wcet", int, where),
            priority=_need(entry, "priority", int, where),
            processor=_need(entry, "processor", int, where),
            segments=segments,
        ))

    resources = []
    raw_resources = data.get("resources", [])
    if not isinstance(raw_resources, list):
        raise ValidationError("resources: expected a list")
    for i, entry in enumerate(raw_resources):
        where = f"resources[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected an object")
        _reject_unknown(entry, _RES_KEYS, where)
        group = entry.get("group")
        if group is not None and not isinstance(group, str):
            raise ValidationError(f"{where}.group: expected string")
        resources.append(ResourceSpec(
            id=_need(entry, "id", str, where),
            sync_core=_need(entry, "sync_core", int, where),
            group=group,
        ))

    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params: expected an object")
    _reject_unknown(params, _PARAM_KEYS, "params")
    delta = params.get("delta", 0)
    if isinstance(delta, bool) or not isinstance(delta, int):
        raise ValidationError("params.delta: expected int")

    ts = TaskSet(tasks=tuple(tasks), resources=tuple(resources), delta=delta)
    validate_taskset(ts)
    return ts


def load_taskset(path) -> TaskSet:
    with open(path) as f:
        return parse_taskset(json.load(f))


def loads_taskset(text: str) -> TaskSet:
    return parse_taskset(json.loads(text))


def _segment_to_dict(seg):
    if isinstance(seg, Exec):
        return {"type": "exec", "duration": seg.duration}
    out = {"type": "cs", "resource": seg.resource, "duration": seg.duration}
    if seg.nested:
        out["nested"] = [_segment_to_dict(n) for n in seg.nested]
    return out


def taskset_to_dict(ts: TaskSet) -> dict:
    out: dict[str, Any] = {
        "tasks": [
            {
                "id": t.id, "period": t.period, "wcet": t.wcet,
                "priority": t.priority, "processor": t.processor,
                "segments": [_segment_to_dict(s) for s in t.segments],
            }
            for t in ts.tasks
        ]
    }
    if ts.resources:
        out["resources"] = [
            {"id": r.id, "sync_core": r.sync_core,
             **({"group": r.group} if r.group else {})}
            for r in ts.resources
        ]
    out["params"] = {"delta": ts.delta}
    return out


def dump_taskset(ts: TaskSet, path):
    with open(path, "w") as f:
        json.dump(taskset_to_dict(ts), f, indent=2)
        f.write("\n")
