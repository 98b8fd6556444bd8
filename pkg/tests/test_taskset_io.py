import json

import pytest

from mbs.analysis import (
    Cs,
    Exec,
    ResourceSpec,
    TaskSet,
    TaskSpec,
    dump_taskset,
    load_taskset,
    loads_taskset,
    taskset_to_dict,
)
from mbs.errors import ValidationError

GOOD = """
{
  "tasks": [
    {"id": "T1", "period": 4, "wcet": 1, "priority": 2, "processor": 0},
    {"id": "T2", "period": 10, "wcet": 2, "priority": 1, "processor": 0,
     "segments": [
        {"type": "exec", "duration": 1},
        {"type": "cs", "resource": "R", "duration": 1}
     ]}
  ],
  "resources": [{"id": "R", "sync_core": 3}],
  "params": {"delta": 0}
}
"""


def test_round_trip(tmp_path):
    ts = loads_taskset(GOOD)
    assert ts.task("T1").segments == (Exec(1),)
    assert ts.task("T2").critical_sections()[0] == Cs("R", 1)
    assert ts.resource("R").sync_core == 3
    path = tmp_path / "ts.json"
    dump_taskset(ts, path)
    again = load_taskset(path)
    assert again == ts


def test_unknown_top_key_rejected():
    data = json.loads(GOOD)
    data["extra"] = 1
    with pytest.raises(ValidationError, match="extra"):
        loads_taskset(json.dumps(data))


def test_unknown_task_key_rejected():
    data = json.loads(GOOD)
    data["tasks"][0]["color"] = "red"
    with pytest.raises(ValidationError, match=r"tasks\[0\].*color"):
        loads_taskset(json.dumps(data))


def test_unknown_segment_key_rejected():
    data = json.loads(GOOD)
    data["tasks"][1]["segments"][0]["foo"] = 1
    with pytest.raises(ValidationError, match=r"segments\[0\]"):
        loads_taskset(json.dumps(data))


def test_missing_required_key_rejected():
    data = json.loads(GOOD)
    del data["tasks"][0]["period"]
    with pytest.raises(ValidationError, match="period"):
        loads_taskset(json.dumps(data))


def test_wrong_type_rejected():
    data = json.loads(GOOD)
    data["tasks"][0]["wcet"] = "two"
    with pytest.raises(ValidationError, match="wcet"):
        loads_taskset(json.dumps(data))


def test_bad_segment_type_rejected():
    data = json.loads(GOOD)
    data["tasks"][1]["segments"][0]["type"] = "sleep"
    with pytest.raises(ValidationError, match="sleep"):
        loads_taskset(json.dumps(data))


def test_semantic_validation_applies():
    data = json.loads(GOOD)
    data["tasks"][0]["priority"] = 1  # duplicate priority
    with pytest.raises(ValidationError, match="unique"):
        loads_taskset(json.dumps(data))


def test_nested_sections_parse():
    data = json.loads(GOOD)
    data["tasks"][1]["segments"][1]["nested"] = [
        {"type": "cs", "resource": "S", "duration": 1}
    ]
    data["tasks"][1]["wcet"] = 3
    data["resources"].append({"id": "S", "sync_core": 4, "group": "g"})
    ts = loads_taskset(json.dumps(data))
    cs = [s for s in ts.task("T2").segments if isinstance(s, Cs)][0]
    assert cs.nested == (Cs("S", 1),)
    assert ts.resource("S").group == "g"


def test_nested_non_cs_rejected():
    data = json.loads(GOOD)
    data["tasks"][1]["segments"][1]["nested"] = [{"type": "exec", "duration": 1}]
    with pytest.raises(ValidationError, match="nested"):
        loads_taskset(json.dumps(data))


def test_dump_dict_shape():
    ts = TaskSet(
        tasks=(TaskSpec("T", 10, 3, 1, 0, (Exec(2), Cs("R", 1))),),
        resources=(ResourceSpec("R", 5, group="g"),),
        delta=2,
    )
    d = taskset_to_dict(ts)
    assert d["params"] == {"delta": 2}
    assert d["resources"] == [{"id": "R", "sync_core": 5, "group": "g"}]
    assert d["tasks"][0]["segments"][1] == {"type": "cs", "resource": "R", "duration": 1}


def test_malformed_json_carries_position():
    with pytest.raises(json.JSONDecodeError) as err:
        loads_taskset("{ nope }")
    assert err.value.lineno >= 1 and err.value.colno >= 1
