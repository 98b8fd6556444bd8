"""Task model, blocking bounds, and response-time analysis."""

from .blocking import (
    BlockingBound,
    blocking_mbs_conservative,
    blocking_mbs_per_section,
    blocking_spin_fifo,
)
from .model import (
    Cs,
    Exec,
    ResourceSpec,
    TaskSet,
    TaskSpec,
    expand_group_locks,
    has_nested_sections,
    require_flat,
    validate_taskset,
)
from .rta import (
    BOUND_FNS,
    AnalysisProtocol,
    ResponseTimeResult,
    SchedulabilityReport,
    evaluate_recurrence,
    response_time,
    schedulability_test,
)
from .taskset_io import (
    dump_taskset,
    load_taskset,
    loads_taskset,
    parse_taskset,
    taskset_to_dict,
)

__all__ = [
    "AnalysisProtocol",
    "BOUND_FNS",
    "BlockingBound",
    "Cs",
    "Exec",
    "ResourceSpec",
    "ResponseTimeResult",
    "SchedulabilityReport",
    "TaskSet",
    "TaskSpec",
    "blocking_mbs_conservative",
    "blocking_mbs_per_section",
    "blocking_spin_fifo",
    "dump_taskset",
    "evaluate_recurrence",
    "expand_group_locks",
    "has_nested_sections",
    "load_taskset",
    "loads_taskset",
    "parse_taskset",
    "require_flat",
    "response_time",
    "schedulability_test",
    "taskset_to_dict",
    "validate_taskset",
]
