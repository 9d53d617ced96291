"""Translation-experiment engine: configs, schedules, sessions, storage, API."""

from .api import create_app
from .bundle import (
    Bundle,
    Participant,
    assign_conditions,
    default_stimuli,
    generate_bundle,
    load_bundle,
    load_participants_csv,
    session_id_for,
)
from .config import (
    AGE_MAX,
    AGE_MIN,
    CONDITIONS,
    GROUPS,
    OT_PHASES,
    VT_PHASES,
    PhaseStamp,
    ResponseRecord,
    SchedulePhase,
    SessionConfig,
    StimulusItem,
    TrialSchedule,
    TrialTimings,
    build_schedule,
    record_from_json_dict,
)
from .session import TIMING_TOLERANCE_MS, SessionRunner
from .store import (
    SCHEMA_VERSION,
    EventStore,
    persist_response,
    replay_sessions,
    transcripts_from,
)

__all__ = [
    "AGE_MAX",
    "AGE_MIN",
    "Bundle",
    "CONDITIONS",
    "EventStore",
    "GROUPS",
    "OT_PHASES",
    "Participant",
    "PhaseStamp",
    "ResponseRecord",
    "SCHEMA_VERSION",
    "SchedulePhase",
    "SessionConfig",
    "SessionRunner",
    "StimulusItem",
    "TIMING_TOLERANCE_MS",
    "TrialSchedule",
    "TrialTimings",
    "VT_PHASES",
    "assign_conditions",
    "build_schedule",
    "create_app",
    "default_stimuli",
    "generate_bundle",
    "load_bundle",
    "load_participants_csv",
    "persist_response",
    "record_from_json_dict",
    "replay_sessions",
    "session_id_for",
    "transcripts_from",
]
