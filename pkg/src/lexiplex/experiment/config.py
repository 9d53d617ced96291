"""Session configuration and trial-phase scheduling for the translation task.

A session shows Dutch sentences to one participant under one of two trigger
conditions: VT trials present an image before the sentence, OT trials go
straight from fixation to the sentence. Every trial ends with a fixed
spoken-response window. Phase order and durations are exact and identical
for every participant in a condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import BadRecord, MissingImage, UnknownTrial

CONDITIONS = ("VT", "OT")
GROUPS = ("L2", "Lstar")

#: Phase sequences per condition; OT never shows an image.
VT_PHASES = ("fixation", "image", "sentence", "record")
OT_PHASES = ("fixation", "sentence", "record")

AGE_MIN = 12
AGE_MAX = 16


@dataclass(frozen=True)
class TrialTimings:
    """Planned phase durations in milliseconds."""

    fixation_ms: int = 200
    image_ms: int = 1000
    sentence_ms: int = 2000
    record_ms: int = 4000

    def __post_init__(self):
        for name in ("fixation_ms", "image_ms", "sentence_ms", "record_ms"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    def to_json_dict(self) -> dict:
        return {
            "fixation_ms": self.fixation_ms,
            "image_ms": self.image_ms,
            "sentence_ms": self.sentence_ms,
            "record_ms": self.record_ms,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "TrialTimings":
        return cls(
            fixation_ms=obj["fixation_ms"],
            image_ms=obj["image_ms"],
            sentence_ms=obj["sentence_ms"],
            record_ms=obj["record_ms"],
        )


@dataclass(frozen=True)
class StimulusItem:
    trial: str
    dutch_sentence: str
    reference_ids: tuple
    image_ref: Optional[str] = None

    def __post_init__(self):
        if not self.trial:
            raise ValueError("trial id must be non-empty")
        if not self.dutch_sentence:
            raise ValueError(f"trial {self.trial!r}: dutch_sentence must be non-empty")
        object.__setattr__(self, "reference_ids", tuple(self.reference_ids))


@dataclass(frozen=True)
class SessionConfig:
    session: str
    participant: str
    group: str
    condition: str
    age: int
    items: tuple
    practice_items: tuple
    timings: TrialTimings = field(default_factory=TrialTimings)

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ValueError(f"group must be one of {GROUPS}, got {self.group!r}")
        if self.condition not in CONDITIONS:
            raise ValueError(f"condition must be one of {CONDITIONS}, got {self.condition!r}")
        if not (AGE_MIN <= self.age <= AGE_MAX):
            raise ValueError(f"age must be in [{AGE_MIN}, {AGE_MAX}], got {self.age}")
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "practice_items", tuple(self.practice_items))
        if not self.items:
            raise ValueError("items must be non-empty")
        if not self.practice_items:
            raise ValueError("at least one practice item is required")
        ids = [it.trial for it in self.practice_items + self.items]
        if len(ids) != len(set(ids)):
            raise ValueError("trial ids must be unique within a session")

    def sequence(self) -> list:
        """(item, is_practice) pairs in presentation order: practice first."""
        return [(it, True) for it in self.practice_items] + [
            (it, False) for it in self.items
        ]

    def find(self, trial_id: str):
        for item, is_practice in self.sequence():
            if item.trial == trial_id:
                return item, is_practice
        raise UnknownTrial(f"trial {trial_id!r} is not part of session {self.session!r}")


@dataclass(frozen=True)
class SchedulePhase:
    name: str
    duration_ms: int


@dataclass(frozen=True)
class TrialSchedule:
    phases: tuple

    @property
    def total_ms(self) -> int:
        return sum(p.duration_ms for p in self.phases)

    def phase_names(self) -> tuple:
        return tuple(p.name for p in self.phases)

    def to_json_list(self) -> list:
        return [{"phase": p.name, "duration_ms": p.duration_ms} for p in self.phases]


def build_schedule(config: SessionConfig, trial_id: str) -> TrialSchedule:
    """Exact phase plan for one trial under the session's condition."""
    item, _ = config.find(trial_id)
    t = config.timings
    if config.condition == "VT":
        if item.image_ref is None:
            raise MissingImage(f"trial {trial_id!r} has no image_ref, required for VT")
        phases = (
            SchedulePhase("fixation", t.fixation_ms),
            SchedulePhase("image", t.image_ms),
            SchedulePhase("sentence", t.sentence_ms),
            SchedulePhase("record", t.record_ms),
        )
    else:
        phases = (
            SchedulePhase("fixation", t.fixation_ms),
            SchedulePhase("sentence", t.sentence_ms),
            SchedulePhase("record", t.record_ms),
        )
    return TrialSchedule(phases=phases)


@dataclass(frozen=True)
class PhaseStamp:
    """Actual start/end of one rendered phase, milliseconds on the client clock."""

    phase: str
    start_ms: float
    end_ms: float

    def __post_init__(self):
        if self.end_ms < self.start_ms:
            raise ValueError(f"phase {self.phase!r}: end_ms precedes start_ms")

    @property
    def duration_ms(self) -> float:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class ResponseRecord:
    session: str
    trial: str
    is_practice: bool
    phase_timestamps: tuple
    submitted_at: float  # unix seconds
    transcript: Optional[str] = None
    audio_ref: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "phase_timestamps", tuple(self.phase_timestamps))

    def to_json_dict(self) -> dict:
        return {
            "session": self.session,
            "trial": self.trial,
            "is_practice": self.is_practice,
            "transcript": self.transcript,
            "audio_ref": self.audio_ref,
            "phase_timestamps": [
                {"phase": p.phase, "start_ms": p.start_ms, "end_ms": p.end_ms}
                for p in self.phase_timestamps
            ],
            "submitted_at": self.submitted_at,
        }


def record_from_json_dict(obj) -> ResponseRecord:
    """Parse and validate the wire form of a response record."""
    if not isinstance(obj, dict):
        raise BadRecord("response record must be a JSON object")

    def need(key, kinds):
        if key not in obj:
            raise BadRecord(f"response record is missing {key!r}")
        value = obj[key]
        kinds_t = kinds if isinstance(kinds, tuple) else (kinds,)
        # bool is an int subclass; only accept it where bool is asked for.
        if not isinstance(value, kinds_t) or (isinstance(value, bool) and bool not in kinds_t):
            raise BadRecord(f"response record field {key!r} has the wrong type")
        return value

    session = need("session", str)
    trial = need("trial", str)
    is_practice = need("is_practice", bool)
    submitted_at = need("submitted_at", (int, float))
    transcript = obj.get("transcript")
    if transcript is not None and not isinstance(transcript, str):
        raise BadRecord("transcript must be a string or null")
    audio_ref = obj.get("audio_ref")
    if audio_ref is not None and not isinstance(audio_ref, str):
        raise BadRecord("audio_ref must be a string or null")
    raw_stamps = need("phase_timestamps", list)
    stamps = []
    for entry in raw_stamps:
        if (
            not isinstance(entry, dict)
            or not isinstance(entry.get("phase"), str)
            or not isinstance(entry.get("start_ms"), (int, float))
            or not isinstance(entry.get("end_ms"), (int, float))
        ):
            raise BadRecord("each phase timestamp needs phase, start_ms, end_ms")
        try:
            stamps.append(
                PhaseStamp(entry["phase"], float(entry["start_ms"]), float(entry["end_ms"]))
            )
        except ValueError as exc:
            raise BadRecord(str(exc)) from exc
    return ResponseRecord(
        session=session,
        trial=trial,
        is_practice=is_practice,
        phase_timestamps=tuple(stamps),
        submitted_at=float(submitted_at),
        transcript=transcript,
        audio_ref=audio_ref,
    )
