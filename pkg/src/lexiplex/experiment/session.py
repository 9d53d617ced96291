"""In-order session state machine: practice trials, then main trials, then done.

The runner owns the submission order. It hands out the next trial payload,
accepts exactly one response per trial in presentation order, and flags
phases whose actual duration strays from the plan by more than the timing
tolerance. It holds no clock and does no I/O, which keeps replay from a log
byte-for-byte equivalent to the live run.
"""

from __future__ import annotations

from typing import Optional

from ..errors import BadRecord, Duplicate, MissingImage, OutOfOrder, UnknownTrial
from .config import ResponseRecord, SessionConfig, build_schedule

#: A phase whose actual duration deviates from plan by more than this is flagged.
TIMING_TOLERANCE_MS = 50


class SessionRunner:
    """One participant's pass through a configured session."""

    def __init__(self, config: SessionConfig):
        if config.condition == "VT":
            for item, _ in config.sequence():
                if item.image_ref is None:
                    raise MissingImage(
                        f"trial {item.trial!r} has no image_ref, required for VT"
                    )
        self._config = config
        self._sequence = config.sequence()
        self._submitted: list = []

    @property
    def config(self) -> SessionConfig:
        return self._config

    @property
    def completed(self) -> int:
        return len(self._submitted)

    @property
    def remaining(self) -> int:
        return len(self._sequence) - len(self._submitted)

    @property
    def done(self) -> bool:
        return self.remaining == 0

    @property
    def state(self) -> str:
        if self.done:
            return "done"
        _, is_practice = self._sequence[self.completed]
        return "practice" if is_practice else "main"

    @property
    def submitted(self) -> tuple:
        return tuple(self._submitted)

    def next_payload(self) -> Optional[dict]:
        """What the participant UI should present next; None when done."""
        if self.done:
            return None
        item, is_practice = self._sequence[self.completed]
        schedule = build_schedule(self._config, item.trial)
        payload = {
            "trial": item.trial,
            "is_practice": is_practice,
            "sentence": item.dutch_sentence,
            "schedule": schedule.to_json_list(),
            "position": self.completed,
        }
        if self._config.condition == "VT":
            payload["image"] = item.image_ref
        return payload

    def submit(self, record: ResponseRecord) -> int:
        """Accept the response for the pending trial; returns its position
        within the session (0-based)."""
        if record.session != self._config.session:
            raise BadRecord(
                f"record addresses session {record.session!r}, "
                f"this is {self._config.session!r}"
            )
        accepted = {r.trial for r in self._submitted}
        if record.trial in accepted:
            raise Duplicate(f"trial {record.trial!r} already has a response")
        if self.done:
            raise OutOfOrder("session is complete")
        expected_item, expected_practice = self._sequence[self.completed]
        if record.trial != expected_item.trial:
            pending = {item.trial for item, _ in self._sequence}
            if record.trial in pending:
                raise OutOfOrder(
                    f"expected trial {expected_item.trial!r}, got {record.trial!r}"
                )
            raise UnknownTrial(
                f"trial {record.trial!r} is not part of session {self._config.session!r}"
            )
        if record.is_practice != expected_practice:
            raise BadRecord(
                f"trial {record.trial!r} is_practice must be {expected_practice}"
            )
        schedule = build_schedule(self._config, record.trial)
        got = tuple(p.phase for p in record.phase_timestamps)
        if got != schedule.phase_names():
            raise BadRecord(
                f"phase timestamps {got!r} do not match the "
                f"{self._config.condition} schedule {schedule.phase_names()!r}"
            )
        self._submitted.append(record)
        return len(self._submitted) - 1

    def timing_flags(self, record: ResponseRecord) -> list:
        """Phases whose actual duration misses plan by more than the tolerance."""
        schedule = build_schedule(self._config, record.trial)
        planned = {p.name: p.duration_ms for p in schedule.phases}
        flags = []
        for stamp in record.phase_timestamps:
            if abs(stamp.duration_ms - planned[stamp.phase]) > TIMING_TOLERANCE_MS:
                flags.append(stamp.phase)
        return flags
