"""Study bundles: everything one data-collection site needs in a directory.

A bundle holds config.json (sessions, trial order, timings, seed),
stimuli.csv (all trials, practice included), references.jsonl (reference
translation embeddings in the scoring format) and an assets folder for
images. Condition assignment happens here, seeded and balanced within each
(group, age) stratum, so a bundle is fully reproducible from its inputs.
"""

from __future__ import annotations

import csv
import json
import os
import shutil
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..errors import MissingReference, ParseError
from .config import (
    AGE_MAX,
    AGE_MIN,
    CONDITIONS,
    GROUPS,
    SessionConfig,
    StimulusItem,
    TrialTimings,
)

BUNDLE_SCHEMA = "lexiplex.bundle.v1"

STIMULI_HEADER = ["trial", "dutch_sentence", "image_ref", "reference_ids"]

#: Default task: simple concrete Dutch sentences with one reference
#: translation each; image refs point into the bundle's assets folder.
_DEFAULT_MAIN = [
    ("t01", "De hond slaapt onder de tafel.", "The dog is sleeping under the table."),
    ("t02", "Het meisje fietst naar school.", "The girl cycles to school."),
    ("t03", "De kat drinkt melk uit een schaaltje.", "The cat drinks milk from a small bowl."),
    ("t04", "Mijn broer leest een spannend boek.", "My brother is reading an exciting book."),
    ("t05", "De zon schijnt boven de zee.", "The sun is shining over the sea."),
    ("t06", "Opa plant een boom in de tuin.", "Grandpa plants a tree in the garden."),
    ("t07", "De kinderen spelen voetbal in het park.", "The children play football in the park."),
    ("t08", "Moeder bakt een appeltaart in de keuken.", "Mother bakes an apple pie in the kitchen."),
    ("t09", "De trein vertrekt om acht uur.", "The train leaves at eight o'clock."),
    ("t10", "Een vogel zingt in de hoge boom.", "A bird sings in the tall tree."),
    ("t11", "De jongen tekent een paard op papier.", "The boy draws a horse on paper."),
    ("t12", "Wij eten brood met kaas.", "We eat bread with cheese."),
    ("t13", "De leraar schrijft het antwoord op het bord.", "The teacher writes the answer on the board."),
    ("t14", "Het kind gooit een bal naar de muur.", "The child throws a ball at the wall."),
    ("t15", "De boot vaart langzaam over de rivier.", "The boat sails slowly across the river."),
]

_DEFAULT_PRACTICE = [
    ("p01", "De man loopt over straat.", "The man walks down the street."),
    ("p02", "Het meisje drinkt water.", "The girl drinks water."),
]


def _item(trial: str, sentence: str) -> StimulusItem:
    return StimulusItem(
        trial=trial,
        dutch_sentence=sentence,
        reference_ids=(f"ref:{trial}",),
        image_ref=f"assets/{trial}.png",
    )


def default_stimuli():
    """(main items, practice items, reference id -> English reference text)."""
    main = tuple(_item(t, s) for t, s, _ in _DEFAULT_MAIN)
    practice = tuple(_item(t, s) for t, s, _ in _DEFAULT_PRACTICE)
    texts = {f"ref:{t}": ref for t, _, ref in _DEFAULT_MAIN + _DEFAULT_PRACTICE}
    return main, practice, texts


@dataclass(frozen=True)
class Participant:
    id: str
    group: str
    age: int

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ValueError(f"group must be one of {GROUPS}, got {self.group!r}")
        if not (AGE_MIN <= self.age <= AGE_MAX):
            raise ValueError(f"age must be in [{AGE_MIN}, {AGE_MAX}], got {self.age}")


def assign_conditions(participants: Sequence[Participant], seed: int) -> dict:
    """participant id -> condition, balanced within every (group, age) stratum.

    Each stratum is shuffled with the seeded generator and then alternated
    VT/OT, so counts within a stratum differ by at most one and the whole
    assignment is a pure function of (participants, seed).
    """
    ids = [p.id for p in participants]
    if len(ids) != len(set(ids)):
        raise ValueError("participant ids must be unique")
    strata: dict = {}
    for p in participants:
        strata.setdefault((p.group, p.age), []).append(p.id)
    rng = np.random.default_rng(seed)
    assignment: dict = {}
    for key in sorted(strata):
        pids = sorted(strata[key])
        order = rng.permutation(len(pids))
        for j, idx in enumerate(order):
            assignment[pids[idx]] = CONDITIONS[j % 2]
    return assignment


def session_id_for(participant_id: str) -> str:
    return f"s-{participant_id}"


def _configs_for(
    participants: Sequence[Participant],
    assignment: Mapping,
    items: tuple,
    practice: tuple,
    timings: TrialTimings,
) -> dict:
    configs = {}
    for p in sorted(participants, key=lambda q: q.id):
        sid = session_id_for(p.id)
        configs[sid] = SessionConfig(
            session=sid,
            participant=p.id,
            group=p.group,
            condition=assignment[p.id],
            age=p.age,
            items=items,
            practice_items=practice,
            timings=timings,
        )
    return configs


@dataclass(frozen=True)
class Bundle:
    directory: str
    seed: int
    timings: TrialTimings
    items: tuple
    practice_items: tuple
    configs: dict  # session id -> SessionConfig

    @property
    def references_path(self) -> str:
        return os.path.join(self.directory, "references.jsonl")


def generate_bundle(
    out_dir,
    participants: Sequence[Participant],
    seed: int,
    items: Optional[tuple] = None,
    practice: Optional[tuple] = None,
    timings: Optional[TrialTimings] = None,
    references_file=None,
) -> Bundle:
    """Write a complete bundle directory and return its in-memory form.

    Falls back to the built-in stimulus set when no items are given. When a
    references file is supplied it is copied in after checking that every
    reference id used by the stimuli is present; otherwise an empty
    references.jsonl is created as a placeholder for later embedding.
    """
    if not participants:
        raise ValueError("at least one participant is required")
    if items is None or practice is None:
        d_items, d_practice, _ = default_stimuli()
        items = d_items if items is None else items
        practice = d_practice if practice is None else practice
    timings = timings or TrialTimings()

    assignment = assign_conditions(participants, seed)
    configs = _configs_for(participants, assignment, items, practice, timings)

    out = os.fspath(out_dir)
    os.makedirs(os.path.join(out, "assets"), exist_ok=True)

    ref_path = os.path.join(out, "references.jsonl")
    if references_file is not None:
        from ..scoring import load_embeddings

        available = load_embeddings(references_file)
        for item in tuple(practice) + tuple(items):
            for rid in item.reference_ids:
                if rid not in available:
                    raise MissingReference(
                        f"trial {item.trial!r} needs reference {rid!r}, "
                        "missing from the references file"
                    )
        shutil.copyfile(os.fspath(references_file), ref_path)
    else:
        with open(ref_path, "w", encoding="utf-8"):
            pass

    with open(os.path.join(out, "stimuli.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STIMULI_HEADER)
        for item in tuple(practice) + tuple(items):
            writer.writerow(
                [
                    item.trial,
                    item.dutch_sentence,
                    item.image_ref or "",
                    ";".join(item.reference_ids),
                ]
            )

    config_obj = {
        "schema": BUNDLE_SCHEMA,
        "seed": seed,
        "timings": timings.to_json_dict(),
        "practice_trials": [it.trial for it in practice],
        "main_trials": [it.trial for it in items],
        "sessions": [
            {
                "session": cfg.session,
                "participant": cfg.participant,
                "group": cfg.group,
                "condition": cfg.condition,
                "age": cfg.age,
            }
            for _, cfg in sorted(configs.items())
        ],
    }
    with open(os.path.join(out, "config.json"), "w", encoding="utf-8") as fh:
        json.dump(config_obj, fh, sort_keys=True, indent=2)
        fh.write("\n")

    return Bundle(
        directory=out,
        seed=seed,
        timings=timings,
        items=tuple(items),
        practice_items=tuple(practice),
        configs=configs,
    )


def _read_stimuli_csv(path) -> dict:
    out = {}
    with open(os.fspath(path), "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != STIMULI_HEADER:
            raise ParseError(f"bad stimuli header {header!r}", line=1)
        for i, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ParseError(f"expected 4 columns, got {len(row)}", line=i)
            trial, sentence, image_ref, refs = row
            if trial in out:
                raise ParseError(f"trial {trial!r} repeated", line=i)
            try:
                out[trial] = StimulusItem(
                    trial=trial,
                    dutch_sentence=sentence,
                    reference_ids=tuple(r for r in refs.split(";") if r),
                    image_ref=image_ref or None,
                )
            except ValueError as exc:
                raise ParseError(str(exc), line=i) from exc
    return out


def load_bundle(directory) -> Bundle:
    """Read a bundle directory back into session configs."""
    root = os.fspath(directory)
    try:
        with open(os.path.join(root, "config.json"), "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read bundle config: {exc}", line=0) from exc
    if not isinstance(obj, dict) or obj.get("schema") != BUNDLE_SCHEMA:
        raise ParseError(f"bundle schema is not {BUNDLE_SCHEMA!r}", line=0)
    by_trial = _read_stimuli_csv(os.path.join(root, "stimuli.csv"))
    try:
        timings = TrialTimings.from_json_dict(obj["timings"])
        practice = tuple(by_trial[t] for t in obj["practice_trials"])
        items = tuple(by_trial[t] for t in obj["main_trials"])
        configs = {}
        for entry in obj["sessions"]:
            cfg = SessionConfig(
                session=entry["session"],
                participant=entry["participant"],
                group=entry["group"],
                condition=entry["condition"],
                age=entry["age"],
                items=items,
                practice_items=practice,
                timings=timings,
            )
            configs[cfg.session] = cfg
        seed = int(obj["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bundle config is malformed: {exc}", line=0) from exc
    return Bundle(
        directory=root,
        seed=seed,
        timings=timings,
        items=items,
        practice_items=practice,
        configs=configs,
    )


def load_participants_csv(path) -> list:
    """Read `participant,group,age` rows."""
    out = []
    with open(os.fspath(path), "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["participant", "group", "age"]:
            raise ParseError(f"bad participants header {header!r}", line=1)
        for i, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ParseError(f"expected 3 columns, got {len(row)}", line=i)
            try:
                out.append(Participant(id=row[0], group=row[1], age=int(row[2])))
            except ValueError as exc:
                raise ParseError(str(exc), line=i) from exc
    return out
