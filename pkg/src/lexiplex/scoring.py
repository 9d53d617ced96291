"""Semantic scoring of spoken-response transcripts.

Each response is embedded (by an external embedder) and scored as the
cosine similarity to its trial's reference embedding; trials with several
acceptable references take the best match. Group-level analysis estimates
the modality effect (visual-trigger vs orthographic-trigger) and its
interaction with language group via permutation tests: condition labels are
shuffled within group for the main effect and jointly for the interaction,
and the two-sided p-value uses the add-one rule p = (1 + #{|T*| >= |T|}) /
(n + 1). Permutation i always draws from substream seed + i, so serial and
parallel runs match bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    EmptyCell,
    MissingReference,
    ParseError,
    ZeroVector,
)

CONDITIONS = ("VT", "OT")
GROUPS = ("L2", "Lstar")


@dataclass(frozen=True)
class EmbeddingVector:
    id: str
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("embedding must have at least one dimension")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def dim(self) -> int:
        return len(self.values)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """dot(a, b) / (|a| |b|), clamped to [-1, 1] against float drift."""
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    va = np.asarray(a.values)
    vb = np.asarray(b.values)
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return float(min(1.0, max(-1.0, float(va @ vb) / (na * nb))))


@dataclass(frozen=True)
class ScoredResponse:
    participant: str
    trial: str
    condition: str
    group: str
    age: int
    similarity: Optional[float] = None

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ValueError(f"condition must be one of {CONDITIONS}, got {self.condition!r}")
        if self.group not in GROUPS:
            raise ValueError(f"group must be one of {GROUPS}, got {self.group!r}")
        if self.similarity is not None and not (-1.0 <= self.similarity <= 1.0):
            raise ValueError(f"similarity out of range: {self.similarity}")


def score_responses(
    references: Mapping[str, Sequence[EmbeddingVector]],
    responses: Sequence,
) -> list:
    """Attach similarities: each (response, embedding) pair gets the best
    cosine among its trial's reference embeddings."""
    scored = []
    for response, embedding in responses:
        refs = references.get(response.trial)
        if not refs:
            raise MissingReference(f"no reference embedding for trial {response.trial!r}")
        best = max(cosine_similarity(embedding, ref) for ref in refs)
        scored.append(replace(response, similarity=best))
    return scored


def scored_csv(scored: Sequence[ScoredResponse]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["participant", "trial", "condition", "group", "age", "similarity"])
    for r in scored:
        sim = "" if r.similarity is None else repr(r.similarity)
        writer.writerow([r.participant, r.trial, r.condition, r.group, r.age, sim])
    return buf.getvalue()


def load_scored_csv(text: str) -> list:
    """Inverse of ``scored_csv`` (similarity column may be empty)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["participant", "trial", "condition", "group", "age", "similarity"]:
        raise ParseError(f"unexpected header {header!r}", line=1)
    out = []
    for i, row in enumerate(reader, start=2):
        if len(row) != 6:
            raise ParseError(f"expected 6 columns, got {len(row)}", line=i)
        try:
            similarity = float(row[5]) if row[5] != "" else None
            out.append(
                ScoredResponse(
                    participant=row[0],
                    trial=row[1],
                    condition=row[2],
                    group=row[3],
                    age=int(row[4]),
                    similarity=similarity,
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), line=i) from exc
    return out


# -- group-level analysis -----------------------------------------------------------


def _cell_means(sims: np.ndarray, is_vt: np.ndarray, is_l2: np.ndarray) -> Optional[dict]:
    means = {}
    for group, gmask in (("L2", is_l2), ("Lstar", ~is_l2)):
        for condition, cmask in (("VT", is_vt), ("OT", ~is_vt)):
            cell = sims[gmask & cmask]
            if cell.size == 0:
                return None
            means[(group, condition)] = float(cell.mean())
    return means


def _modality_stat(sims: np.ndarray, is_vt: np.ndarray) -> float:
    return float(sims[is_vt].mean() - sims[~is_vt].mean())


def _interaction_stat(means: dict) -> float:
    lstar = means[("Lstar", "VT")] - means[("Lstar", "OT")]
    l2 = means[("L2", "VT")] - means[("L2", "OT")]
    return float(lstar - l2)


@dataclass(frozen=True)
class AnalysisReport:
    cell_means: dict  # (group, condition) -> mean similarity
    modality_effect: float
    interaction: float
    p_modality: float
    p_interaction: float
    n_permutations: int
    seed: int
    age_cell_means: dict  # age -> {(group, condition) -> mean}

    def to_json_dict(self) -> dict:
        def flatten(means: dict) -> dict:
            return {f"{g}:{c}": v for (g, c), v in sorted(means.items())}

        return {
            "cell_means": flatten(self.cell_means),
            "modality_effect": self.modality_effect,
            "interaction": self.interaction,
            "p_modality": self.p_modality,
            "p_interaction": self.p_interaction,
            "n_permutations": self.n_permutations,
            "seed": self.seed,
            "age_cell_means": {
                str(age): flatten(means) for age, means in sorted(self.age_cell_means.items())
            },
        }


def analyze(
    scored: Sequence[ScoredResponse],
    n_permutations: int,
    seed: int,
    n_jobs: int = 1,
) -> AnalysisReport:
    """Permutation analysis of the modality effect and its group interaction.

    The modality null shuffles VT/OT labels within each language group
    (group sizes stay fixed); the interaction null shuffles condition labels
    jointly across the whole sample. Interaction permutations that empty a
    design cell are discarded from that test's denominator.
    """
    if n_permutations < 100:
        raise ValueError("n_permutations must be >= 100")
    if n_jobs < 1:
        raise ValueError("n_jobs must be >= 1")
    usable = [r for r in scored if r.similarity is not None]
    sims = np.asarray([r.similarity for r in usable], dtype=float)
    is_vt = np.asarray([r.condition == "VT" for r in usable], dtype=bool)
    is_l2 = np.asarray([r.group == "L2" for r in usable], dtype=bool)

    observed_means = _cell_means(sims, is_vt, is_l2)
    if observed_means is None:
        raise EmptyCell("every group x condition cell needs at least one scored response")
    observed_modality = _modality_stat(sims, is_vt)
    observed_interaction = _interaction_stat(observed_means)

    group_indices = {
        "L2": np.flatnonzero(is_l2),
        "Lstar": np.flatnonzero(~is_l2),
    }

    def one(i: int):
        rng = np.random.default_rng(seed + i)
        # Within-group shuffle of condition labels for the main effect.
        permuted = is_vt.copy()
        for key in ("L2", "Lstar"):
            idx = group_indices[key]
            permuted[idx] = is_vt[idx][rng.permutation(idx.size)]
        stat_m = _modality_stat(sims, permuted)
        # Joint shuffle for the interaction.
        joint = is_vt[rng.permutation(is_vt.size)]
        means = _cell_means(sims, joint, is_l2)
        stat_i = None if means is None else _interaction_stat(means)
        return stat_m, stat_i

    if n_jobs == 1:
        draws = [one(i) for i in range(n_permutations)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            draws = list(pool.map(one, range(n_permutations)))

    modality_draws = np.asarray([d[0] for d in draws])
    interaction_draws = [d[1] for d in draws if d[1] is not None]
    p_modality = float(
        (1 + int((np.abs(modality_draws) >= abs(observed_modality)).sum()))
        / (n_permutations + 1)
    )
    n_valid = len(interaction_draws)
    exceed = sum(1 for v in interaction_draws if abs(v) >= abs(observed_interaction))
    p_interaction = float((1 + exceed) / (n_valid + 1))

    by_age: dict = {}
    for age in sorted({r.age for r in usable}):
        mask = np.asarray([r.age == age for r in usable], dtype=bool)
        means = {}
        for group, gmask in (("L2", is_l2), ("Lstar", ~is_l2)):
            for condition, cmask in (("VT", is_vt), ("OT", ~is_vt)):
                cell = sims[mask & gmask & cmask]
                if cell.size:
                    means[(group, condition)] = float(cell.mean())
        by_age[age] = means

    return AnalysisReport(
        cell_means=observed_means,
        modality_effect=observed_modality,
        interaction=observed_interaction,
        p_modality=p_modality,
        p_interaction=p_interaction,
        n_permutations=n_permutations,
        seed=seed,
        age_cell_means=by_age,
    )


# -- embedding I/O and adapters ----------------------------------------------------


def load_embeddings(path) -> dict:
    """Read a JSONL embedding file: one {"id": ..., "values": [...]} per line.

    All vectors must share one dimension; duplicate ids are rejected.
    """
    out: dict = {}
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc}", line=i) from exc
            if not isinstance(obj, dict) or "id" not in obj or "values" not in obj:
                raise ParseError("each line needs 'id' and 'values'", line=i)
            if not isinstance(obj["id"], str):
                raise ParseError("'id' must be a string", line=i)
            values = obj["values"]
            if not isinstance(values, list) or not values or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
            ):
                raise ParseError("'values' must be a non-empty list of numbers", line=i)
            if obj["id"] in out:
                raise ParseError(f"duplicate embedding id {obj['id']!r}", line=i)
            vec = EmbeddingVector(id=obj["id"], values=tuple(values))
            if dim is None:
                dim = vec.dim
            elif vec.dim != dim:
                raise DimMismatch(
                    f"line {i}: embedding dimension {vec.dim} differs from {dim}"
                )
            out[vec.id] = vec
    return out


def save_embeddings(embeddings: Mapping[str, EmbeddingVector], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(embeddings):
            vec = embeddings[key]
            fh.write(
                json.dumps({"id": vec.id, "values": list(vec.values)}, sort_keys=True)
                + "\n"
            )


def reference_map(embeddings: Mapping[str, EmbeddingVector], reference_ids: Mapping[str, Sequence[str]]) -> dict:
    """trial id -> list of reference vectors, resolved from an embedding store."""
    out = {}
    for trial, ids in reference_ids.items():
        refs = []
        for rid in ids:
            if rid not in embeddings:
                raise MissingReference(f"reference embedding {rid!r} not found")
            refs.append(embeddings[rid])
        if not refs:
            raise MissingReference(f"trial {trial!r} lists no reference ids")
        out[trial] = refs
    return out


class SubprocessEmbedder:
    """Embed texts by piping JSON through an external command.

    The command receives {"texts": [...]} on stdin and must print
    {"vectors": [[...], ...]} on stdout.
    """

    def __init__(self, argv: Sequence[str]):
        self._argv = list(argv)

    def embed(self, texts: Sequence[str]) -> list:
        payload = json.dumps({"texts": list(texts)})
        proc = subprocess.run(
            self._argv, input=payload, capture_output=True, text=True, check=True
        )
        out = json.loads(proc.stdout)
        vectors = out["vectors"]
        if len(vectors) != len(texts):
            raise DimMismatch(
                f"embedder returned {len(vectors)} vectors for {len(texts)} texts"
            )
        return [list(map(float, v)) for v in vectors]
