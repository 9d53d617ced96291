"""Command-line entry point for every pipeline.

Layout: verb-noun subcommands (`net validate`, `lvc compute`, `growth run`,
`null run`, `activate run|scenario`, `score embed-check|score|analyze`,
`study bundle|serve|import-transcripts|export-scores`). Machine-readable
output (JSON or CSV) goes to stdout only; human summaries go to stderr.
Exit codes: 0 success, 1 usage error, 2 data error. Commands whose results
depend on randomness require an explicit --seed; nothing reads ambient
entropy, so identical invocations produce byte-identical stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .activation import (
    ActivationParams,
    run_activation,
    scenario_cognate,
    scenario_homograph,
    scenario_metrics,
    trajectory_csv,
)
from .errors import LexiplexError, MissingReference, ParseError, error_code
from .experiment.bundle import (
    default_stimuli,
    generate_bundle,
    load_bundle,
    load_participants_csv,
    _read_stimuli_csv,
)
from .experiment.store import EventStore, replay_sessions
from .growth import AcquisitionOrdering, simulate_growth
from .multiplex import load_network
from .null_models import null_model_experiment
from .scoring import (
    EmbeddingVector,
    ScoredResponse,
    analyze,
    load_embeddings,
    load_scored_csv,
    score_responses,
    scored_csv,
)
from .viability import ViabilitySpec, largest_viable_cluster


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _note(message: str) -> None:
    sys.stderr.write(message + "\n")


def _load_net(args):
    return load_network(args.net, getattr(args, "attrs", None))


def _layers(args) -> ViabilitySpec:
    return ViabilitySpec([lid for lid in args.layers.split(",") if lid])


# -- net ---------------------------------------------------------------------------


def _cmd_net_validate(args) -> int:
    net = _load_net(args)
    net.validate()
    _emit_json(
        {
            "valid": True,
            "nodes": net.num_nodes,
            "layers": net.num_layers,
            "presence": net.num_presence,
            "edges": net.num_edges,
        }
    )
    _note(f"ok: {net!r}")
    return 0


def _cmd_net_stats(args) -> int:
    net = _load_net(args)
    per_layer = {}
    for lid in net.layer_ids:
        sub = net.layer_subgraph(lid)
        per_layer[lid] = {"nodes": sub.number_of_nodes(), "edges": sub.number_of_edges()}
    couplings = sum(1 for e in net.edges if e.is_coupling)
    _emit_json(
        {
            "nodes": net.num_nodes,
            "layers": net.num_layers,
            "presence": net.num_presence,
            "edges": net.num_edges,
            "couplings": couplings,
            "per_layer": per_layer,
        }
    )
    return 0


# -- lvc ---------------------------------------------------------------------------


def _cmd_lvc_compute(args) -> int:
    net = _load_net(args)
    result = largest_viable_cluster(net, _layers(args))
    _emit_json(result.to_json_dict())
    _note(f"LVC size {result.size} over layers {args.layers}")
    return 0


# -- growth ------------------------------------------------------------------------


def _cmd_growth_run(args) -> int:
    net = _load_net(args)
    if args.strategy == "random" and args.seed is None:
        raise _usage(args, "--seed is required with --strategy random")
    if args.strategy == "explicit" and not args.order:
        raise _usage(args, "--order is required with --strategy explicit")
    explicit = tuple(args.order.split(",")) if args.order else None
    ordering = AcquisitionOrdering(strategy=args.strategy, seed=args.seed, explicit=explicit)
    trajectory = simulate_growth(net, ordering, _layers(args))
    sys.stdout.write(trajectory.to_csv())
    summary = trajectory.summary_json_dict()
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, sort_keys=True, indent=2)
            fh.write("\n")
    _note(
        f"transition at step {summary['transition_step']} "
        f"(jump {summary['transition_jump']}), final LVC {summary['final_lvc_size']}"
    )
    return 0


# -- null --------------------------------------------------------------------------


def _cmd_null_run(args) -> int:
    net = _load_net(args)
    report = null_model_experiment(
        net, _layers(args), n_reshuffles=args.n, seed=args.seed, n_jobs=args.jobs
    )
    _emit_json(report.to_json_dict())
    if args.null_means:
        with open(args.null_means, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.null_means_csv())
    _note(f"{args.n} reshuffles done, z={report.z_scores}")
    return 0


# -- activate ----------------------------------------------------------------------


def _parse_kv(pairs, what, cast=float) -> dict:
    out = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"bad {what} {pair!r}, expected key=value")
        out[key] = cast(value)
    return out


def _cmd_activate_run(args) -> int:
    net = _load_net(args)
    try:
        weights = _parse_kv(args.layer_weight, "--layer-weight")
        seeds = _parse_kv(args.seed_node, "--seed-node")
        params = ActivationParams(
            decay=args.decay,
            spread_rate=args.spread,
            threshold=args.threshold,
            max_steps=args.max_steps,
            layer_weights=weights,
        )
    except ValueError as exc:
        raise _usage(args, str(exc))
    if not seeds:
        raise _usage(args, "at least one --seed-node id=level is required")
    states = run_activation(net, params, seeds)
    sys.stdout.write(trajectory_csv(states))
    _note(f"ran {states[-1].t} steps over {net.num_nodes} nodes")
    return 0


def _cmd_activate_scenario(args) -> int:
    scenario = scenario_cognate() if args.name == "cognate" else scenario_homograph()
    _emit_json(scenario_metrics(scenario))
    return 0


# -- score -------------------------------------------------------------------------


def _cmd_score_embed_check(args) -> int:
    embeddings = load_embeddings(args.embeddings)
    dim = next(iter(embeddings.values())).dim if embeddings else 0
    _emit_json({"count": len(embeddings), "dim": dim})
    return 0


def _load_response_lines(path) -> list:
    """Responses JSONL: scoring metadata plus the embedding, one per line."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc}", line=i) from exc
            try:
                response = ScoredResponse(
                    participant=obj["participant"],
                    trial=obj["trial"],
                    condition=obj["condition"],
                    group=obj["group"],
                    age=int(obj["age"]),
                )
                vector = EmbeddingVector(id=obj.get("id", obj["trial"]), values=tuple(obj["values"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad response line: {exc}", line=i) from exc
            out.append((response, vector))
    return out


def _cmd_score_score(args) -> int:
    refs = load_embeddings(args.refs)
    responses = _load_response_lines(args.resp)
    if args.stimuli:
        items = _read_stimuli_csv(args.stimuli)
        references = {}
        for trial, item in items.items():
            vecs = []
            for rid in item.reference_ids:
                if rid not in refs:
                    raise MissingReference(f"reference {rid!r} not in {args.refs}")
                vecs.append(refs[rid])
            references[trial] = vecs
    else:
        # without a stimuli table, reference ids are the trial ids themselves
        references = {rid: [vec] for rid, vec in refs.items()}
    scored = score_responses(references, responses)
    sys.stdout.write(scored_csv(scored))
    _note(f"scored {len(scored)} responses")
    return 0


def _cmd_score_analyze(args) -> int:
    with open(args.scored, "r", encoding="utf-8", newline="") as fh:
        scored = load_scored_csv(fh.read())
    report = analyze(scored, n_permutations=args.n, seed=args.seed, n_jobs=args.jobs)
    _emit_json(report.to_json_dict())
    _note(
        f"modality effect {report.modality_effect:+.4f} (p={report.p_modality:.4g}), "
        f"interaction {report.interaction:+.4f} (p={report.p_interaction:.4g})"
    )
    return 0


# -- study -------------------------------------------------------------------------


def _cmd_study_bundle(args) -> int:
    participants = load_participants_csv(args.participants)
    items = practice = None
    if args.stimuli:
        by_trial = _read_stimuli_csv(args.stimuli)
        practice_ids = [t for t in args.practice.split(",") if t] if args.practice else []
        practice = tuple(by_trial[t] for t in practice_ids if t in by_trial)
        items = tuple(item for t, item in by_trial.items() if t not in set(practice_ids))
        if not practice:
            _, practice, _ = default_stimuli()
    bundle = generate_bundle(
        args.out,
        participants,
        seed=args.seed,
        items=items,
        practice=practice,
        references_file=args.refs,
    )
    _emit_json(
        {
            "out": bundle.directory,
            "sessions": len(bundle.configs),
            "practice_trials": [it.trial for it in bundle.practice_items],
            "main_trials": [it.trial for it in bundle.items],
        }
    )
    _note(f"bundle with {len(bundle.configs)} sessions written to {bundle.directory}")
    return 0


def _cmd_study_serve(args) -> int:
    import uvicorn

    from .experiment.api import create_app

    bundle = load_bundle(args.bundle)
    store = EventStore(args.store)
    app = create_app(store, bundle.configs, ui_dir=args.ui)
    _note(f"serving {len(bundle.configs)} sessions on {args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_study_import_transcripts(args) -> int:
    store = EventStore(args.store)
    imported = 0
    with open(args.transcripts, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["session", "trial", "transcript"]:
            raise ParseError(f"bad transcripts header {header!r}", line=1)
        for i, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ParseError(f"expected 3 columns, got {len(row)}", line=i)
            store.append(
                {
                    "type": "transcript",
                    "session": row[0],
                    "trial": row[1],
                    "transcript": row[2],
                }
            )
            imported += 1
    _emit_json({"imported": imported})
    return 0


def _cmd_study_export_scores(args) -> int:
    bundle = load_bundle(args.bundle)
    store = EventStore(args.store)
    runners = replay_sessions(store, bundle.configs)
    refs_path = args.refs or bundle.references_path
    refs = load_embeddings(refs_path)
    response_embeddings = load_embeddings(args.resp_embeddings) if args.resp_embeddings else {}

    references = {}
    for item in bundle.practice_items + bundle.items:
        vecs = [refs[rid] for rid in item.reference_ids if rid in refs]
        if vecs:
            references[item.trial] = vecs

    rows = []
    skipped = 0
    for sid in sorted(runners):
        runner = runners[sid]
        cfg = runner.config
        for record in runner.submitted:
            if record.is_practice:
                continue
            base = ScoredResponse(
                participant=cfg.participant,
                trial=record.trial,
                condition=cfg.condition,
                group=cfg.group,
                age=cfg.age,
            )
            key = f"{sid}:{record.trial}"
            vec = response_embeddings.get(key)
            if vec is None or record.trial not in references:
                rows.append(base)  # similarity left empty
                skipped += 1
                continue
            rows.append(score_responses(references, [(base, vec)])[0])
    sys.stdout.write(scored_csv(rows))
    _note(f"exported {len(rows)} rows ({skipped} without similarity)")
    return 0


# -- parser ------------------------------------------------------------------------


def _usage(args, message: str) -> SystemExit:
    sys.stderr.write(f"{args.prog}: error: {message}\n")
    return SystemExit(1)


def _add_net_args(p, attrs_help="node attribute CSV (node,surface,language,frequency,concreteness,polysemy,aoa)"):
    p.add_argument("--net", required=True, help="edge TSV: layer_a<TAB>node_a<TAB>layer_b<TAB>node_b<TAB>weight")
    p.add_argument("--attrs", default=None, help=attrs_help)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="lexiplex",
        description="Multilayer lexical-network toolkit: viability analysis, "
        "growth and null-model simulation, spreading activation, response "
        "scoring, and the translation-experiment service.",
    )
    top = parser.add_subparsers(dest="noun", required=True)

    net = top.add_parser("net", help="network file handling").add_subparsers(
        dest="verb", required=True
    )
    p = net.add_parser("validate", help="full integrity check; JSON verdict on stdout")
    _add_net_args(p)
    p.set_defaults(func=_cmd_net_validate)
    p = net.add_parser("stats", help="size counts per layer as JSON")
    _add_net_args(p)
    p.set_defaults(func=_cmd_net_stats)

    lvc = top.add_parser("lvc", help="largest viable cluster").add_subparsers(
        dest="verb", required=True
    )
    p = lvc.add_parser(
        "compute",
        help="JSON result on stdout, e.g. "
        'lvc compute --net net.tsv --layers A,B -> {"members": [...], ...}',
    )
    _add_net_args(p)
    p.add_argument("--layers", required=True, help="comma-separated required layer ids")
    p.set_defaults(func=_cmd_lvc_compute)

    growth = top.add_parser("growth", help="acquisition-order growth simulation").add_subparsers(
        dest="verb", required=True
    )
    p = growth.add_parser("run", help="CSV trajectory (step,node,lvc_size,mean_path_len) on stdout")
    _add_net_args(p)
    p.add_argument("--layers", required=True, help="comma-separated required layer ids")
    p.add_argument(
        "--strategy",
        required=True,
        choices=["by_aoa_ascending", "by_frequency_descending", "random", "explicit"],
    )
    p.add_argument("--seed", type=int, default=None, help="required for --strategy random")
    p.add_argument("--order", default=None, help="comma-separated node ids for --strategy explicit")
    p.add_argument("--summary", default=None, help="write the JSON summary to this path")
    p.set_defaults(func=_cmd_growth_run)

    null = top.add_parser("null", help="attribute-reshuffling null model").add_subparsers(
        dest="verb", required=True
    )
    p = null.add_parser("run", help="JSON report on stdout; per-reshuffle means via --null-means")
    _add_net_args(p)
    p.add_argument("--layers", required=True, help="comma-separated required layer ids")
    p.add_argument("--n", type=int, required=True, help="number of reshuffles (>= 1)")
    p.add_argument("--seed", type=int, required=True, help="base seed; reshuffle i uses seed+i")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (result is identical)")
    p.add_argument("--null-means", default=None, help="write per-reshuffle member means CSV here")
    p.set_defaults(func=_cmd_null_run)

    activate = top.add_parser("activate", help="spreading activation").add_subparsers(
        dest="verb", required=True
    )
    p = activate.add_parser("run", help="CSV trajectory (t, one column per node) on stdout")
    _add_net_args(p)
    p.add_argument("--decay", type=float, default=0.6)
    p.add_argument("--spread", type=float, default=0.2)
    p.add_argument("--threshold", type=float, default=0.3)
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument(
        "--layer-weight",
        action="append",
        metavar="KEY=W",
        help="per-layer gain, e.g. visual=0.0 or coupling=0.5; default 1.0",
    )
    p.add_argument(
        "--seed-node",
        action="append",
        metavar="ID=LEVEL",
        help="initial activation, e.g. piano_nl=1.0 (repeatable)",
    )
    p.set_defaults(func=_cmd_activate_run)
    p = activate.add_parser("scenario", help="run a built-in paired fixture; JSON metrics on stdout")
    p.add_argument("--name", required=True, choices=["cognate", "homograph"])
    p.set_defaults(func=_cmd_activate_scenario)

    score = top.add_parser("score", help="embedding-based response scoring").add_subparsers(
        dest="verb", required=True
    )
    p = score.add_parser("embed-check", help='validate a JSONL embedding file ({"id","values"} per line)')
    p.add_argument("--embeddings", required=True)
    p.set_defaults(func=_cmd_score_embed_check)
    p = score.add_parser(
        "score",
        help="cosine-score responses; CSV (participant,trial,condition,group,age,similarity) on stdout",
    )
    p.add_argument("--refs", required=True, help="reference embeddings JSONL")
    p.add_argument(
        "--resp",
        required=True,
        help='responses JSONL: {"participant","trial","condition","group","age","values"} per line',
    )
    p.add_argument("--stimuli", default=None, help="stimuli.csv mapping trials to reference ids")
    p.set_defaults(func=_cmd_score_score)
    p = score.add_parser("analyze", help="permutation analysis of a scored CSV; JSON on stdout")
    p.add_argument("--scored", required=True, help="CSV from `score score`")
    p.add_argument("--n", type=int, required=True, help="number of permutations (>= 100)")
    p.add_argument("--seed", type=int, required=True, help="base seed; permutation i uses seed+i")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (result is identical)")
    p.set_defaults(func=_cmd_score_analyze)

    study = top.add_parser("study", help="experiment bundle and service").add_subparsers(
        dest="verb", required=True
    )
    p = study.add_parser("bundle", help="generate a study bundle directory")
    p.add_argument("--participants", required=True, help="CSV: participant,group,age")
    p.add_argument("--seed", type=int, required=True, help="condition-assignment seed")
    p.add_argument("--out", required=True, help="bundle directory to create")
    p.add_argument("--stimuli", default=None, help="stimuli.csv; defaults to the built-in 15 sentences")
    p.add_argument("--practice", default=None, help="comma-separated practice trial ids within --stimuli")
    p.add_argument("--refs", default=None, help="reference embeddings JSONL to copy into the bundle")
    p.set_defaults(func=_cmd_study_bundle)
    p = study.add_parser("serve", help="run the session service over a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--store", required=True, help="JSONL event log path (created if missing)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None, help="static directory to mount at /ui")
    p.set_defaults(func=_cmd_study_serve)
    p = study.add_parser("import-transcripts", help="append transcript events from a CSV")
    p.add_argument("--store", required=True)
    p.add_argument("--transcripts", required=True, help="CSV: session,trial,transcript")
    p.set_defaults(func=_cmd_study_import_transcripts)
    p = study.add_parser(
        "export-scores",
        help="join stored responses with embeddings; scored CSV on stdout "
        "(response embedding ids are '<session>:<trial>')",
    )
    p.add_argument("--bundle", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--resp-embeddings", default=None, help="JSONL of response embeddings")
    p.add_argument("--refs", default=None, help="override the bundle's references.jsonl")
    p.set_defaults(func=_cmd_study_export_scores)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.prog = parser.prog
    try:
        return args.func(args)
    except LexiplexError as exc:
        sys.stderr.write(f"error [{error_code(exc)}]: {exc}\n")
        return 2
    except ValueError as exc:
        # domain preconditions (bad parameter ranges) are usage errors
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error [io]: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
