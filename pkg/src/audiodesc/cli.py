"""Command-line interface.

Subcommands: generate (one-shot source -> track file), serve (HTTP API),
analyze (reports over an interaction journal), synth-fixture (build a
labeled test bundle from a spec).

Exit codes: 0 success, 1 pipeline failure, 2 bad usage or validation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures, pipeline, store as store_mod
from .customization import DEFAULT_SETTINGS, validate as validate_settings
from .errors import PipelineError, SettingsError
from .gateway import ProviderConfig, provider_from_config
from .ingest import VideoRef
from .prompts import build_ad_prompt
from .track import serialize


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="audiodesc",
        description="Customizable audio descriptions with interactive Q&A.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="produce an AD track for one video")
    gen.add_argument("--source", required=True, help="local path or URL")
    gen.add_argument(
        "--out", default=None, help="output file (default: track.json or track.vtt)"
    )
    gen.add_argument(
        "--format", choices=("structured", "vtt"), default="structured"
    )
    gen.add_argument("--frequency", type=int, help="seconds between descriptions")
    gen.add_argument("--length", type=int, help="target words per description")
    gen.add_argument("--emphasis")
    gen.add_argument("--subjectivity")
    gen.add_argument("--colors")
    gen.add_argument("--free-form", dest="free_form", default=None)
    gen.add_argument(
        "--provider",
        default="mock:",
        help="provider endpoint URL, or mock: for the offline provider",
    )
    gen.add_argument("--mock-manifest", default=None)
    gen.add_argument("--decoder-cmd", default=None)
    gen.add_argument("--resolver-cmd", default=None)
    gen.add_argument("--workdir", default=".")
    gen.add_argument(
        "--dry-run",
        action="store_true",
        help="plan and print the prompt without calling the provider",
    )

    srv = sub.add_parser("serve", help="run the HTTP API")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--config", default=None, help="JSON config file")
    srv.add_argument("--store", default=None, help="journal path override")

    ana = sub.add_parser("analyze", help="reports over an interaction journal")
    ana.add_argument("--log", required=True, help="journal file path")
    ana.add_argument(
        "--report",
        required=True,
        choices=("customization", "questions", "length-trend"),
    )
    ana.add_argument("--json", action="store_true", help="emit JSON, not a table")

    syn = sub.add_parser("synth-fixture", help="build a labeled fixture bundle")
    syn.add_argument("--spec", required=True, help="fixture spec JSON file")
    syn.add_argument("--out", required=True, help="bundle output directory")

    return parser


def _settings_from_args(args) -> object:
    overrides = {}
    if args.frequency is not None:
        overrides["frequency_s"] = args.frequency
    if args.length is not None:
        overrides["target_length_words"] = args.length
    if args.emphasis is not None:
        overrides["emphasis"] = args.emphasis
    if args.subjectivity is not None:
        overrides["subjectivity"] = args.subjectivity
    if args.colors is not None:
        overrides["colors"] = args.colors
    if args.free_form is not None:
        overrides["free_form_guidelines"] = args.free_form
    if not overrides:
        return DEFAULT_SETTINGS
    raw = DEFAULT_SETTINGS.to_dict()
    raw.update(overrides)
    return validate_settings(raw)


def _source_ref(source: str) -> VideoRef:
    if "://" in source:
        return VideoRef.remote(source)
    return VideoRef.local(source)


def _cmd_generate(args) -> int:
    try:
        settings = _settings_from_args(args)
    except SettingsError as exc:
        print(f"invalid settings: {exc}", file=sys.stderr)
        return 2

    cfg = pipeline.PipelineConfig()
    cfg.ingest.decoder_cmd = args.decoder_cmd
    cfg.ingest.resolver_cmd = args.resolver_cmd
    cfg.ingest.workdir = args.workdir
    cfg.provider = ProviderConfig(
        base_url=args.provider, mock_manifest=args.mock_manifest
    )

    try:
        asset = pipeline.resolve(_source_ref(args.source), cfg.ingest)
        artifacts = pipeline.analyze(asset, cfg)
        plan = pipeline.plan_for(asset, artifacts, settings)
        if args.dry_run:
            if plan.points:
                bundle = build_ad_prompt(
                    settings, plan.times, [f.path for f in artifacts.frames]
                )
                print(bundle.text)
            print(
                f"[dry-run] {len(plan.points)} planned points, "
                f"{len(artifacts.frames)} frames, no provider call",
                file=sys.stderr,
            )
            return 0
        provider = provider_from_config(cfg.provider)
        track = pipeline.generate_track(
            asset, artifacts, plan, settings, provider
        )
    except PipelineError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    default_name = "track.vtt" if args.format == "vtt" else "track.json"
    out = Path(args.out) if args.out else Path(default_name)
    out.write_bytes(serialize(track, args.format))
    print(f"wrote {args.format} track with {len(track.cues)} cues to {out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app, load_server_config

    cfg = load_server_config(args.config)
    if args.store:
        cfg.store_path = args.store
    uvicorn.run(create_app(cfg), host=args.host, port=args.port)
    return 0


def _cmd_analyze(args) -> int:
    journal = Path(args.log)
    if not journal.exists():
        print(f"no journal at {journal}", file=sys.stderr)
        return 2
    log = store_mod.SessionStore(journal).load()
    if args.report == "customization":
        report = store_mod.customization_distribution(log)
        output = (
            json.dumps(report.to_dict(), indent=2)
            if args.json
            else store_mod.render_report(report)
        )
    elif args.report == "questions":
        report = store_mod.question_distribution(log)
        output = (
            json.dumps(report.to_dict(), indent=2)
            if args.json
            else store_mod.render_report(report)
        )
    else:
        points = store_mod.length_trend(log)
        if args.json:
            output = json.dumps(
                [
                    {
                        "day": p.day,
                        "date": p.date,
                        "n": p.n,
                        "mean": p.mean,
                        "sd": p.sd,
                    }
                    for p in points
                ],
                indent=2,
            )
        else:
            output = store_mod.render_trend(points)
    print(output, end="" if output.endswith("\n") else "\n")
    return 0


def _cmd_synth_fixture(args) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text("utf-8"))
    except (OSError, ValueError) as exc:
        print(f"cannot read spec: {exc}", file=sys.stderr)
        return 2
    try:
        bundle = fixtures.synthesize_fixture(spec, args.out)
    except ValueError as exc:
        print(f"invalid fixture spec: {exc}", file=sys.stderr)
        return 2
    print(f"wrote fixture bundle to {bundle}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "generate":
        return _cmd_generate(args)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "analyze":
        return _cmd_analyze(args)
    return _cmd_synth_fixture(args)


if __name__ == "__main__":
    sys.exit(main())
