"""Command-line entry point: each subcommand wraps one library operation."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .concepts import ConceptError, SlideConcept, load_concepts
from .critics import CriticThresholds
from .edits import EditError, write_command_log
from .ingest import ClusterConfig, DimensionMismatch, dbscan_cluster, parse_markdown, read_units, write_units, write_visual_map
from .instantiate import instantiate
from .ldl import LdlError, lex_ids, parse_text, serialize, validate
from .preval import (
    DIMENSIONS,
    EQUAL_WEIGHTS,
    DimensionScorer,
    PrevalError,
    calibrate,
    default_scorers,
    evaluate,
    load_model,
    load_preferences,
    save_model,
    synthetic_preferences,
    train_preference,
    write_profile_csv,
    zero_tag_head,
)
from .prototype import LpgModel, generate_prototype, load_corpus, train
from .refine import RefinementConfig, corrupt, quality_cost_trace, refine, write_quality_cost_csv, write_trace_csv
from .render import render_index_html, render_svg
from .sir import SirError, SlideDraft, from_json, to_json

log = logging.getLogger("slidesynth")

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3
VALIDATION_ERRORS = (LdlError, SirError, ConceptError, PrevalError, EditError, json.JSONDecodeError, KeyError)


class ValidationFailed(Exception):
    """Input was read but did not validate; the report is already printed."""


@dataclass
class PipelineConfig:
    refinement: RefinementConfig = field(default_factory=RefinementConfig)
    thresholds: CriticThresholds = field(default_factory=CriticThresholds)
    dim_weights: dict[str, float] = field(default_factory=lambda: dict(EQUAL_WEIGHTS))
    seed: int = 0

    @classmethod
    def from_file(cls, path: str | None) -> PipelineConfig:
        cfg = cls()
        if not path:
            return cfg
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        thresholds = CriticThresholds(**data.get("thresholds", {}))
        refinement = RefinementConfig(**{**data.get("refinement", {}), "thresholds": thresholds})
        return cls(refinement, thresholds, data.get("dim_weights", cfg.dim_weights), int(data.get("seed", 0)))

    def with_overrides(self, args: argparse.Namespace) -> PipelineConfig:
        cfg = self
        ref = cfg.refinement
        if getattr(args, "k", None) is not None:
            ref = replace(ref, max_iterations=args.k)
        if getattr(args, "tau", None) is not None:
            ref = replace(ref, severity_threshold=args.tau)
        cfg = replace(cfg, refinement=ref)
        if getattr(args, "seed", None) is not None:
            cfg = replace(cfg, seed=args.seed)
        return cfg


def demo_concepts_path() -> Path:
    return Path(str(resources.files("slidesynth") / "data" / "demo_concepts.json"))


def _concepts(args) -> list[SlideConcept]:
    return load_concepts(args.concepts or demo_concepts_path())


def _write(path: Path, data: bytes | str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- subcommands


def cmd_ldl_validate(args) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    problems = [v.to_dict() for v in validate(lex_ids(text))]
    print(json.dumps({"file": args.file, "violations": problems}, indent=2))
    if problems:
        raise ValidationFailed(f"{len(problems)} violation(s)")
    return EXIT_OK


def cmd_ldl_format(args) -> int:
    text = serialize(parse_text(Path(args.file).read_text(encoding="utf-8"))) + "\n"
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_parse(args) -> int:
    units, visuals = parse_markdown(Path(args.doc).read_text(encoding="utf-8"))
    out = _out_dir(args)
    write_units(out / "units.jsonl", units)
    write_visual_map(out / "visual_map.json", visuals)
    return EXIT_OK


def cmd_cluster(args) -> int:
    units = read_units(args.units)
    vectors = json.loads(Path(args.embeddings).read_text(encoding="utf-8"))
    if isinstance(vectors, dict):
        vectors = [vectors[u.unit_id] for u in units]
    if len(vectors) != len(units):
        raise DimensionMismatch("one embedding per unit is required")
    labels = dbscan_cluster(vectors, ClusterConfig(args.threshold, args.min_pts, args.eps))
    result = {u.unit_id: lab for u, lab in zip(units, labels)}
    _write(Path(args.out), json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def cmd_generate(args) -> int:
    model = LpgModel.load(args.model) if args.model else None
    out = _out_dir(args)
    for i, concept in enumerate(_concepts(args), start=1):
        layout = generate_prototype(concept, model, args.beam)
        _write(out / f"slide_{i:03d}.ldl", serialize(layout) + "\n")
    return EXIT_OK


def _concept_at(args) -> SlideConcept | None:
    if args.concepts is None and args.index is None:
        return None
    concepts = _concepts(args)
    idx = (args.index or 1) - 1
    if not 0 <= idx < len(concepts):
        raise ConceptError(f"concept index {idx + 1} outside 1..{len(concepts)}")
    return concepts[idx]


def cmd_instantiate(args) -> int:
    layout = parse_text(Path(args.ldl).read_text(encoding="utf-8"))
    concept = _concept_at(args) or SlideConcept()
    notes: list[str] = []
    draft = instantiate(layout, concept, notes)
    for n in notes:
        log.warning("%s", n)
    _write(Path(args.out), to_json(draft))
    return EXIT_OK


def _refine_one(draft: SlideDraft, concept: SlideConcept | None, cfg: PipelineConfig):
    return refine(draft, concept, cfg.refinement)


def _write_refinement(out: Path, index: int, result) -> None:
    _write(out / f"slide_{index:03d}.sir.json", to_json(result.draft))
    for crit in result.critiques:
        _write(out / f"critique_{index:03d}_t{crit.draft_iteration}.json", crit.to_json())
    write_command_log(out / f"commands_{index:03d}.jsonl", result.commands)


def cmd_refine(args) -> int:
    cfg = PipelineConfig.from_file(args.config).with_overrides(args)
    draft = from_json(Path(args.sir).read_bytes())
    result = _refine_one(draft, _concept_at(args), cfg)
    out = _out_dir(args)
    _write_refinement(out, args.slide, result)
    write_trace_csv(out / "trace.csv", [result.trace], with_timing=args.timing)
    return EXIT_OK


def cmd_render(args) -> int:
    out = _out_dir(args)
    for path in args.sir:
        p = Path(path)
        name = p.name.removesuffix(".sir.json").removesuffix(".json") + ".svg"
        _write(out / name, render_svg(from_json(p.read_bytes())))
    return EXIT_OK


def _load_scorers(path: str | None):
    return load_model(path)[0] if path else default_scorers()


def cmd_score(args) -> int:
    cfg = PipelineConfig.from_file(args.config)
    deck_dir = Path(args.deck)
    drafts = [from_json(p.read_bytes()) for p in sorted(deck_dir.glob("*.sir.json"))]
    profile = evaluate(drafts, _load_scorers(args.model), cfg.dim_weights)
    write_profile_csv(Path(args.out) if args.out else deck_dir / "profile.csv", [(deck_dir.name, profile)])
    return EXIT_OK


def cmd_train_lpg(args) -> int:
    data = load_corpus(args.corpus)
    history: list[float] = []
    model = train(LpgModel(l2_coeff=args.l2), data, steps=args.steps, lr=args.lr, history=history)
    model.save(args.out)
    log.info("final objective %.6f", history[-1] if history else float("nan"))
    return EXIT_OK


def cmd_train_preval(args) -> int:
    if args.data:
        pairs = load_preferences(args.data)
    else:
        pairs, _ = synthetic_preferences(args.synthetic, seed=args.seed or 0)
    scorers = default_scorers() if args.warm_start else {k: DimensionScorer(k) for k in DIMENSIONS}
    scorers, head = train_preference(
        scorers, zero_tag_head(), pairs, lambda_tag=args.lambda_tag, alpha_l2=args.l2, steps=args.steps, lr=args.lr
    )
    calib = [p.features_a for p in pairs] + [p.features_b for p in pairs]
    scorers = {k: calibrate(s, calib) for k, s in scorers.items()}
    save_model(args.out, scorers, head)
    return EXIT_OK


def build_corrupted_corpus(concepts: Sequence[SlideConcept], n: int, seed: int) -> list[tuple[SlideDraft, SlideConcept]]:
    rng = random.Random(seed)
    corpus = []
    for j in range(n):
        concept = concepts[j % len(concepts)]
        draft = instantiate(generate_prototype(concept), concept)
        corpus.append((corrupt(draft, rng), concept))
    return corpus


def cmd_trace(args) -> int:
    cfg = PipelineConfig.from_file(args.config).with_overrides(args)
    corpus = build_corrupted_corpus(_concepts(args), args.n, cfg.seed)
    rows = quality_cost_trace(corpus, args.max_k, cfg.refinement)
    write_quality_cost_csv(args.out or "quality_cost.csv", rows)
    return EXIT_OK


def run_pipeline(
    concepts: Sequence[SlideConcept],
    out: Path,
    cfg: PipelineConfig,
    lpg_model: LpgModel | None = None,
    scorers=None,
    doc: str | None = None,
    timing: bool = False,
    workers: int = 1,
) -> None:
    """Prototype, instantiate, refine, render and score every concept; write all artifacts."""
    if doc is not None:
        units, visuals = parse_markdown(doc)
        write_units(out / "units.jsonl", units)
        write_visual_map(out / "visual_map.json", visuals)

    def one(concept: SlideConcept):
        layout = generate_prototype(concept, lpg_model)
        draft = instantiate(layout, concept)
        return layout, _refine_one(draft, concept, cfg)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, concepts))
    else:
        results = [one(c) for c in concepts]

    svgs = []
    for i, (layout, result) in enumerate(results, start=1):
        _write(out / f"slide_{i:03d}.ldl", serialize(layout) + "\n")
        _write_refinement(out, i, result)
        svgs.append(f"slide_{i:03d}.svg")
        _write(out / svgs[-1], render_svg(result.draft))
    write_trace_csv(out / "trace.csv", [r.trace for _, r in results], with_timing=timing)
    _write(out / "deck.html", render_index_html(svgs))
    profile = evaluate([r.draft for _, r in results], scorers or default_scorers(), cfg.dim_weights)
    write_profile_csv(out / "profile.csv", [("deck", profile)])


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig.from_file(args.config).with_overrides(args)
    doc = Path(args.doc).read_text(encoding="utf-8") if args.doc else None
    lpg = LpgModel.load(args.lpg_model) if args.lpg_model else None
    run_pipeline(
        _concepts(args), _out_dir(args), cfg, lpg, _load_scorers(args.preval_model), doc, args.timing, args.workers
    )
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slidesynth", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--json", action="store_true", help="report errors as JSON on stderr")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        return sp

    ldl = sub.add_parser("ldl", help="validate or reformat layout files")
    ldl_sub = ldl.add_subparsers(dest="ldl_command", required=True)
    v = ldl_sub.add_parser("validate", help="report grammar violations")
    v.add_argument("file")
    v.set_defaults(func=cmd_ldl_validate)
    f = ldl_sub.add_parser("format", help="print the canonical form")
    f.add_argument("file")
    f.add_argument("--out")
    f.set_defaults(func=cmd_ldl_format)

    sp = add("parse", cmd_parse, "segment a Markdown document into units")
    sp.add_argument("doc")
    sp.add_argument("--out")

    sp = add("cluster", cmd_cluster, "DBSCAN over unit embeddings")
    sp.add_argument("units")
    sp.add_argument("--embeddings", required=True, help="JSON list of vectors or {unit_id: vector}")
    sp.add_argument("--threshold", type=int, default=200)
    sp.add_argument("--min-pts", type=int, default=2)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--out", required=True)

    sp = add("generate", cmd_generate, "layout prototypes for each concept")
    sp.add_argument("--concepts")
    sp.add_argument("--model", help="trained prototype model; rule templates otherwise")
    sp.add_argument("--beam", type=int, default=5)
    sp.add_argument("--out")

    sp = add("instantiate", cmd_instantiate, "bind a layout to a concept")
    sp.add_argument("ldl")
    sp.add_argument("--concepts")
    sp.add_argument("--index", type=int, help="1-based concept index")
    sp.add_argument("--out", required=True)

    sp = add("refine", cmd_refine, "critique-and-repair one draft")
    sp.add_argument("sir")
    sp.add_argument("--concepts")
    sp.add_argument("--index", type=int)
    sp.add_argument("--slide", type=int, default=1, help="slide number used in output names")
    sp.add_argument("--config")
    sp.add_argument("--k", type=int)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--timing", action="store_true", help="record wall-clock ms in trace.csv")
    sp.add_argument("--out")

    sp = add("render", cmd_render, "render drafts to SVG")
    sp.add_argument("sir", nargs="+")
    sp.add_argument("--out")

    sp = add("score", cmd_score, "quality profile of a deck directory")
    sp.add_argument("--deck", required=True)
    sp.add_argument("--model")
    sp.add_argument("--config")
    sp.add_argument("--out")

    sp = add("train-lpg", cmd_train_lpg, "train the prototype model")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--steps", type=int, default=500)
    sp.add_argument("--lr", type=float, default=0.5)
    sp.add_argument("--l2", type=float, default=1e-4)
    sp.add_argument("--out", required=True)

    sp = add("train-preval", cmd_train_preval, "train quality scorers from preferences")
    sp.add_argument("--data", help="preference JSONL; synthetic data otherwise")
    sp.add_argument("--synthetic", type=int, default=500)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--lambda-tag", type=float, default=0.1)
    sp.add_argument("--l2", type=float, default=1e-4)
    sp.add_argument("--steps", type=int, default=300)
    sp.add_argument("--lr", type=float, default=0.5)
    sp.add_argument("--warm-start", action="store_true", help="start from the default scorers")
    sp.add_argument("--out", required=True)

    sp = add("trace", cmd_trace, "quality-vs-iterations table on a corrupted corpus")
    sp.add_argument("--concepts")
    sp.add_argument("--n", type=int, default=50)
    sp.add_argument("--max-k", type=int, default=8)
    sp.add_argument("--config")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--out")

    sp = add("pipeline", cmd_pipeline, "concepts to rendered, refined, scored deck")
    sp.add_argument("--concepts", help="concepts JSON; the bundled demo otherwise")
    sp.add_argument("--doc", help="optional Markdown source to segment alongside")
    sp.add_argument("--lpg-model")
    sp.add_argument("--preval-model")
    sp.add_argument("--config")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--timing", action="store_true", help="record wall-clock ms in trace.csv")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=True)
    return p


def _report(args, code: int, exc: BaseException) -> int:
    if getattr(args, "json", False):
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    else:
        print(f"slidesynth: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationFailed, *VALIDATION_ERRORS, ValueError) as exc:
        return _report(args, EXIT_VALIDATION, exc)
    except Exception as exc:  # noqa: BLE001
        return _report(args, EXIT_RUNTIME, exc)


if __name__ == "__main__":
    sys.exit(main())
