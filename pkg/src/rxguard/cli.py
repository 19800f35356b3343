"""Operator CLI: ingestion, indexing, assessments, experiments, serving.

Exit codes: 0 success, 1 runtime error (single machine-parsable line on
stderr), 2 usage error.
"""
from __future__ import annotations

import json
import sys
from functools import wraps
from pathlib import Path

import click

from . import evaluation, figures
from .config import AppConfig, load_config
from .domain import GroundTruthSet, Medication
from .errors import RxGuardError
from .gateway import FixtureStore, record_fixture
from .index import IndexEntry, VectorIndex
from .prompting import assemble_prompt, retrieve_context
from .smpc import chunk_document, parse_smpc
from .store import FileStore


def _fail(exc: Exception) -> None:
    code = exc.code if isinstance(exc, RxGuardError) else type(exc).__name__
    click.echo(f"error code={code} message={str(exc)!r}", err=True)
    sys.exit(1)


def handles_errors(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except RxGuardError as exc:
            _fail(exc)
        except OSError as exc:
            _fail(exc)

    return wrapper


def _slug(name: str) -> str:
    return "".join(ch if ch.isalnum() else "-" for ch in name.strip().lower()).strip("-")


def _load_app_config(root: Path, config_path: Path | None) -> AppConfig:
    if config_path is not None:
        return load_config(config_path)
    default = root / "config.json"
    if default.exists():
        return load_config(default)
    return AppConfig()


@click.group()
@click.option(
    "--root",
    type=click.Path(path_type=Path),
    default=Path("data"),
    envvar="RXGUARD_ROOT",
    show_default=True,
    help="Store root directory.",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path, exists=True),
    default=None,
    help="JSON config file (defaults to <root>/config.json when present).",
)
@click.pass_context
def main(ctx: click.Context, root: Path, config_path: Path | None) -> None:
    """Retrieval-grounded medication suitability screening."""
    ctx.ensure_object(dict)
    ctx.obj["root"] = root
    ctx.obj["config_path"] = config_path


@main.command()
@click.pass_context
@handles_errors
def init(ctx: click.Context) -> None:
    """Initialize the store layout."""
    store = FileStore.init(ctx.obj["root"])
    click.echo(f"initialized store at {store.root}")


def _open(ctx: click.Context) -> tuple[FileStore, AppConfig]:
    store = FileStore(ctx.obj["root"])
    store.check_schema()
    return store, _load_app_config(ctx.obj["root"], ctx.obj["config_path"])


@main.command("ingest-smpc")
@click.argument("source", type=click.Path(path_type=Path, exists=True))
@click.option("--medication", required=True, help="Medication name for the catalog.")
@click.option("--window", type=int, default=None, help="Chunk window in chars.")
@click.option("--overlap", type=int, default=None, help="Chunk overlap in chars.")
@click.pass_context
@handles_errors
def ingest_smpc(
    ctx: click.Context, source: Path, medication: str, window: int | None, overlap: int | None
) -> None:
    """Parse an SmPC text file and persist its sections and chunks."""
    store, config = _open(ctx)
    doc_id = _slug(medication)
    doc = parse_smpc(source.read_text(encoding="utf-8"), doc_id=doc_id, medication_name=medication)
    chunks = chunk_document(
        doc,
        window=window if window is not None else config.chunk_window,
        overlap=overlap if overlap is not None else config.chunk_overlap,
    )
    store.put_document(doc)
    store.put_chunks(doc_id, chunks)
    click.echo(f"ingested {medication} as {doc_id}: {len(doc.sections)} sections, {len(chunks)} chunks")


@main.command()
@click.option("--all", "index_all", is_flag=True, required=True, help="Index every ingested SmPC.")
@click.pass_context
@handles_errors
def index(ctx: click.Context, index_all: bool) -> None:
    """Embed all stored chunks and rebuild the vector index."""
    store, config = _open(ctx)
    provider = config.build_provider()
    doc_ids = store.list_chunked_documents()
    if not doc_ids:
        raise RxGuardError("no ingested documents to index")
    vec_index = None
    total = 0
    for doc_id in doc_ids:
        for chunk in store.get_chunks(doc_id):
            vector = provider.embed_text(chunk.text)
            if vec_index is None:
                vec_index = VectorIndex(dim=vector.size)
            vec_index.upsert(
                IndexEntry(chunk_id=chunk.chunk_id, medication_id=doc_id, vector=vector)
            )
            total += 1
    assert vec_index is not None
    vec_index.save(store.vectors_bin_path, store.vectors_manifest_path)
    click.echo(f"indexed {total} chunks from {len(doc_ids)} documents (dim={vec_index.dim})")


def _catalog(store: FileStore) -> dict[str, Medication]:
    catalog = {}
    for doc_id in store.list_documents():
        doc = store.get_document(doc_id)
        catalog[doc_id] = Medication(id=doc_id, name=doc.medication_name, smpc_doc_id=doc_id)
    return catalog


def _merged_truth(store: FileStore) -> GroundTruthSet:
    entries: dict = {}
    for truth_id in store.list_truth():
        entries.update(store.get_truth(truth_id).entries)
    return GroundTruthSet(entries=entries)


@main.command()
@click.option("--patient", required=True, help="Patient id.")
@click.option("--medication", "medication_id", required=True, help="Medication id.")
@click.option("--model", "model_id", required=True, help="Configured model id.")
@click.option("--rag/--no-rag", default=False, help="Ground the prompt in retrieved SmPC chunks.")
@click.pass_context
@handles_errors
def assess(ctx: click.Context, patient: str, medication_id: str, model_id: str, rag: bool) -> None:
    """Run one assessment and print the stored report as JSON."""
    store, config = _open(ctx)
    profile = store.get_profile(patient)
    catalog = _catalog(store)
    if medication_id not in catalog:
        raise RxGuardError(f"unknown medication {medication_id!r}")
    backends = config.build_backends()
    if model_id not in backends:
        raise RxGuardError(f"no backend configured for model {model_id!r}")
    vec_index = None
    if store.vectors_manifest_path.exists():
        vec_index = VectorIndex.load(store.vectors_bin_path, store.vectors_manifest_path)
    report = evaluation.run_assessment(
        profile,
        catalog[medication_id],
        model_id,
        rag,
        backends[model_id],
        index=vec_index,
        provider=config.build_provider(),
        chunks_by_id=store.all_chunks_by_id(),
        k=config.retrieval_k,
    )
    store.put_report(report)
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))


@main.command()
@click.option("--spec", "spec_path", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@click.option("--figures/--no-figures", "render_figures", default=True, show_default=True)
@click.pass_context
@handles_errors
def evaluate(
    ctx: click.Context, spec_path: Path, out_path: Path, render_figures: bool
) -> None:
    """Run the experiment matrix; write the metrics CSV and figures."""
    store, config = _open(ctx)
    spec = evaluation.ExperimentSpec.from_dict(
        json.loads(spec_path.read_text(encoding="utf-8"))
    )
    vec_index = None
    if store.vectors_manifest_path.exists():
        vec_index = VectorIndex.load(store.vectors_bin_path, store.vectors_manifest_path)
    result = evaluation.run_experiment(
        spec,
        profiles={pid: store.get_profile(pid) for pid in store.list_profiles()},
        medications=_catalog(store),
        truth=_merged_truth(store),
        backends=config.build_backends(),
        index=vec_index,
        provider=config.build_provider(),
        chunks_by_id=store.all_chunks_by_id(),
        archive=store.put_report,
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(result.table.to_csv(), encoding="utf-8")
    written = [str(out_path)]
    if render_figures:
        stem = out_path.with_suffix("")
        written.append(
            str(figures.render_metrics_heatmaps(result.table, Path(f"{stem}_metrics.png")))
        )
        written.append(
            str(figures.render_rag_comparison(result.table, Path(f"{stem}_rag_effect.png")))
        )
    empty = result.table.empty_cells()
    click.echo(
        f"evaluated {len(result.reports)} assessments; "
        f"invalid={sum(result.table.invalid_counts.values())}; "
        f"empty_cells={len(empty)}; wrote {', '.join(written)}"
    )


@main.command("record-fixtures")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path, exists=True), required=True)
@click.pass_context
@handles_errors
def record_fixtures(ctx: click.Context, spec_path: Path) -> None:
    """Run an experiment spec against configured backends, archiving every completion."""
    store, config = _open(ctx)
    spec = evaluation.ExperimentSpec.from_dict(
        json.loads(spec_path.read_text(encoding="utf-8"))
    )
    catalog = _catalog(store)
    backends = config.build_backends()
    vec_index = None
    if store.vectors_manifest_path.exists():
        vec_index = VectorIndex.load(store.vectors_bin_path, store.vectors_manifest_path)
    chunks_by_id = store.all_chunks_by_id()
    provider = config.build_provider()
    count = 0
    for model_id in spec.model_ids:
        fixture_store = FixtureStore(store.fixtures_dir / f"{model_id}.jsonl")
        for rag in spec.rag_flags:
            for patient_id in spec.patient_ids:
                profile = store.get_profile(patient_id)
                for medication_id in spec.medication_ids:
                    medication = catalog[medication_id]
                    context = None
                    if rag:
                        context = retrieve_context(
                            profile,
                            medication,
                            index=vec_index,
                            provider=provider,
                            chunks_by_id=chunks_by_id,
                            k=spec.k,
                        )
                    prompt = assemble_prompt(profile, medication, context)
                    text, record = backends[model_id].complete(prompt)
                    record_fixture(fixture_store, prompt, text, model_id, record.latency_ms)
                    count += 1
    click.echo(f"recorded {count} completions under {store.fixtures_dir}")


@main.command("review-summary")
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@click.option(
    "--raw-out",
    "raw_out_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Also export the individual reviews as CSV.",
)
@click.option("--figures/--no-figures", "render_figures", default=True, show_default=True)
@click.pass_context
@handles_errors
def review_summary(
    ctx: click.Context, out_path: Path, raw_out_path: Path | None, render_figures: bool
) -> None:
    """Export subjective review means as CSV plus a summary figure."""
    store, _config = _open(ctx)
    reviews = store.all_reviews()
    summary = evaluation.summarize_reviews(reviews)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(evaluation.review_summary_to_csv(summary), encoding="utf-8")
    written = [str(out_path)]
    if raw_out_path is not None:
        raw_out_path.parent.mkdir(parents=True, exist_ok=True)
        raw_out_path.write_text(evaluation.reviews_to_csv(reviews), encoding="utf-8")
        written.append(str(raw_out_path))
    if render_figures:
        stem = out_path.with_suffix("")
        written.append(str(figures.render_review_summary(summary, Path(f"{stem}.png"))))
    click.echo(f"wrote {', '.join(written)}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_context
@handles_errors
def serve(ctx: click.Context, port: int, host: str) -> None:
    """Serve the HTTP API for the clinician console."""
    import uvicorn

    from .service import create_app

    store, config = _open(ctx)
    uvicorn.run(create_app(store, config), host=host, port=port)


if __name__ == "__main__":
    main()
